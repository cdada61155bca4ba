//! The random Euler product
//!
//! ```text
//! S(θ) = V^{-1/2} Σ_{p^n ≤ x} log p · p^{-nσ} · e(n θ_p)
//! ```
//!
//! with independent uniform phases `θ_p`: exact moments by matching integer
//! keys, the characteristic function as a product of one-dimensional
//! integrals, Monte Carlo estimates and the truncated moment expansion.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{prime_powers_up_to, PrimePowerTable};
use crate::batch::{chunk_range, chunks_for, run_serial, ChunkedJob};
use crate::error::{domain, Error, Result};
use crate::numeric::{e, ComplexSum};
use crate::variance::{variance, DEFAULT_VARIANCE_TOL};

/// Default cap on entries of a coefficient map in exact moments.
pub const DEFAULT_MOMENT_BUDGET: usize = 4_000_000;

/// Samples per random stream in Monte Carlo runs.
pub const MC_CHUNK: usize = 1024;

/// Largest trapezoid size before `chf_product` gives up.
pub const MAX_QUAD_POINTS: usize = 1 << 20;

/// Tolerance between successive trapezoid sizes.
pub const QUAD_TOL: f64 = 1e-12;

/// One prime with the coefficients of its powers `p, p², …` in `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeTerms {
    pub prime: u64,
    /// `coefs[n-1]` belongs to `p^n`.
    pub coefs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TorusModel {
    sigma: f64,
    x: f64,
    variance: f64,
    table: PrimePowerTable,
    terms: Vec<PrimeTerms>,
}

impl TorusModel {
    /// Model normalized by the full variance `V(σ)`.
    pub fn new(sigma: f64, x: f64) -> Result<TorusModel> {
        let (v, _) = variance(sigma, DEFAULT_VARIANCE_TOL)?;
        Self::with_variance(sigma, x, v)
    }

    /// Model normalized by a caller-supplied variance.
    pub fn with_variance(sigma: f64, x: f64, v: f64) -> Result<TorusModel> {
        if !(sigma > 0.5) || !sigma.is_finite() {
            return Err(Error::Divergence(sigma));
        }
        if !(v > 0.0) || !v.is_finite() {
            return Err(domain("variance must be positive"));
        }
        let table = prime_powers_up_to(x)?;
        let scale = 1.0 / v.sqrt();
        let mut terms: Vec<PrimeTerms> = Vec::new();
        for p in table.primes() {
            terms.push(PrimeTerms {
                prime: p,
                coefs: Vec::new(),
            });
        }
        let mut by_prime: BTreeMap<u64, usize> = BTreeMap::new();
        for (i, t) in terms.iter().enumerate() {
            by_prime.insert(t.prime, i);
        }
        let mut entries: Vec<_> = table.iter().copied().collect();
        entries.sort_by_key(|e| (e.prime, e.exponent));
        for en in entries {
            let c = en.log_p * (-(en.exponent as f64) * sigma * en.log_p).exp() * scale;
            terms[by_prime[&en.prime]].coefs.push(c);
        }
        Ok(TorusModel {
            sigma,
            x,
            variance: v,
            table,
            terms,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn table(&self) -> &PrimePowerTable {
        &self.table
    }

    pub fn terms(&self) -> &[PrimeTerms] {
        &self.terms
    }

    pub fn primes(&self) -> Vec<u64> {
        self.terms.iter().map(|t| t.prime).collect()
    }

    /// `Σ c²`, the exact value of `∫ |S|² dθ`.
    pub fn second_moment(&self) -> f64 {
        let mut acc = crate::numeric::CompensatedSum::new();
        for t in &self.terms {
            for c in &t.coefs {
                acc.add(c * c);
            }
        }
        acc.value()
    }

    /// `S(θ)` with `theta[i]` the phase of the `i`-th prime.
    pub fn eval_aligned(&self, theta: &[f64]) -> Complex64 {
        let mut acc = ComplexSum::new();
        for (t, &th) in self.terms.iter().zip(theta) {
            let base = e(th);
            let mut z = base;
            for c in &t.coefs {
                acc.add(z * *c);
                z *= base;
            }
        }
        acc.value()
    }
}

/// A point of the torus: one phase per prime.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TorusPoint {
    pub theta: BTreeMap<u64, f64>,
}

impl TorusPoint {
    pub fn constant(primes: &[u64], value: f64) -> TorusPoint {
        TorusPoint {
            theta: primes.iter().map(|&p| (p, value)).collect(),
        }
    }
}

/// `S(θ)`; every prime of the model needs a coordinate.
pub fn eval_s(model: &TorusModel, point: &TorusPoint) -> Result<Complex64> {
    let mut theta = Vec::with_capacity(model.terms.len());
    for t in &model.terms {
        match point.theta.get(&t.prime) {
            Some(&v) => theta.push(v),
            None => {
                return Err(domain(
                    "torus point lacks a coordinate for a prime of the model",
                ))
            }
        }
    }
    Ok(model.eval_aligned(&theta))
}

type CoefMap = BTreeMap<u128, f64>;

/// Coefficients of `S^m` keyed by the integer product of the prime powers,
/// keeping only keys `≤ limit`.
fn power_map(model: &TorusModel, m: usize, limit: u128, budget: usize) -> Result<CoefMap> {
    let mut base: Vec<(u128, f64)> = Vec::new();
    for t in &model.terms {
        let mut key = t.prime as u128;
        for c in &t.coefs {
            if key <= limit {
                base.push((key, *c));
            }
            key = key.saturating_mul(t.prime as u128);
        }
    }
    let mut cur: CoefMap = BTreeMap::new();
    cur.insert(1, 1.0);
    for _ in 0..m {
        let mut next: CoefMap = BTreeMap::new();
        for (&k, &a) in &cur {
            for &(b, c) in &base {
                match k.checked_mul(b) {
                    Some(key) if key <= limit => {
                        *next.entry(key).or_insert(0.0) += a * c;
                        if next.len() > budget {
                            return Err(Error::Capacity { budget });
                        }
                    }
                    _ => {}
                }
            }
        }
        cur = next;
    }
    Ok(cur)
}

/// `∫ S^m conj(S)^k dθ` by matching equal integer products.
pub fn torus_moment_exact(model: &TorusModel, m: usize, k: usize) -> Result<Complex64> {
    torus_moment_exact_with_budget(model, m, k, DEFAULT_MOMENT_BUDGET)
}

pub fn torus_moment_exact_with_budget(
    model: &TorusModel,
    m: usize,
    k: usize,
    budget: usize,
) -> Result<Complex64> {
    if m + k > 6 {
        return Err(domain("exact moments are limited to m + k <= 6"));
    }
    if m == 0 && k == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if m == 0 || k == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let floor_x = model.x.floor() as u128;
    let mut limit: u128 = 1;
    for _ in 0..m.min(k) {
        limit = limit
            .checked_mul(floor_x)
            .ok_or(Error::Capacity { budget })?;
    }
    let a = power_map(model, m, limit, budget)?;
    let b = if m == k {
        None
    } else {
        Some(power_map(model, k, limit, budget)?)
    };
    let b = b.as_ref().unwrap_or(&a);
    let mut acc = crate::numeric::CompensatedSum::new();
    for (key, va) in &a {
        if let Some(vb) = b.get(key) {
            acc.add(va * vb);
        }
    }
    Ok(Complex64::new(acc.value(), 0.0))
}

/// `∫_0^1 e(u Re f(θ) + v Im f(θ)) dθ` for `f(θ) = Σ c_n e(nθ)`, by the
/// periodic trapezoid rule with doubling.
fn prime_factor(coefs: &[f64], u: f64, v: f64, start: usize) -> Result<Complex64> {
    let mut q = start;
    let eval_at = |j: usize, q: usize| -> Complex64 {
        let mut f = Complex64::new(0.0, 0.0);
        for (n, c) in coefs.iter().enumerate() {
            let idx = (j * (n + 1)) % q;
            let (s, co) = (2.0 * PI * idx as f64 / q as f64).sin_cos();
            f += Complex64::new(co, s) * *c;
        }
        e(u * f.re + v * f.im)
    };
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..q {
        sum += eval_at(j, q);
    }
    let mut prev = sum / q as f64;
    while q < MAX_QUAD_POINTS {
        // odd points of the doubled rule
        let q2 = 2 * q;
        let mut odd = Complex64::new(0.0, 0.0);
        for j in 0..q {
            odd += eval_at(2 * j + 1, q2);
        }
        sum += odd;
        let cur = sum / q2 as f64;
        q = q2;
        if (cur - prev).norm() < QUAD_TOL {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature(alloc::format!(
        "trapezoid rule did not settle below {MAX_QUAD_POINTS} points"
    )))
}

/// `E e(u Re S + v Im S)` as a product of one-dimensional integrals.
pub fn chf_product(model: &TorusModel, u: f64, v: f64, quad_points: usize) -> Result<Complex64> {
    if quad_points < 64 {
        return Err(domain("chf_product needs at least 64 quadrature points"));
    }
    if u == 0.0 && v == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut prod = Complex64::new(1.0, 0.0);
    for t in &model.terms {
        prod *= prime_factor(&t.coefs, u, v, quad_points)?;
    }
    Ok(prod)
}

/// `e^{-2π²(u²+v²)}`.
pub fn gaussian_chf(u: f64, v: f64) -> f64 {
    (-2.0 * PI * PI * (u * u + v * v)).exp()
}

/// `((|u|+|v|)³/V^{3/2} + (u²+v²) x^{1−2σ}((2σ−1) log x + 1)) · e^{-2π²(u²+v²)}`,
/// the shape of the product chf's distance from the Gaussian.
pub fn gaussian_envelope(model: &TorusModel, u: f64, v: f64) -> f64 {
    let d = 2.0 * model.sigma - 1.0;
    let lx = model.x.ln();
    let a = (u.abs() + v.abs()).powi(3) / model.variance.powf(1.5);
    let b = (u * u + v * v) * model.x.powf(-d) * (d * lx + 1.0);
    (a + b) * gaussian_chf(u, v)
}

/// Seeded samples of `S(θ)`; chunk `i` draws from stream `i` of the seed.
pub struct TorusSampler<'a> {
    model: &'a TorusModel,
    count: usize,
    seed: u64,
}

impl<'a> TorusSampler<'a> {
    pub fn new(model: &'a TorusModel, count: usize, seed: u64) -> TorusSampler<'a> {
        TorusSampler { model, count, seed }
    }
}

impl ChunkedJob for TorusSampler<'_> {
    type Item = Complex64;

    fn chunk_count(&self) -> usize {
        chunks_for(self.count, MC_CHUNK)
    }

    fn run_chunk(&self, index: usize) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        let mut theta = vec![0.0; self.model.terms.len()];
        chunk_range(self.count, MC_CHUNK, index)
            .map(|_| {
                for th in theta.iter_mut() {
                    *th = rng.random::<f64>();
                }
                self.model.eval_aligned(&theta)
            })
            .collect()
    }
}

pub fn sample_torus(model: &TorusModel, count: usize, seed: u64) -> Vec<Complex64> {
    run_serial(&TorusSampler::new(model, count, seed))
}

/// Mean of `f` over samples with the standard error of the mean.
pub fn mean_with_error(values: impl Iterator<Item = Complex64> + Clone) -> (Complex64, f64) {
    let mut n = 0usize;
    let mut acc = ComplexSum::new();
    for z in values.clone() {
        acc.add(z);
        n += 1;
    }
    if n == 0 {
        return (Complex64::new(f64::NAN, f64::NAN), f64::NAN);
    }
    let mean = acc.value() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let mut ss = crate::numeric::CompensatedSum::new();
    for z in values {
        ss.add((z - mean).norm_sqr());
    }
    (mean, (ss.value() / (n as f64 * (n as f64 - 1.0))).sqrt())
}

/// Monte Carlo chf estimate at `(u, v)` from precomputed samples.
pub fn chf_from_samples(samples: &[Complex64], u: f64, v: f64) -> (Complex64, f64) {
    if u == 0.0 && v == 0.0 {
        return (Complex64::new(1.0, 0.0), 0.0);
    }
    mean_with_error(samples.iter().map(|s| e(u * s.re + v * s.im)))
}

pub fn chf_montecarlo(
    model: &TorusModel,
    u: f64,
    v: f64,
    n_samples: usize,
    seed: u64,
) -> Result<(Complex64, f64)> {
    if n_samples < 1000 {
        return Err(domain("Monte Carlo needs at least 1000 samples"));
    }
    let samples = sample_torus(model, n_samples, seed);
    Ok(chf_from_samples(&samples, u, v))
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

/// Truncated expansion of the chf in exact moments, with the remainder
/// envelope `(6√2 π(|u|+|v|))^N / (N/2)!`.
pub fn chf_by_moments(
    model: &TorusModel,
    u: f64,
    v: f64,
    order: usize,
) -> Result<(Complex64, f64)> {
    if order % 2 != 0 || order > 6 || order == 0 {
        return Err(domain("expansion order must be 2, 4 or 6"));
    }
    let c1 = Complex64::new(u, -v) * 0.5;
    let c2 = Complex64::new(u, v) * 0.5;
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let mut moments: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..order {
        let mut inner = Complex64::new(0.0, 0.0);
        for j in 0..=k {
            let key = (j, k - j);
            let m = match moments.get(&key) {
                Some(m) => *m,
                None => {
                    let m = torus_moment_exact(model, j, k - j)?;
                    moments.insert(key, m);
                    m
                }
            };
            inner += c1.powu(j as u32) * c2.powu((k - j) as u32) * m * binomial(k, j);
        }
        total += two_pi_i.powu(k as u32) / factorial(k) * inner;
    }
    let env =
        (6.0 * 2f64.sqrt() * PI * (u.abs() + v.abs())).powi(order as i32) / factorial(order / 2);
    Ok((total, env))
}

/// Monte Carlo check of `∫|S|^{2k} ≪ 18^k k!`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentBoundReport {
    pub k: usize,
    pub estimate: f64,
    pub std_error: f64,
    pub bound: f64,
    pub exact: Option<f64>,
    pub within_bound: bool,
    /// `|estimate − exact| ≤ 3·std_error` when the exact value is known.
    pub agrees_with_exact: bool,
}

pub fn moment_bound_check(
    model: &TorusModel,
    k: usize,
    n_samples: usize,
    seed: u64,
) -> Result<MomentBoundReport> {
    let samples = sample_torus(model, n_samples, seed);
    moment_bound_from_samples(model, k, &samples)
}

pub fn moment_bound_from_samples(
    model: &TorusModel,
    k: usize,
    samples: &[Complex64],
) -> Result<MomentBoundReport> {
    if k > 3 {
        return Err(domain("moment bound check covers k <= 3"));
    }
    let (est, se) = if k == 0 {
        (1.0, 0.0)
    } else {
        let (m, se) = mean_with_error(
            samples
                .iter()
                .map(|s| Complex64::new(s.norm_sqr().powi(k as i32), 0.0)),
        );
        (m.re, se)
    };
    let bound = 18f64.powi(k as i32) * factorial(k);
    let exact = match torus_moment_exact(model, k, k) {
        Ok(v) => Some(v.re),
        Err(Error::Capacity { .. }) => None,
        Err(e) => return Err(e),
    };
    let agrees = exact.is_none_or(|x| (est - x).abs() <= 3.0 * se + 1e-12 * x.abs());
    Ok(MomentBoundReport {
        k,
        estimate: est,
        std_error: se,
        bound,
        exact,
        within_bound: est - 3.0 * se <= bound,
        agrees_with_exact: agrees,
    })
}

/// Largest `|chf_product|` on circles of the given radii.
pub fn decay_profile(
    model: &TorusModel,
    radii: &[f64],
    angles: usize,
    quad_points: usize,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut best = 0.0f64;
        for a in 0..angles.max(1) {
            let phi = 2.0 * PI * a as f64 / angles.max(1) as f64;
            let z = chf_product(model, r * phi.cos(), r * phi.sin(), quad_points)?;
            best = best.max(z.norm());
        }
        out.push((r, best));
    }
    Ok(out)
}

/// Decay constant `c` with `|chf| ≤ e^{-c r²}` on a profile: the smallest
/// `−log|chf| / r²` over radii where the modulus is above `floor`.
pub fn fit_decay(profile: &[(f64, f64)], floor: f64) -> Option<f64> {
    profile
        .iter()
        .filter(|(r, m)| *r > 0.0 && *m > floor)
        .map(|(r, m)| -m.ln() / (r * r))
        .fold(None, |acc: Option<f64>, c| {
            Some(acc.map_or(c, |a| a.min(c)))
        })
}
