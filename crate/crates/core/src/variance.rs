//! The variance `V(σ) = ½ Σ Λ²(n) n^{-2σ}`, the regime parameter
//! `ψ = (2σ−1) log T` and the threshold radii derived from them.
//!
//! `V` is evaluated through the rapidly convergent identity
//!
//! ```text
//! Σ Λ²(n) n^{-s} = Σ_{N≥1} h(N) · g(N s),   h(N) = Π_{p|N} (1 − p),
//! ```
//!
//! where `g = (ζ'/ζ)'`. Terms decay like `N 2^{-Ns}`, so a few dozen
//! evaluations of `g` give `V` to near machine precision even as `σ → 1/2`.
//! A direct partial sum with an integral tail bound is kept as an
//! independent check.

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::arith::prime_powers_up_to_capped;
use crate::error::{domain, Error, Result};
use crate::numeric::CompensatedSum;
use crate::zeta::log_deriv_slope_real;

/// Default relative tolerance for `V`.
pub const DEFAULT_VARIANCE_TOL: f64 = 1e-12;

const SLOPE_TOL: f64 = 1e-14;
const MAX_TERMS: usize = 4096;

/// `h(N) = Π_{p | N} (1 − p)`.
pub fn mobius_weight(n: u64) -> f64 {
    let mut m = n;
    let mut h = 1.0;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            h *= 1.0 - p as f64;
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        h *= 1.0 - m as f64;
    }
    h
}

/// `∫_a^∞ log²u · u^{-s} du` for `s > 1`.
pub fn log_square_tail(a: f64, s: f64) -> f64 {
    let l = a.ln();
    let d = s - 1.0;
    a.powf(-d) * (l * l / d + 2.0 * l / (d * d) + 2.0 / (d * d * d))
}

/// Upper bound for `g(s) = Σ Λ(n) log n · n^{-s}`, valid for `s ≥ 3`.
fn slope_bound(s: f64) -> f64 {
    let l2 = core::f64::consts::LN_2;
    l2 * l2 * 2f64.powf(-s) + log_square_tail(2.0, s)
}

/// Bound on `½ Σ_{N>m} |h(N)| |g(2σN)|`, using `|h(N)| ≤ N`.
fn series_tail(sigma: f64, m: usize) -> f64 {
    let mut total = 0.0;
    let mut n = m + 1;
    loop {
        let term = n as f64 * slope_bound(2.0 * sigma * n as f64);
        total += term;
        if term <= 1e-18 * total || term == 0.0 {
            // remaining terms shrink faster than a ratio 3/4
            total += 3.0 * term;
            break;
        }
        n += 1;
    }
    0.5 * total
}

/// `V(σ)` from the first `terms` terms of the `h(N) g(2σN)` series and a
/// bound on what was left out (tail plus propagated evaluation error).
pub fn variance_with_terms(sigma: f64, terms: usize) -> Result<(f64, f64)> {
    if !(sigma > 0.5) {
        return Err(Error::Divergence(sigma));
    }
    if !sigma.is_finite() || terms == 0 {
        return Err(domain("sigma must be finite and terms positive"));
    }
    let mut sum = CompensatedSum::new();
    let mut err = 0.0;
    for n in 1..=terms {
        let s = 2.0 * sigma * n as f64;
        let h = mobius_weight(n as u64);
        if s > 1000.0 {
            break;
        }
        let tol = (SLOPE_TOL / (s - 1.0).min(1.0)).min(1e-6);
        let (g, e) = log_deriv_slope_real(s, tol)?;
        sum.add(0.5 * h * g);
        err += 0.5 * h.abs() * e;
    }
    let tail = if 2.0 * sigma * (terms + 1) as f64 >= 3.0 {
        series_tail(sigma, terms)
    } else {
        f64::INFINITY
    };
    Ok((sum.value(), tail + err))
}

/// `V(σ)` with `truncation_bound ≤ tol · V`.
pub fn variance(sigma: f64, tol: f64) -> Result<(f64, f64)> {
    if !(sigma > 0.5) {
        return Err(Error::Divergence(sigma));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(domain("relative tolerance must lie in (0, 1)"));
    }
    let mut terms = 8usize;
    loop {
        let (v, bound) = variance_with_terms(sigma, terms)?;
        if bound <= tol * v {
            return Ok((v, bound));
        }
        if terms >= MAX_TERMS {
            return Err(Error::Precision { t: 0.0, tol });
        }
        terms *= 2;
    }
}

/// Direct partial sum `½ Σ_{n≤M} Λ²(n) n^{-2σ}` and an upper bound on the
/// remaining tail, so that `partial ≤ V ≤ partial + tail`.
pub fn variance_partial_sum(sigma: f64, cutoff: f64) -> Result<(f64, f64)> {
    if !(sigma > 0.5) {
        return Err(Error::Divergence(sigma));
    }
    let m = cutoff.max(10.0);
    let table = prime_powers_up_to_capped(m, 1e9)?;
    let s = 2.0 * sigma;
    let partial: CompensatedSum = table
        .iter()
        .map(|e| e.log_p * e.log_p * (e.value as f64).powf(-s))
        .collect();
    let mut start = m.floor();
    // log²u · u^{-s} decreases once s log u > 2
    start = start.max((2.0 / s).exp());
    Ok((0.5 * partial.value(), 0.5 * log_square_tail(start, s)))
}

/// Everything an experiment needs to know about its regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceContext {
    pub sigma: f64,
    #[serde(rename = "T")]
    pub height: f64,
    #[serde(rename = "V")]
    pub variance: f64,
    pub psi: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    #[serde(rename = "bOmega")]
    pub b_omega: f64,
    #[serde(rename = "tOmega")]
    pub t_omega: f64,
    #[serde(rename = "K_const")]
    pub k_const: f64,
    pub truncation_bound: f64,
}

/// Threshold radii recomputed from their defining formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub psi: f64,
    pub omega: f64,
    pub b_omega: f64,
    pub t_omega: f64,
}

pub fn psi_of(sigma: f64, height: f64) -> f64 {
    (2.0 * sigma - 1.0) * height.ln()
}

pub fn sigma_of(psi: f64, height: f64) -> f64 {
    0.5 + psi / (2.0 * height.ln())
}

pub fn thresholds(sigma: f64, height: f64, variance: f64, k_const: f64) -> Thresholds {
    let psi = psi_of(sigma, height);
    let cap = (-10f64).exp() * (psi / psi.ln()).sqrt();
    let small = (-10f64).exp();
    let d = 2.0 * sigma - 1.0;
    Thresholds {
        psi,
        omega: (small * variance.sqrt()).min(cap),
        b_omega: (small * variance.powf(1.5)).min(cap),
        t_omega: (k_const * d * (sigma / d).exp()).min(cap),
    }
}

/// Build the context for `(σ, T)`; requires `T ≥ e^e`, `σ ∈ (1/2, 2]` and
/// `ψ > 1`.
pub fn make_context(sigma: f64, height: f64, k_const: f64) -> Result<VarianceContext> {
    if !(height >= core::f64::consts::E.exp()) || !height.is_finite() {
        return Err(domain("T must be at least e^e"));
    }
    if !(sigma > 0.5 && sigma <= 2.0) {
        return Err(domain("sigma must lie in (1/2, 2]"));
    }
    if !(k_const > 0.0) || !k_const.is_finite() {
        return Err(domain("K_const must be positive"));
    }
    let psi = psi_of(sigma, height);
    if !(psi > 1.0) {
        return Err(Error::OutOfRegime(psi));
    }
    let (v, bound) = variance(sigma, DEFAULT_VARIANCE_TOL)?;
    let th = thresholds(sigma, height, v, k_const);
    Ok(VarianceContext {
        sigma,
        height,
        variance: v,
        psi: th.psi,
        omega: th.omega,
        b_omega: th.b_omega,
        t_omega: th.t_omega,
        k_const,
        truncation_bound: bound,
    })
}

/// Context at `σ = 1/2 + ψ/(2 log T)`.
pub fn context_from_psi(psi: f64, height: f64, k_const: f64) -> Result<VarianceContext> {
    if !(psi > 1.0) {
        return Err(Error::OutOfRegime(psi));
    }
    if !(height > 1.0) {
        return Err(domain("T must exceed 1"));
    }
    make_context(sigma_of(psi, height), height, k_const)
}

impl VarianceContext {
    /// `V^{-1/2}`, the normalizer applied to every sample.
    pub fn scale(&self) -> f64 {
        1.0 / self.variance.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mobius_weight_values() {
        assert_eq!(mobius_weight(1), 1.0);
        assert_eq!(mobius_weight(4), -1.0);
        assert_eq!(mobius_weight(6), 2.0);
        assert_eq!(mobius_weight(30), -8.0);
    }

    #[test]
    fn variance_oracle_values() {
        let cases = [
            (1.0, 0.402604910114207014750),
            (0.6, 12.0905741601161990295),
            (0.8, 1.21849019789038201656),
            (0.51, 1249.27043114136712201),
            (2.0, 0.0268623078549291926852),
            (1.5, 0.0802420195517619462968),
        ];
        for (sigma, oracle) in cases {
            let (v, bound) = variance(sigma, 1e-12).unwrap();
            assert!(
                ((v - oracle) / oracle).abs() < 1e-11,
                "{sigma}: {v} vs {oracle}"
            );
            assert!(bound <= 1e-12 * v);
        }
    }

    #[test]
    fn partial_sum_brackets_series() {
        for sigma in [0.8, 1.0, 1.5] {
            let (v, _) = variance(sigma, 1e-12).unwrap();
            let (p, tail) = variance_partial_sum(sigma, 1e5).unwrap();
            assert!(p <= v && v <= p + tail, "{sigma}");
        }
    }

    #[test]
    fn divergence_below_half() {
        assert_eq!(variance(0.5, 1e-10), Err(Error::Divergence(0.5)));
        assert!(matches!(
            variance_partial_sum(0.4, 100.0),
            Err(Error::Divergence(_))
        ));
    }

    #[test]
    fn context_from_psi_round_trips() {
        let ctx = context_from_psi(10.0, 1e5, 1.0).unwrap();
        assert!((ctx.sigma - (0.5 + 10.0 / (2.0 * 1e5f64.ln()))).abs() < 1e-15);
        assert!((ctx.psi - 10.0).abs() < 1e-12);
        let c2 = make_context(0.6, 1e4, 1.0).unwrap();
        assert!((c2.psi - 0.2 * 1e4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn regime_gate() {
        assert!(matches!(
            make_context(0.51, 1e4, 1.0),
            Err(Error::OutOfRegime(_))
        ));
        assert!(matches!(
            make_context(0.6, 10.0, 1.0),
            Err(Error::Domain(_))
        ));
        let ctx = make_context(0.55, 1e6, 1.0).unwrap();
        let d = 2.0 * 0.55 - 1.0;
        let psi = d * 1e6f64.ln();
        let expected = (d * (0.55 / d).exp()).min((-10f64).exp() * (psi / psi.ln()).sqrt());
        assert_eq!(ctx.t_omega, expected);
    }

    #[test]
    fn distribution_scale_below_chf_radius_when_variance_large() {
        let ctx = make_context(0.6, 1e6, 1.0).unwrap();
        assert!(ctx.variance >= 1.0);
        assert!(ctx.b_omega <= ctx.omega);
    }
}
