//! Euler–Maclaurin summation for `ζ(s)` and its first two derivatives.
//!
//! With cutoff `N` and `m` correction terms,
//!
//! ```text
//! ζ(s) = Σ_{n<N} n^{-s} + N^{1-s}/(s-1) + N^{-s}/2
//!        + Σ_{k=1}^{m} B_{2k}/(2k)! · s(s+1)…(s+2k-2) · N^{-s-2k+1} + R_m
//! ```
//!
//! and `|R_m|` is bounded by the first omitted term times
//! `|s+2m+1| / (σ+2m+1)`. Derivatives are carried through the boundary terms
//! as second-order jets in `s`.

use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// `B_{2k}/(2k)!` for `k = 1..=40`.
pub(crate) const BERNOULLI_RATIO: [f64; 40] = [
    0.08333333333333333,
    -0.001388888888888889,
    3.306878306878307e-05,
    -8.267195767195768e-07,
    2.08767569878681e-08,
    -5.284190138687493e-10,
    1.3382536530684679e-11,
    -3.3896802963225827e-13,
    8.586062056277845e-15,
    -2.174868698558062e-16,
    5.5090028283602295e-18,
    -1.3954464685812522e-19,
    3.534707039629467e-21,
    -8.953517427037546e-23,
    2.267952452337683e-24,
    -5.744790668872202e-26,
    1.455172475614865e-27,
    -3.6859949406653103e-29,
    9.336734257095045e-31,
    -2.36502241570063e-32,
    5.990671762482134e-34,
    -1.5174548844682903e-35,
    3.843758125454189e-37,
    -9.736353072646691e-39,
    2.466247044200681e-40,
    -6.247076741820743e-42,
    1.5824030244644914e-43,
    -4.008273685948936e-45,
    1.0153075855569557e-46,
    -2.5718041582418717e-48,
    6.514456035233815e-50,
    -1.6501309906896525e-51,
    4.179830628539476e-53,
    -1.058763466770291e-54,
    2.6818791912607708e-56,
    -6.793279351107421e-58,
    1.7207577616681404e-59,
    -4.358730329348894e-61,
    1.1040792903684666e-62,
    -2.7966655133781345e-64,
];

/// Most correction terms a plan may use.
pub(crate) const MAX_CORRECTIONS: usize = BERNOULLI_RATIO.len() - 1;

/// Largest cutoff the engine will escalate to.
pub(crate) const MAX_CUTOFF: usize = 1 << 26;

/// Value and first two derivatives in `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet(pub [Complex64; 3]);

impl Jet {
    pub const ZERO: Jet = Jet([Complex64::new(0.0, 0.0); 3]);

    #[inline]
    pub fn constant(c: Complex64) -> Jet {
        Jet([c, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)])
    }

    #[inline]
    fn linear(value: Complex64, slope: f64) -> Jet {
        Jet([value, Complex64::new(slope, 0.0), Complex64::new(0.0, 0.0)])
    }

    #[inline]
    pub fn mul(self, o: Jet) -> Jet {
        let [a0, a1, a2] = self.0;
        let [b0, b1, b2] = o.0;
        Jet([
            a0 * b0,
            a1 * b0 + a0 * b1,
            a2 * b0 + 2.0 * a1 * b1 + a0 * b2,
        ])
    }

    #[inline]
    pub fn add(self, o: Jet) -> Jet {
        Jet([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }

    #[inline]
    fn scale(self, c: f64) -> Jet {
        Jet([self.0[0] * c, self.0[1] * c, self.0[2] * c])
    }
}

/// Cutoff `N` and number of correction terms `m` for one evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmPlan {
    pub cutoff: usize,
    pub corrections: usize,
    /// Bound on the Euler–Maclaurin remainder of `ζ` itself.
    pub remainder: f64,
}

/// Initial cutoff: the correction series behaves like a power series in
/// `|s| / (2πN)`, so `N ≈ |t|/π` gives ratio about 1/2.
pub(crate) fn initial_cutoff(t: f64) -> usize {
    let n = (t.abs() / PI).ceil();
    if n < 10.0 {
        10
    } else {
        n as usize
    }
}

/// Choose the smallest plan whose remainder bound is below `tol / 4`,
/// doubling the cutoff when the corrections alone cannot reach it.
pub(crate) fn plan(s: Complex64, tol: f64) -> Result<EmPlan> {
    plan_from(s, tol, initial_cutoff(s.im))
}

pub(crate) fn plan_from(s: Complex64, tol: f64, start: usize) -> Result<EmPlan> {
    let mut n = start.max(10);
    while n <= MAX_CUTOFF {
        if let Some((m, r)) = corrections_for(s, n, tol * 0.25) {
            return Ok(EmPlan {
                cutoff: n,
                corrections: m,
                remainder: r,
            });
        }
        n *= 2;
    }
    Err(Error::Precision { t: s.im, tol })
}

/// Smallest `m` with remainder bound `≤ target` at cutoff `n`.
pub(crate) fn corrections_for(s: Complex64, n: usize, target: f64) -> Option<(usize, f64)> {
    let ln_n = (n as f64).ln();
    // log |s (s+1) … (s+2m)| for the first omitted term P_{m+1}
    let mut log_p = s.norm().ln();
    for m in 1..=MAX_CORRECTIONS {
        log_p += (s + (2 * m - 1) as f64).norm().ln() + (s + (2 * m) as f64).norm().ln();
        let denom = s.re + (2 * m + 1) as f64;
        if denom <= 0.0 {
            continue;
        }
        let factor = (s + (2 * m + 1) as f64).norm() / denom;
        let log_term = BERNOULLI_RATIO[m].abs().ln() + log_p - (s.re + (2 * m + 1) as f64) * ln_n;
        let r = log_term.exp() * factor;
        if r <= target {
            return Some((m, r));
        }
    }
    None
}

/// Boundary part `N^{-s} · (N/(s-1) + 1/2 + Σ c_k Q_k(s))` with
/// `Q_k = s(s+1)…(s+2k-2) / N^{2k-1}`, as a jet.
pub(crate) fn boundary_jet(s: Complex64, n: usize, m: usize) -> Jet {
    let nf = n as f64;
    let ln_n = nf.ln();
    let w0 = Complex64::new(-s.re * ln_n, -s.im * ln_n).exp();
    let w = Jet([w0, w0 * (-ln_n), w0 * (ln_n * ln_n)]);

    let r = (s - 1.0).inv();
    let pole = Jet([r * nf, -(r * r) * nf, 2.0 * r * r * r * nf]);
    let mut a = pole.add(Jet::constant(Complex64::new(0.5, 0.0)));

    let mut q = Jet::linear(s / nf, 1.0 / nf);
    for k in 1..=m {
        a = a.add(q.scale(BERNOULLI_RATIO[k - 1]));
        let j = (2 * k - 1) as f64;
        q = q
            .mul(Jet::linear((s + j) / nf, 1.0 / nf))
            .mul(Jet::linear((s + j + 1.0) / nf, 1.0 / nf));
    }
    w.mul(a)
}

/// Amplitude scales of the direct sum for each derivative order:
/// `rms[j] = sqrt(Σ (n^{-σ} ln^j n)²)` and `abs[j] = Σ n^{-σ} ln^j n`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Scales {
    pub rms: [f64; 3],
    pub abs: [f64; 3],
    /// Root sums of `amp · l^{j+1}`, the scale of phase rounding per order.
    pub phase: [f64; 3],
}

impl Scales {
    #[inline]
    pub fn add(&mut self, amp: f64, l: f64) {
        let a1 = amp * l;
        let a2 = a1 * l;
        self.rms[0] += amp * amp;
        self.rms[1] += a1 * a1;
        self.rms[2] += a2 * a2;
        let a3 = a2 * l;
        self.phase[0] += a1 * a1;
        self.phase[1] += a2 * a2;
        self.phase[2] += a3 * a3;
        self.abs[0] += amp;
        self.abs[1] += a1;
        self.abs[2] += a2;
    }

    /// Turn accumulated squares into root sums.
    pub fn finish(mut self) -> Scales {
        for r in self.rms.iter_mut().chain(&mut self.phase) {
            *r = r.sqrt();
        }
        self
    }
}

/// Partial sums `Σ_{n<N} (-ln n)^j n^{-s}` for `j ≤ order`.
pub(crate) fn direct_sums(s: Complex64, n: usize, order: usize) -> ([Complex64; 3], Scales) {
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    let mut sc = Scales::default();
    for k in 1..n {
        let lk = (k as f64).ln();
        let amp = (-s.re * lk).exp();
        let (sn, cs) = (s.im * lk).sin_cos();
        let z = Complex64::new(amp * cs, -amp * sn);
        acc[0] += z;
        if order >= 1 {
            acc[1] -= z * lk;
        }
        if order >= 2 {
            acc[2] += z * (lk * lk);
        }
        sc.add(amp, lk);
    }
    (acc, sc.finish())
}

/// Rounding estimate per derivative order. Phases `t ln n` carry absolute
/// errors of order `eps · |t| ln n`, which add up like a random walk.
pub(crate) fn rounding_estimate(t: f64, sc: &Scales, boundary: &Jet, drift: f64) -> [f64; 3] {
    let eps = f64::EPSILON;
    let mut out = [0.0; 3];
    for (j, o) in out.iter_mut().enumerate() {
        *o = 2.0 * eps * (t.abs() * sc.phase[j] + (1.0 + drift) * sc.rms[j])
            + eps * sc.abs[j]
            + 4.0 * eps * boundary.0[j].norm();
    }
    out
}

/// Full evaluation returning the jet and per-order error estimates.
pub(crate) fn evaluate(s: Complex64, plan: &EmPlan, order: usize) -> (Jet, [f64; 3]) {
    let (sums, sc) = direct_sums(s, plan.cutoff, order);
    let b = boundary_jet(s, plan.cutoff, plan.corrections);
    let jet = Jet([sums[0] + b.0[0], sums[1] + b.0[1], sums[2] + b.0[2]]);
    let round = rounding_estimate(s.im, &sc, &b, 0.0);
    (jet, error_by_order(plan, round))
}

pub(crate) fn error_by_order(plan: &EmPlan, round: [f64; 3]) -> [f64; 3] {
    let ln_n = (plan.cutoff as f64).ln() + 2.0;
    let r = plan.remainder;
    [
        r + round[0],
        r * ln_n + round[1],
        r * ln_n * ln_n + round[2],
    ]
}
