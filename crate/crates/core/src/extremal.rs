//! Band-limited majorants and minorants of interval indicators.
//!
//! Built from Beurling's function `B`, an entire function of exponential
//! type `2π` with `B(x) ≥ sgn(x)` and `∫(B − sgn) = 1`. In terms of the
//! trigamma function,
//!
//! ```text
//! B(x)  =  1 + (2 sin²πx / π²)(1/x − ψ'(1+x))            x > 0
//! B(−y) = −1 + (2 sin²πy / π²)(ψ'(1+y) + 1/y² − 1/y)     y > 0
//! ```

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numeric::{e, gauss_legendre, CompensatedSum, ComplexSum};

pub const DEFAULT_SERIES_TERMS: usize = 500;
pub const MIN_SERIES_TERMS: usize = 50;

/// Default half-width of the Fourier window, in units of `1/δ`.
pub const DEFAULT_WINDOW_SCALE: f64 = 1e3;

/// Relative size of the reported tail above which a window is rejected.
pub const WINDOW_TAIL_TOL: f64 = 1e-3;

fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    (PI * r).sin()
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        sin_pi(x) / (PI * x)
    }
}

/// `ψ'(z) = Σ_{n≥0} (z+n)^{-2}` for `z ≥ 1`: `terms` direct terms and an
/// Euler–Maclaurin tail.
pub fn trigamma(z: f64, terms: usize) -> f64 {
    let terms = terms.max(MIN_SERIES_TERMS);
    let w = z + terms as f64;
    let iw = 1.0 / w;
    let iw2 = iw * iw;
    let mut acc = iw + 0.5 * iw2 + iw * iw2 * (1.0 / 6.0 - iw2 * (1.0 / 30.0 - iw2 / 42.0));
    for n in (0..terms).rev() {
        let d = z + n as f64;
        acc += 1.0 / (d * d);
    }
    acc
}

/// Bound on the error of [`trigamma`] from the omitted Euler–Maclaurin terms.
pub fn truncation_tol(terms: usize) -> f64 {
    let w = terms.max(MIN_SERIES_TERMS) as f64;
    w.powi(-9) / 30.0 + 8.0 * f64::EPSILON
}

/// Beurling's function.
pub fn beurling_b(x: f64, terms: usize) -> f64 {
    if x == 0.0 {
        1.0
    } else if x > 0.0 {
        1.0 + 2.0 * sinc(x).powi(2) * (x - x * x * trigamma(1.0 + x, terms))
    } else {
        let y = -x;
        -1.0 + 2.0 * sinc(y).powi(2) * (y * y * trigamma(1.0 + y, terms) + 1.0 - y)
    }
}

/// Fourier transform of `B − sgn`, `∫ (B(x) − sgn x) e(−xt) dx`.
pub fn beurling_excess_transform(t: f64) -> Complex64 {
    let at = t.abs();
    if at >= 1.0 {
        return Complex64::new(0.0, 1.0 / (PI * t));
    }
    // (Ĵ(t) − 1)/(πt) with Ĵ(t) = πt(1−|t|)cot(πt) + |t|
    let odd = if at < 1e-4 {
        let pt = PI * t;
        -(1.0 - at) * (pt / 3.0 + pt * pt * pt / 45.0)
    } else {
        let pt = PI * t;
        let j = pt * (1.0 - at) / pt.tan() + at;
        (j - 1.0) / pt
    };
    Complex64::new(1.0 - at, -odd)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Majorant,
    Minorant,
}

/// Selberg's majorant or minorant of the indicator of `[a, b]`, with
/// Fourier transform supported in `[−δ, δ]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandlimitedMajorant {
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub kind: Kind,
    pub series_terms: usize,
}

pub fn selberg_interval(
    a: f64,
    b: f64,
    delta: f64,
    kind: Kind,
    terms: usize,
) -> Result<BandlimitedMajorant> {
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(domain("interval needs a < b"));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(domain("band limit must be positive"));
    }
    if terms < MIN_SERIES_TERMS {
        return Err(domain("Beurling series needs at least 50 terms"));
    }
    Ok(BandlimitedMajorant {
        a,
        b,
        delta,
        kind,
        series_terms: terms,
    })
}

impl BandlimitedMajorant {
    /// `F = (k/2) Σ_i B(δ σ_i (x − p_i))` with breakpoints `p = (a, b)`.
    fn parts(&self) -> (f64, [(f64, f64); 2]) {
        match self.kind {
            Kind::Majorant => (1.0, [(1.0, self.a), (-1.0, self.b)]),
            Kind::Minorant => (-1.0, [(-1.0, self.a), (1.0, self.b)]),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (k, p) = self.parts();
        let s: f64 = p
            .iter()
            .map(|(sg, q)| beurling_b(self.delta * sg * (x - q), self.series_terms))
            .sum();
        0.5 * k * s
    }

    pub fn indicator(&self, x: f64) -> f64 {
        if x >= self.a && x <= self.b {
            1.0
        } else {
            0.0
        }
    }

    /// Slack allowed in domination checks.
    pub fn tolerance(&self) -> f64 {
        truncation_tol(self.series_terms)
    }

    /// `sinc²(δ(x−a)) + sinc²(δ(x−b))`, the envelope of `F − 1_{[a,b]}`.
    pub fn envelope(&self, x: f64) -> f64 {
        sinc(self.delta * (x - self.a)).powi(2) + sinc(self.delta * (x - self.b)).powi(2)
    }

    /// Closed-form Fourier transform `F̂(ξ) = ∫ F(x) e(−xξ) dx`.
    pub fn transform(&self, xi: f64) -> Complex64 {
        let ind = if xi == 0.0 {
            Complex64::new(self.b - self.a, 0.0)
        } else {
            (e(-xi * self.a) - e(-xi * self.b)) / Complex64::new(0.0, 2.0 * PI * xi)
        };
        let (k, p) = self.parts();
        let mut extra = Complex64::new(0.0, 0.0);
        for (sg, q) in p {
            extra += beurling_excess_transform(sg * xi / self.delta) * e(-xi * q);
        }
        ind + extra * (0.5 * k / self.delta)
    }

    /// `∫_R^∞ (F − 1_{[a,b]})` for `R` well to the right of `b`.
    fn right_tail(&self, r: f64) -> f64 {
        let (k, p) = self.parts();
        let s: f64 = p
            .iter()
            .map(|(sg, q)| excess_tail(*sg > 0.0, self.delta * (r - q)))
            .sum();
        0.5 * k * s / self.delta
    }

    /// `∫_{−∞}^L (F − 1_{[a,b]})` for `L` well to the left of `a`.
    fn left_tail(&self, l: f64) -> f64 {
        let (k, p) = self.parts();
        let s: f64 = p
            .iter()
            .map(|(sg, q)| excess_tail(*sg < 0.0, self.delta * (q - l)))
            .sum();
        0.5 * k * s / self.delta
    }

    /// `∫ (F − 1_{[a,b]})`: Gauss–Legendre on cells of width `1/δ` over the
    /// window `[a − W, b + W]` with asymptotic tails beyond it.
    pub fn excess_integral(&self, window: f64) -> Result<f64> {
        if !(window * self.delta >= 10.0) {
            return Err(Error::Window {
                window,
                tail: 1.0 / (PI * PI * self.delta * self.delta * window),
            });
        }
        let (gx, gw) = gauss_legendre(20);
        let h = 1.0 / self.delta;
        let cells = (window * self.delta).ceil() as usize;
        let lo = self.a - cells as f64 * h;
        let hi = self.b + cells as f64 * h;
        let mut cuts: Vec<f64> = (0..=2 * cells + ((self.b - self.a) / h).ceil() as usize + 1)
            .map(|i| lo + i as f64 * h)
            .filter(|&x| x < hi)
            .collect();
        cuts.push(self.a);
        cuts.push(self.b);
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-14 * h);
        let mut acc = CompensatedSum::new();
        for w in cuts.windows(2) {
            let (l, r) = (w[0], w[1]);
            let mid = 0.5 * (l + r);
            let half = 0.5 * (r - l);
            let inside = if mid > self.a && mid < self.b {
                1.0
            } else {
                0.0
            };
            for (x, wt) in gx.iter().zip(&gw) {
                acc.add(wt * half * (self.eval(mid + half * x) - inside));
            }
        }
        acc.add(self.left_tail(lo));
        acc.add(self.right_tail(hi));
        Ok(acc.value())
    }
}

/// `∫_Y^∞ (B(y) − 1) dy` when `plus`, otherwise `∫_Y^∞ (B(−y) + 1) dy`,
/// from the asymptotic expansion; error `O(Y^{-3})`.
fn excess_tail(plus: bool, y: f64) -> f64 {
    let corr = if plus { -1.0 } else { 1.0 } / (12.0 * y * y);
    (0.5 / y + corr + sin_pi(2.0 * y) / (4.0 * PI * y * y)) / (PI * PI)
}

/// Numerical Fourier transform of `F` on a window, next to the closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandlimitReport {
    pub delta: f64,
    pub window: f64,
    pub step: f64,
    pub margin: f64,
    pub xi: Vec<f64>,
    pub numeric: Vec<Complex64>,
    pub closed_form: Vec<Complex64>,
    /// Numerical `F̂(0)` with the tail correction applied.
    pub f_hat_zero: f64,
    /// Bound on `∫_{|x|>W} |F|`.
    pub tail_bound: f64,
    /// Largest `|F̂(ξ)|` over grid points with `|ξ| ≥ δ(1+margin)`.
    pub max_beyond_band: f64,
    pub max_abs: f64,
    /// `(b − a) + 1/δ`.
    pub scale: f64,
}

impl BandlimitReport {
    pub fn band_limited(&self, tol: f64) -> bool {
        self.max_beyond_band <= tol * self.f_hat_zero.abs()
    }

    /// `|F̂| ≤ C·((b − a) + 1/δ)` on the grid.
    pub fn bounded(&self, c: f64) -> bool {
        self.max_abs <= c * self.scale
    }
}

/// Trapezoid transform of `F` over `[c − W, c + W]`, `c` the midpoint, with
/// step below `1/(4(δ + max|ξ|))`.
pub fn verify_bandlimit(
    f: &BandlimitedMajorant,
    xi_grid: &[f64],
    window: f64,
    margin: f64,
) -> Result<BandlimitReport> {
    let reach = window - 0.5 * (f.b - f.a);
    let scale = (f.b - f.a) + 1.0 / f.delta;
    let tail_bound = if reach * f.delta > 1.0 {
        2.0 / (PI * PI * f.delta * f.delta * reach) * (1.0 + 1.0 / (f.delta * reach))
    } else {
        f64::INFINITY
    };
    if !(tail_bound <= WINDOW_TAIL_TOL * scale) {
        return Err(Error::Window {
            window,
            tail: tail_bound,
        });
    }
    let xi_max = xi_grid.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let c = 0.5 * (f.a + f.b);
    let n = (2.0 * window * 4.0 * (f.delta + xi_max)).ceil() as usize + 1;
    let h = 2.0 * window / n as f64;
    let values: Vec<(f64, f64)> = (0..=n)
        .map(|j| {
            let x = c - window + j as f64 * h;
            let w = if j == 0 || j == n { 0.5 * h } else { h };
            (x, w * f.eval(x))
        })
        .collect();
    let mut numeric = Vec::with_capacity(xi_grid.len());
    for &xi in xi_grid {
        let mut acc = ComplexSum::new();
        for &(x, fx) in &values {
            acc.add(e(-x * xi) * fx);
        }
        numeric.push(acc.value());
    }
    let mut zero = CompensatedSum::new();
    for &(_, fx) in &values {
        zero.add(fx);
    }
    zero.add(f.left_tail(c - window));
    zero.add(f.right_tail(c + window));
    let f_hat_zero = zero.value();
    let closed_form: Vec<Complex64> = xi_grid.iter().map(|&xi| f.transform(xi)).collect();
    let cut = f.delta * (1.0 + margin);
    let mut max_beyond = 0.0f64;
    let mut max_abs = 0.0f64;
    for (xi, z) in xi_grid.iter().zip(&numeric) {
        max_abs = max_abs.max(z.norm());
        if xi.abs() >= cut {
            max_beyond = max_beyond.max(z.norm());
        }
    }
    Ok(BandlimitReport {
        delta: f.delta,
        window,
        step: h,
        margin,
        xi: xi_grid.to_vec(),
        numeric,
        closed_form,
        f_hat_zero,
        tail_bound,
        max_beyond_band: max_beyond,
        max_abs,
        scale,
    })
}

/// Pointwise domination on a grid of `points` values spanning
/// `[a − 5/δ, b + 5/δ]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub points: usize,
    /// Smallest `F − 1` (majorant) or `1 − F` (minorant) over the grid.
    pub min_slack: f64,
    /// Largest `(F − 1)/envelope` over the grid where the envelope exceeds `1e-12`.
    pub max_envelope_ratio: f64,
}

pub fn check_domination(f: &BandlimitedMajorant, points: usize) -> DominationReport {
    let lo = f.a - 5.0 / f.delta;
    let hi = f.b + 5.0 / f.delta;
    let mut min_slack = f64::INFINITY;
    let mut ratio = 0.0f64;
    for i in 0..points {
        let x = lo + (hi - lo) * i as f64 / (points.max(2) - 1) as f64;
        let d = f.eval(x) - f.indicator(x);
        let slack = match f.kind {
            Kind::Majorant => d,
            Kind::Minorant => -d,
        };
        min_slack = min_slack.min(slack);
        let env = f.envelope(x);
        if env > 1e-12 {
            ratio = ratio.max(slack / env);
        }
    }
    DominationReport {
        points,
        min_slack,
        max_envelope_ratio: ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classical_b(x: f64, terms: usize) -> f64 {
        // (sin πx/π)² (Σ_{n≥0} (x−n)^{-2} − Σ_{n≥1} (x+n)^{-2} + 2/x)
        let mut s = 2.0 / x;
        for n in 0..terms {
            s += 1.0 / (x - n as f64).powi(2);
        }
        for n in 1..=terms {
            s -= 1.0 / (x + n as f64).powi(2);
        }
        let tail = 1.0 / (x - terms as f64 + 0.5).abs() - 1.0 / (x + terms as f64 + 0.5);
        (sin_pi(x) / PI).powi(2) * (s + tail)
    }

    #[test]
    fn trigamma_values() {
        assert!((trigamma(1.0, 50) - PI * PI / 6.0).abs() < 1e-15);
        assert!((trigamma(2.0, 500) - (PI * PI / 6.0 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn matches_classical_series() {
        for &x in &[-3.7, -0.4, 0.3, 1.25, 7.5] {
            let a = beurling_b(x, 500);
            let b = classical_b(x, 200_000);
            assert!((a - b).abs() < 1e-9, "{x}: {a} vs {b}");
        }
    }

    #[test]
    fn majorizes_sign() {
        for i in -2000..=2000 {
            let x = i as f64 * 0.00731;
            let s = if x > 0.0 {
                1.0
            } else if x < 0.0 {
                -1.0
            } else {
                0.0
            };
            assert!(beurling_b(x, 500) - s >= -truncation_tol(500));
        }
        assert!((beurling_b(1e3 + 0.5, 500) - 1.0).abs() <= 1e-5);
        assert_eq!(beurling_b(0.0, 500), 1.0);
        assert!((beurling_b(1e-9, 500) - 1.0).abs() < 1e-8);
        assert!((beurling_b(-1e-9, 500) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn excess_transform_is_continuous() {
        let z0 = beurling_excess_transform(0.0);
        assert_eq!(z0, Complex64::new(1.0, 0.0));
        let a = beurling_excess_transform(1.0 - 1e-9);
        let b = beurling_excess_transform(1.0);
        assert!((a - b).norm() < 1e-7);
        let c = beurling_excess_transform(1e-4 * 0.9999999);
        let d = beurling_excess_transform(1e-4);
        assert!((c - d).norm() < 1e-10);
    }

    #[test]
    fn interval_excess_and_midpoint() {
        let f = selberg_interval(-1.0, 1.0, 4.0, Kind::Majorant, 500).unwrap();
        let ex = f.excess_integral(1e3 / 4.0).unwrap();
        assert!((ex - 0.25).abs() < 1e-6, "{ex}");
        let g = selberg_interval(-1.0, 1.0, 4.0, Kind::Minorant, 500).unwrap();
        let ex = g.excess_integral(1e3 / 4.0).unwrap();
        assert!((ex + 0.25).abs() < 1e-6, "{ex}");
        let wide = selberg_interval(0.0, 100.0, 10.0, Kind::Majorant, 500).unwrap();
        let m = wide.eval(50.0);
        assert!((1.0..=1.0 + 1e-3).contains(&m));
        assert!(selberg_interval(1.0, 1.0, 1.0, Kind::Majorant, 500).is_err());
        assert!(selberg_interval(0.0, 1.0, 1.0, Kind::Majorant, 10).is_err());
    }

    #[test]
    fn closed_form_vanishes_outside_band() {
        let f = selberg_interval(-0.3, 1.7, 2.0, Kind::Majorant, 500).unwrap();
        for &xi in &[2.0, 2.5, -3.0, 10.0] {
            assert!(f.transform(xi).norm() < 1e-15);
        }
        assert!((f.transform(0.0).re - 2.5).abs() < 1e-15);
        let z = f.transform(0.7);
        assert!((f.transform(-0.7) - z.conj()).norm() < 1e-15);
    }

    #[test]
    fn windowed_transform_agrees_with_closed_form() {
        let f = selberg_interval(-1.0, 0.5, 3.0, Kind::Minorant, 500).unwrap();
        let xi: Vec<f64> = (-8..=8).map(|k| k as f64 * 0.5).collect();
        let rep = verify_bandlimit(&f, &xi, 1e3 / 3.0, 0.05).unwrap();
        for (n, c) in rep.numeric.iter().zip(&rep.closed_form) {
            assert!((n - c).norm() < 1e-4, "{n} vs {c}");
        }
        assert!((rep.f_hat_zero - (1.5 - 1.0 / 3.0)).abs() < 1e-5);
        assert!(matches!(
            verify_bandlimit(&f, &xi, 2.0, 0.05),
            Err(Error::Window { .. })
        ));
    }
}
