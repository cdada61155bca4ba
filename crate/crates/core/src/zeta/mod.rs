//! The Riemann zeta function, its derivatives and logarithmic derivative,
//! Hardy's `Z` function and zero ordinates on the critical line.
//!
//! Every evaluation takes an absolute tolerance in `[MIN_TOL, MAX_TOL]` and
//! returns an error estimate next to the value. When the rounding floor of
//! the direct sum exceeds the tolerance the call fails with
//! [`Error::Precision`] instead of returning a value it cannot stand behind.

pub(crate) mod euler_maclaurin;
mod hardy;
mod line;
mod zeros;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use euler_maclaurin::{evaluate, plan};

pub use euler_maclaurin::{EmPlan, Jet};
pub use hardy::{hardy_z, hardy_z_rotated, ln_gamma, riemann_siegel_theta, riemann_von_mangoldt};
pub use line::{LineEvaluator, LineSample, CHUNK};
pub use zeros::{count_zeros_above, find_zero_ordinates, Zero, ZeroList, ZeroSource};

pub const MIN_TOL: f64 = 1e-15;
pub const MAX_TOL: f64 = 1e-6;

/// Default modulus below which `ζ'/ζ` is refused.
pub const NEAR_ZERO_GUARD: f64 = 1e-10;

/// A point `σ + it` to the right of the critical line.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EvaluationPoint {
    pub sigma: f64,
    pub t: f64,
}

impl EvaluationPoint {
    /// Requires `σ ∈ (1/2, 2]` and `t ≥ 0`.
    pub fn new(sigma: f64, t: f64) -> Result<EvaluationPoint> {
        if !(sigma > 0.5 && sigma <= 2.0) {
            return Err(domain("sigma must lie in (1/2, 2]"));
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(domain("t must be finite and non-negative"));
        }
        Ok(EvaluationPoint { sigma, t })
    }

    pub fn s(&self) -> Complex64 {
        Complex64::new(self.sigma, self.t)
    }
}

/// A value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

/// `ζ'/ζ(s)` with its propagated error and the modulus of `ζ(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDerivative {
    pub value: Complex64,
    pub error: f64,
    pub zeta_modulus: f64,
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(domain("tolerance must lie in [1e-15, 1e-6]"));
    }
    Ok(())
}

fn check_point(s: Complex64) -> Result<()> {
    if !s.re.is_finite() || !s.im.is_finite() {
        return Err(domain("evaluation point must be finite"));
    }
    if s.re == 1.0 && s.im == 0.0 {
        return Err(Error::Pole);
    }
    Ok(())
}

/// `ζ(s)` and derivatives up to `order ≤ 2`, each with an error estimate.
pub fn zeta_jet(s: Complex64, tol: f64, order: usize) -> Result<(Jet, [f64; 3])> {
    check_tol(tol)?;
    zeta_jet_unchecked(s, tol, order)
}

pub(crate) fn zeta_jet_unchecked(s: Complex64, tol: f64, order: usize) -> Result<(Jet, [f64; 3])> {
    check_point(s)?;
    if order > 2 {
        return Err(domain("derivative order above 2"));
    }
    let p = plan(s, tol)?;
    let (jet, err) = evaluate(s, &p, order);
    if err[0] > tol {
        return Err(Error::Precision { t: s.im, tol });
    }
    Ok((jet, err))
}

/// The cutoff and correction count `zeta` would use at `s`.
pub fn plan_for(s: Complex64, tol: f64) -> Result<EmPlan> {
    check_tol(tol)?;
    check_point(s)?;
    plan(s, tol)
}

/// `ζ(s)` with an explicit cutoff and correction count, no tolerance check.
pub fn zeta_with_plan(s: Complex64, cutoff: usize, corrections: usize) -> Result<Complex64> {
    check_point(s)?;
    if cutoff < 2 || corrections > euler_maclaurin::MAX_CORRECTIONS {
        return Err(domain("cutoff below 2 or too many corrections"));
    }
    let p = EmPlan {
        cutoff,
        corrections,
        remainder: 0.0,
    };
    Ok(evaluate(s, &p, 0).0 .0[0])
}

pub fn zeta(s: Complex64, tol: f64) -> Result<Estimate> {
    let (j, e) = zeta_jet(s, tol, 0)?;
    Ok(Estimate {
        value: j.0[0],
        error: e[0],
    })
}

pub fn zeta_prime(s: Complex64, tol: f64) -> Result<Estimate> {
    let (j, e) = zeta_jet(s, tol, 1)?;
    Ok(Estimate {
        value: j.0[1],
        error: e[1],
    })
}

/// `ζ'/ζ(s)`, refused when `|ζ(s)| < NEAR_ZERO_GUARD`.
pub fn log_deriv(s: Complex64, tol: f64) -> Result<LogDerivative> {
    log_deriv_guarded(s, tol, NEAR_ZERO_GUARD)
}

pub fn log_deriv_guarded(s: Complex64, tol: f64, guard: f64) -> Result<LogDerivative> {
    let (j, e) = zeta_jet(s, tol, 1)?;
    log_deriv_from_jet(s.im, &j, &e, guard)
}

pub(crate) fn log_deriv_from_jet(
    t: f64,
    j: &Jet,
    e: &[f64; 3],
    guard: f64,
) -> Result<LogDerivative> {
    let z = j.0[0];
    let m = z.norm();
    if !(m >= guard) {
        return Err(Error::NearZero { t, modulus: m });
    }
    let value = j.0[1] / z;
    let error = (e[1] + value.norm() * e[0]) / m;
    Ok(LogDerivative {
        value,
        error,
        zeta_modulus: m,
    })
}

/// `(ζ'/ζ)'(s) = ζ''/ζ − (ζ'/ζ)²` at real `s > 1`, with error estimate.
pub fn log_deriv_slope_real(s: f64, tol: f64) -> Result<(f64, f64)> {
    if !(s > 1.0) {
        return Err(domain("real argument must exceed 1"));
    }
    let (j, e) = zeta_jet_unchecked(Complex64::new(s, 0.0), tol, 2)?;
    let z = j.0[0].re;
    let d1 = j.0[1].re / z;
    let d2 = j.0[2].re / z;
    let g = d2 - d1 * d1;
    let err = (e[2] + 2.0 * d1.abs() * e[1] + (d2.abs() + 2.0 * d1 * d1) * e[0]) / z;
    Ok((g, err))
}
