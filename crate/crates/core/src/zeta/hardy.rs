//! Complex log-gamma, the Riemann–Siegel theta function and Hardy's `Z`.

use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::euler_maclaurin::BERNOULLI_RATIO;
use super::zeta_jet_unchecked;
use crate::error::{domain, Result};

const SHIFT_TO: f64 = 10.0;

/// `ln Γ(z)` on the branch continuous along horizontal rays from the real
/// axis, for `Re z > 0`.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) || !z.im.is_finite() {
        return Err(domain("log-gamma needs Re z > 0"));
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < SHIFT_TO {
        shift += w.ln();
        w += 1.0;
    }
    Ok(stirling(w) - shift)
}

fn stirling(z: Complex64) -> Complex64 {
    let half_ln_2pi = 0.918_938_533_204_672_8;
    let mut acc = (z - 0.5) * z.ln() - z + half_ln_2pi;
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    // B_{2k} / (2k (2k-1)) = (2k-2)! · B_{2k}/(2k)!
    let mut fact = 1.0;
    for k in 1..=10usize {
        if k > 1 {
            fact *= ((2 * k - 3) * (2 * k - 2)) as f64;
        }
        acc += pow * (BERNOULLI_RATIO[k - 1] * fact);
        pow *= inv2;
    }
    acc
}

/// `θ(t) = Im ln Γ(1/4 + it/2) − (t/2) ln π`.
pub fn riemann_siegel_theta(t: f64) -> f64 {
    let lg = ln_gamma(Complex64::new(0.25, 0.5 * t)).expect("Re = 1/4");
    lg.im - 0.5 * t * PI.ln()
}

/// Smooth zero-count approximation `θ(t)/π + 1`.
pub fn riemann_von_mangoldt(t: f64) -> f64 {
    riemann_siegel_theta(t) / PI + 1.0
}

/// `e^{iθ(t)} ζ(1/2 + it)`; real up to rounding.
pub fn hardy_z_rotated(t: f64, tol: f64) -> Result<Complex64> {
    let (j, _) = zeta_jet_unchecked(Complex64::new(0.5, t), tol, 0)?;
    let th = riemann_siegel_theta(t);
    let (s, c) = th.sin_cos();
    Ok(Complex64::new(c, s) * j.0[0])
}

/// Hardy's `Z(t)`.
pub fn hardy_z(t: f64, tol: f64) -> Result<f64> {
    hardy_z_rotated(t, tol).map(|z| z.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_real_values() {
        // Γ(1/2) = √π, Γ(5) = 24
        let g = ln_gamma(Complex64::new(0.5, 0.0)).unwrap();
        assert!((g.re - 0.5 * PI.ln()).abs() < 1e-14);
        let g = ln_gamma(Complex64::new(5.0, 0.0)).unwrap();
        assert!((g.re - 24f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn theta_at_hundred() {
        assert!((riemann_siegel_theta(100.0) - 87.9721652317872196).abs() < 1e-12);
        assert!((riemann_von_mangoldt(100.0) - 29.0024).abs() < 1e-4);
    }

    #[test]
    fn hardy_z_is_real_and_changes_sign_at_first_zero() {
        let z = hardy_z_rotated(20.0, 1e-12).unwrap();
        assert!(z.im.abs() < 1e-12);
        let a = hardy_z(14.13, 1e-12).unwrap();
        let b = hardy_z(14.14, 1e-12).unwrap();
        assert!(a * b < 0.0);
    }
}
