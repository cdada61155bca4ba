//! Batched `ζ'/ζ` along a vertical line `Re s = σ`.
//!
//! Arithmetic grids are split into fixed chunks of [`CHUNK`] points. Each
//! chunk shares one cutoff and advances the phases `n^{-it}` by a rotor, so
//! the cost per point is one complex multiply-add per term. Chunk boundaries
//! depend only on the grid, never on how many workers evaluate them.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::euler_maclaurin::{
    boundary_jet, corrections_for, error_by_order, plan, rounding_estimate, EmPlan, Jet, Scales,
};
use super::{check_tol, log_deriv_from_jet, LogDerivative, NEAR_ZERO_GUARD};
use crate::error::{domain, Error, Result};

/// Points per rotor chunk.
pub const CHUNK: usize = 64;

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSample {
    pub t: f64,
    pub result: Result<LogDerivative>,
}

#[derive(Debug, Clone)]
pub struct LineEvaluator {
    sigma: f64,
    tol: f64,
    guard: f64,
    logs: Vec<f64>,
    amps: Vec<f64>,
}

impl LineEvaluator {
    /// Tables sized for heights up to `t_max`; taller points still work but
    /// compute their extra terms on the fly.
    pub fn new(sigma: f64, t_max: f64, tol: f64) -> Result<LineEvaluator> {
        check_tol(tol)?;
        if !sigma.is_finite() || !t_max.is_finite() {
            return Err(domain("line parameters must be finite"));
        }
        let n = plan(Complex64::new(sigma, t_max.abs()), tol)
            .map(|p| p.cutoff)
            .unwrap_or(10);
        let mut logs = vec![0.0; n];
        let mut amps = vec![0.0; n];
        for k in 1..n {
            let l = (k as f64).ln();
            logs[k] = l;
            amps[k] = (-sigma * l).exp();
        }
        Ok(LineEvaluator {
            sigma,
            tol,
            guard: NEAR_ZERO_GUARD,
            logs,
            amps,
        })
    }

    pub fn with_guard(mut self, guard: f64) -> LineEvaluator {
        self.guard = guard;
        self
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn guard(&self) -> f64 {
        self.guard
    }

    #[inline]
    fn term(&self, k: usize) -> (f64, f64) {
        if k < self.logs.len() {
            (self.logs[k], self.amps[k])
        } else {
            let l = (k as f64).ln();
            (l, (-self.sigma * l).exp())
        }
    }

    /// `ζ'/ζ(σ + it)` at a single height.
    pub fn point(&self, t: f64) -> Result<LogDerivative> {
        let s = Complex64::new(self.sigma, t);
        if self.sigma == 1.0 && t == 0.0 {
            return Err(Error::Pole);
        }
        let p = plan(s, self.tol)?;
        let mut acc0 = Complex64::new(0.0, 0.0);
        let mut acc1 = Complex64::new(0.0, 0.0);
        let mut sc = Scales::default();
        for k in 1..p.cutoff {
            let (l, a) = self.term(k);
            let (sn, cs) = (t * l).sin_cos();
            let z = Complex64::new(a * cs, -a * sn);
            acc0 += z;
            acc1 -= z * l;
            sc.add(a, l);
        }
        self.finish(s, &p, acc0, acc1, &sc.finish(), 0.0)
    }

    fn finish(
        &self,
        s: Complex64,
        p: &EmPlan,
        acc0: Complex64,
        acc1: Complex64,
        sc: &Scales,
        drift: f64,
    ) -> Result<LogDerivative> {
        let b = boundary_jet(s, p.cutoff, p.corrections);
        let jet = Jet([acc0 + b.0[0], acc1 + b.0[1], Complex64::new(0.0, 0.0)]);
        let round = rounding_estimate(s.im, sc, &b, drift);
        let err = error_by_order(p, round);
        if err[0] > self.tol {
            return Err(Error::Precision {
                t: s.im,
                tol: self.tol,
            });
        }
        log_deriv_from_jet(s.im, &jet, &err, self.guard)
    }

    /// Points `t0 + j·dt` for `j < count`, evaluated chunk by chunk.
    pub fn grid(&self, t0: f64, dt: f64, count: usize) -> Vec<LineSample> {
        let mut out = Vec::with_capacity(count);
        let mut start = 0;
        while start < count {
            let len = CHUNK.min(count - start);
            out.extend(self.chunk(t0 + start as f64 * dt, dt, len));
            start += len;
        }
        out
    }

    /// One rotor chunk of at most [`CHUNK`] points.
    pub fn chunk(&self, t0: f64, dt: f64, count: usize) -> Vec<LineSample> {
        let ts: Vec<f64> = (0..count).map(|j| t0 + j as f64 * dt).collect();
        if count == 0 {
            return Vec::new();
        }
        let t_hi = ts.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        let head = match plan(Complex64::new(self.sigma, t_hi), self.tol) {
            Ok(p) => p,
            Err(e) => {
                return ts
                    .into_iter()
                    .map(|t| LineSample {
                        t,
                        result: Err(e.clone()),
                    })
                    .collect()
            }
        };
        let n = head.cutoff;
        let mut acc0 = vec![Complex64::new(0.0, 0.0); count];
        let mut acc1 = vec![Complex64::new(0.0, 0.0); count];
        let mut sc = Scales::default();
        for k in 1..n {
            let (l, a) = self.term(k);
            let (sn, cs) = (t0 * l).sin_cos();
            let mut z = Complex64::new(a * cs, -a * sn);
            let (rs, rc) = (dt * l).sin_cos();
            let rot = Complex64::new(rc, -rs);
            for j in 0..count {
                acc0[j] += z;
                acc1[j] -= z * l;
                z *= rot;
            }
            sc.add(a, l);
        }
        let sc = sc.finish();
        // each rotor step adds about one rounding unit of phase
        let drift = 2.0 * count as f64;
        ts.into_iter()
            .enumerate()
            .map(|(j, t)| {
                let s = Complex64::new(self.sigma, t);
                let result = if self.sigma == 1.0 && t == 0.0 {
                    Err(Error::Pole)
                } else {
                    match corrections_for(s, n, self.tol * 0.25) {
                        Some((m, r)) => {
                            let p = EmPlan {
                                cutoff: n,
                                corrections: m,
                                remainder: r,
                            };
                            self.finish(s, &p, acc0[j], acc1[j], &sc, drift)
                        }
                        None => Err(Error::Precision { t, tol: self.tol }),
                    }
                };
                LineSample { t, result }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::log_deriv;

    #[test]
    fn grid_matches_pointwise() {
        let ev = LineEvaluator::new(0.8, 2000.0, 1e-10).unwrap();
        let g = ev.grid(1000.0, 7.3, 130);
        assert_eq!(g.len(), 130);
        for s in g.iter().step_by(9) {
            let a = s.result.as_ref().unwrap();
            let b = log_deriv(Complex64::new(0.8, s.t), 1e-10).unwrap();
            assert!((a.value - b.value).norm() < 1e-8, "{}", s.t);
            let c = ev.point(s.t).unwrap();
            assert!((c.value - b.value).norm() < 1e-9);
        }
    }

    #[test]
    fn chunk_reports_near_zero() {
        let ev = LineEvaluator::new(0.5, 20.0, 1e-12).unwrap();
        let g = ev.chunk(14.134725141734693790, 1.0, 2);
        assert!(matches!(g[0].result, Err(Error::NearZero { .. })));
        assert!(g[1].result.is_ok());
    }
}
