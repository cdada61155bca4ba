//! Zero ordinates on the critical line and lists of zeros with an explicit
//! coverage height.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::hardy::{hardy_z, riemann_von_mangoldt};
use crate::error::{domain, Error, Result};

/// A nontrivial zero `β + iγ`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Zero {
    pub beta: f64,
    pub gamma: f64,
}

/// Where a [`ZeroList`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ZeroSource {
    /// Located by sign changes of `Z`; only zeros on the critical line.
    Computed,
    /// Read from a table.
    Ingested,
    /// Hand-built for experiments; treated as complete at every height.
    Synthetic,
}

/// Zeros with positive ordinate, sorted by `γ`, known to be complete up to
/// `covers_to`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroList {
    zeros: Vec<Zero>,
    source: ZeroSource,
    covers_to: f64,
}

impl ZeroList {
    pub fn new(
        mut zeros: Vec<Zero>,
        source: ZeroSource,
        covers_to: Option<f64>,
    ) -> Result<ZeroList> {
        for z in &zeros {
            if !(z.beta > 0.0 && z.beta < 1.0) || !(z.gamma > 0.0) || !z.gamma.is_finite() {
                return Err(domain("zero outside the critical strip upper half"));
            }
        }
        zeros.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
        let covers_to = match source {
            ZeroSource::Synthetic => f64::INFINITY,
            _ => covers_to.unwrap_or_else(|| zeros.last().map_or(0.0, |z| z.gamma)),
        };
        Ok(ZeroList {
            zeros,
            source,
            covers_to,
        })
    }

    pub fn on_critical_line(
        gammas: &[f64],
        source: ZeroSource,
        covers_to: Option<f64>,
    ) -> Result<ZeroList> {
        let zs = gammas
            .iter()
            .map(|&g| Zero {
                beta: 0.5,
                gamma: g,
            })
            .collect();
        ZeroList::new(zs, source, covers_to)
    }

    pub fn zeros(&self) -> &[Zero] {
        &self.zeros
    }

    pub fn source(&self) -> ZeroSource {
        self.source
    }

    pub fn covers_to(&self) -> f64 {
        self.covers_to
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    /// Fails with [`Error::Coverage`] unless the list is complete to `height`.
    pub fn require_coverage(&self, height: f64) -> Result<()> {
        if self.covers_to < height {
            return Err(Error::Coverage {
                required: height,
                covered: self.covers_to,
            });
        }
        Ok(())
    }

    /// Zeros `β ± iγ` whose ordinate `±γ` lies within `radius` of `center`,
    /// mirror zeros below the real axis included.
    pub fn near(&self, center: f64, radius: f64) -> impl Iterator<Item = Zero> + '_ {
        let window = |lo: f64, hi: f64| {
            let a = self.zeros.partition_point(|z| z.gamma < lo);
            let b = self.zeros.partition_point(|z| z.gamma <= hi);
            &self.zeros[a..b.max(a)]
        };
        let upper = window(center - radius, center + radius);
        let lower = window(-center - radius, -center + radius);
        upper.iter().copied().chain(lower.iter().map(|z| Zero {
            beta: z.beta,
            gamma: -z.gamma,
        }))
    }
}

/// `#{ρ : β > σ, 0 < γ ≤ T}`, the zero-density count.
pub fn count_zeros_above(list: &ZeroList, sigma: f64, height: f64) -> Result<usize> {
    list.require_coverage(height)?;
    Ok(list
        .zeros
        .iter()
        .take_while(|z| z.gamma <= height)
        .filter(|z| z.beta > sigma)
        .count())
}

const MAX_REFINEMENTS: u32 = 4;
const COUNT_SLACK: f64 = 1.5;

fn mean_spacing(t: f64) -> f64 {
    let t = t.max(4.0 * PI);
    (2.0 * PI / (t / (2.0 * PI)).ln()).min(2.0)
}

fn z_value(t: f64) -> Result<f64> {
    let mut tol = 1e-12;
    loop {
        match hardy_z(t, tol) {
            Err(Error::Precision { .. }) if tol < 1e-7 => tol *= 10.0,
            r => return r,
        }
    }
}

/// Ordinates of zeros of `Z` in `(0, t_max]`, bisected to `tol`.
///
/// The sign-change count is compared with `θ(t_max)/π + 1`; on a mismatch the
/// grid is halved up to four times before [`Error::Refinement`] is returned.
pub fn find_zero_ordinates(t_max: f64, tol: f64) -> Result<ZeroList> {
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(domain("height must be finite and non-negative"));
    }
    if !(tol > 0.0) {
        return Err(domain("bisection tolerance must be positive"));
    }
    let expected = if t_max < 10.0 {
        0.0
    } else {
        riemann_von_mangoldt(t_max)
    };
    for r in 0..=MAX_REFINEMENTS {
        let scale = 0.25 / (1u32 << r) as f64;
        let mut roots = Vec::new();
        let mut a = 1.0f64.min(t_max);
        let mut za = z_value(a)?;
        while a < t_max {
            let b = (a + scale * mean_spacing(a)).min(t_max);
            let zb = z_value(b)?;
            if za == 0.0 {
                roots.push(a);
            } else if za * zb < 0.0 {
                roots.push(bisect(a, b, za, tol)?);
            }
            a = b;
            za = zb;
        }
        if za == 0.0 && t_max > 0.0 {
            roots.push(t_max);
        }
        if (roots.len() as f64 - expected).abs() <= COUNT_SLACK {
            return ZeroList::on_critical_line(&roots, ZeroSource::Computed, Some(t_max));
        }
    }
    Err(Error::Refinement { lo: 0.0, hi: t_max })
}

fn bisect(mut a: f64, mut b: f64, mut za: f64, tol: f64) -> Result<f64> {
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let zm = z_value(m)?;
        if zm == 0.0 {
            return Ok(m);
        }
        if za * zm < 0.0 {
            b = m;
        } else {
            a = m;
            za = zm;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_five_zeros() {
        let oracle = [
            14.134725141734693790,
            21.022039638771554993,
            25.010857580145688763,
            30.424876125859513210,
            32.935061587739189691,
        ];
        let zs = find_zero_ordinates(35.0, 1e-12).unwrap();
        assert_eq!(zs.len(), 5);
        for (z, o) in zs.zeros().iter().zip(oracle) {
            assert!((z.gamma - o).abs() < 1e-10, "{} vs {o}", z.gamma);
        }
    }

    #[test]
    fn count_to_hundred() {
        let zs = find_zero_ordinates(100.0, 1e-10).unwrap();
        assert_eq!(zs.len(), 29);
        assert_eq!(count_zeros_above(&zs, 0.5, 100.0), Ok(0));
        assert!(matches!(
            count_zeros_above(&zs, 0.5, 200.0),
            Err(Error::Coverage { .. })
        ));
    }

    #[test]
    fn synthetic_lists_cover_everything() {
        let l = ZeroList::new(
            alloc::vec![
                Zero {
                    beta: 0.7,
                    gamma: 50.0
                },
                Zero {
                    beta: 0.5,
                    gamma: 20.0
                }
            ],
            ZeroSource::Synthetic,
            Some(10.0),
        )
        .unwrap();
        assert_eq!(l.covers_to(), f64::INFINITY);
        assert_eq!(l.zeros()[0].gamma, 20.0);
        assert_eq!(count_zeros_above(&l, 0.6, 1e9), Ok(1));
        let near: Vec<_> = l.near(-49.0, 2.0).collect();
        assert_eq!(
            near,
            [Zero {
                beta: 0.7,
                gamma: -50.0
            }]
        );
    }

    #[test]
    fn no_zeros_below_ten() {
        assert!(find_zero_ordinates(10.0, 1e-8).unwrap().is_empty());
    }
}
