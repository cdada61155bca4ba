//! The weighted prime-power approximation to `−ζ'/ζ(σ+it)`, the local
//! threshold `σ_{x,t}` and residual scans along vertical lines.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::arith::{prime_powers_up_to_capped, PrimePowerTable};
use crate::batch::{chunk_range, chunks_for, run_serial, ChunkedJob};
use crate::error::{domain, Error, Result};
use crate::numeric::{ComplexSum, LinearGrid};
use crate::zeta::{EvaluationPoint, LineEvaluator, ZeroList, ZeroSource};

/// Largest number of terms a polynomial is built with unless asked
/// otherwise. Longer polynomials are truncated when `σ > 1` (with a tail
/// bound) and refused otherwise.
pub const DEFAULT_TERM_CAP: f64 = 1e6;

/// Points per chunk in scans and grid evaluation.
pub const SCAN_CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelbergWeightSpec {
    pub x: f64,
    /// Divide the third branch by `2 log²x`, which makes the weight
    /// continuous at `x²` and keeps it in `[0, 1]`.
    pub normalized_branch3: bool,
}

impl SelbergWeightSpec {
    pub fn new(x: f64) -> Result<SelbergWeightSpec> {
        Self::with_branch(x, true)
    }

    /// The weight with an unnormalized third branch `log²(x³/n)`.
    pub fn literal(x: f64) -> Result<SelbergWeightSpec> {
        Self::with_branch(x, false)
    }

    fn with_branch(x: f64, normalized_branch3: bool) -> Result<SelbergWeightSpec> {
        if !(x >= 10.0) || !x.is_finite() {
            return Err(domain("weight needs finite x >= 10"));
        }
        Ok(SelbergWeightSpec {
            x,
            normalized_branch3,
        })
    }

    pub fn support(&self) -> f64 {
        self.x * self.x * self.x
    }
}

/// `w_x(u)` for real `u ≥ 1`.
pub fn weight(u: f64, spec: &SelbergWeightSpec) -> f64 {
    let x = spec.x;
    if u <= x {
        return 1.0;
    }
    let l = x.ln();
    let a = (spec.support() / u).ln();
    if u <= x * x {
        let b = (x * x / u).ln();
        (a * a - 2.0 * b * b) / (2.0 * l * l)
    } else if u <= spec.support() {
        if spec.normalized_branch3 {
            a * a / (2.0 * l * l)
        } else {
            a * a
        }
    } else {
        0.0
    }
}

pub fn weight_w(n: u64, spec: &SelbergWeightSpec) -> f64 {
    weight(n as f64, spec)
}

/// `σ_{x,t} = 1/2 + 2 max(β − 1/2, 2/log x)` over zeros with
/// `|t − γ| ≤ x^{3|β−1/2|} / log x`, mirror zeros at `−γ` included.
///
/// Unless the list is synthetic it must be complete up to
/// `|t| + x^{3/2}/log x`, the widest window any zero can have.
pub fn sigma_xt(x: f64, t: f64, zeros: &ZeroList) -> Result<f64> {
    if !(x >= 2.0) || !x.is_finite() || !t.is_finite() {
        return Err(domain("sigma_xt needs x >= 2 and finite t"));
    }
    let lx = x.ln();
    let reach = x.powf(1.5) / lx;
    if zeros.source() != ZeroSource::Synthetic {
        zeros.require_coverage(t.abs() + reach)?;
    }
    let mut best = 2.0 / lx;
    for z in zeros.near(t, reach) {
        let d = z.beta - 0.5;
        if (t - z.gamma).abs() <= x.powf(3.0 * d.abs()) / lx && d > best {
            best = d;
        }
    }
    Ok(0.5 + 2.0 * best)
}

/// `Σ a_n n^{-it}` with real coefficients `a_n`, stored as `(log n, a_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletSeries {
    sigma: f64,
    logs: Vec<f64>,
    coefs: Vec<f64>,
    tail_bound: f64,
}

/// `∫_m^∞ log u · u^{-σ} du` for `σ > 1`.
pub fn log_tail(m: f64, sigma: f64) -> f64 {
    let d = sigma - 1.0;
    m.powf(-d) * (m.ln() / d + 1.0 / (d * d))
}

impl DirichletSeries {
    /// `Σ_{n ≤ x³} Λ(n) w_x(n) n^{-σ-it}`, truncated at `term_cap` when
    /// `x³` exceeds it and `σ > 1`.
    pub fn weighted(
        sigma: f64,
        spec: &SelbergWeightSpec,
        term_cap: f64,
    ) -> Result<DirichletSeries> {
        let support = spec.support();
        let (table, tail) = table_for(sigma, support, term_cap)?;
        Ok(Self::from_table(sigma, &table, |u| weight(u, spec), tail))
    }

    /// `Σ_{n ≤ x} Λ(n) n^{-σ-it}`; empty for `x < 2`.
    pub fn plain(sigma: f64, x: f64, term_cap: f64) -> Result<DirichletSeries> {
        if x < 2.0 {
            return Ok(DirichletSeries {
                sigma,
                logs: Vec::new(),
                coefs: Vec::new(),
                tail_bound: 0.0,
            });
        }
        let (table, tail) = table_for(sigma, x, term_cap)?;
        Ok(Self::from_table(sigma, &table, |_| 1.0, tail))
    }

    pub fn from_table(
        sigma: f64,
        table: &PrimePowerTable,
        weight: impl Fn(f64) -> f64,
        tail_bound: f64,
    ) -> DirichletSeries {
        let mut logs = Vec::with_capacity(table.len());
        let mut coefs = Vec::with_capacity(table.len());
        for e in table.iter() {
            let u = e.value as f64;
            let w = weight(u);
            if w == 0.0 {
                continue;
            }
            let l = u.ln();
            logs.push(l);
            coefs.push(e.log_p * w * (-sigma * l).exp());
        }
        DirichletSeries {
            sigma,
            logs,
            coefs,
            tail_bound,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn len(&self) -> usize {
        self.coefs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefs.is_empty()
    }

    /// Bound on the absolute value of the terms dropped by truncation.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Multiply every coefficient by `c`.
    pub fn scaled(mut self, c: f64) -> DirichletSeries {
        for a in &mut self.coefs {
            *a *= c;
        }
        self.tail_bound *= c.abs();
        self
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let mut acc = ComplexSum::new();
        for (l, a) in self.logs.iter().zip(&self.coefs) {
            let (s, c) = (t * l).sin_cos();
            acc.add(Complex64::new(a * c, -a * s));
        }
        acc.value()
    }

    /// Values on `grid`, in chunks of [`SCAN_CHUNK`] points whose phases
    /// advance by rotors.
    pub fn eval_grid(&self, grid: &LinearGrid) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(grid.count);
        for c in 0..chunks_for(grid.count, SCAN_CHUNK) {
            out.extend(self.eval_chunk(&grid.slice(chunk_range(grid.count, SCAN_CHUNK, c))));
        }
        out
    }

    fn eval_chunk(&self, g: &LinearGrid) -> Vec<Complex64> {
        let mut acc = vec![ComplexSum::new(); g.count];
        for (l, a) in self.logs.iter().zip(&self.coefs) {
            let (s, c) = (g.start * l).sin_cos();
            let mut z = Complex64::new(a * c, -a * s);
            let (rs, rc) = (g.step * l).sin_cos();
            let rot = Complex64::new(rc, -rs);
            for slot in acc.iter_mut() {
                slot.add(z);
                z *= rot;
            }
        }
        acc.iter().map(|a| a.value()).collect()
    }
}

fn table_for(sigma: f64, bound: f64, term_cap: f64) -> Result<(PrimePowerTable, f64)> {
    if bound <= term_cap {
        return Ok((prime_powers_up_to_capped(bound, term_cap)?, 0.0));
    }
    if sigma > 1.0 && sigma * term_cap.ln() > 1.0 {
        let table = prime_powers_up_to_capped(term_cap, term_cap)?;
        return Ok((table, log_tail(term_cap, sigma)));
    }
    Err(Error::TableCap {
        requested: bound,
        cap: term_cap,
    })
}

/// `Σ_{n ≤ x³} Λ(n) w_x(n) n^{-s}` at one point.
pub fn dirichlet_poly_weighted(
    point: EvaluationPoint,
    spec: &SelbergWeightSpec,
) -> Result<Complex64> {
    let series = DirichletSeries::weighted(point.sigma, spec, DEFAULT_TERM_CAP)?;
    Ok(series.eval(point.t))
}

/// `Σ_{n ≤ x} Λ(n) n^{-s}` at one point.
pub fn dirichlet_poly_plain(point: EvaluationPoint, x: f64) -> Result<Complex64> {
    let series = DirichletSeries::plain(point.sigma, x, DEFAULT_TERM_CAP)?;
    Ok(series.eval(point.t))
}

/// Upper bound for `Σ_{n > x} Λ(n) n^{-σ}`, `σ > 1`: the exact sum up to
/// `m` plus an integral bound beyond.
pub fn dirichlet_tail_bound(x: f64, sigma: f64, m: f64) -> Result<f64> {
    if !(sigma > 1.0) {
        return Err(Error::Divergence(sigma));
    }
    let m = m.max(x).max((1.0 / sigma).exp() + 1.0);
    let table = prime_powers_up_to_capped(m, m)?;
    let mut acc = crate::numeric::CompensatedSum::new();
    for e in table.iter().filter(|e| e.value as f64 > x) {
        acc.add(e.log_p * (e.value as f64).powf(-sigma));
    }
    Ok(acc.value() + log_tail(m.floor(), sigma))
}

/// One row of a residual scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplicitFormulaResidual {
    pub t: f64,
    /// `−ζ'/ζ(σ+it)`.
    pub lhs: Complex64,
    pub poly: Complex64,
    pub residual: Complex64,
    pub bound: f64,
    /// Set when `σ < σ_{x,t}` or `ζ` is too close to zero; values are NaN.
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub tol: f64,
    pub term_cap: f64,
    pub normalized_branch3: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            tol: 1e-10,
            term_cap: DEFAULT_TERM_CAP,
            normalized_branch3: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub sigma: f64,
    pub x: f64,
    pub rows: Vec<ExplicitFormulaResidual>,
    pub flagged_fraction: f64,
    pub max_residual: f64,
    /// `(q, value)` pairs of the empirical quantiles of `|residual| / bound`.
    pub ratio_quantiles: Vec<(f64, f64)>,
}

/// Quantile levels reported by a scan.
pub const SCAN_QUANTILES: [f64; 4] = [0.5, 0.9, 0.99, 1.0];

/// A residual scan split into chunks of the t-grid.
pub struct ScanJob<'a> {
    sigma: f64,
    x: f64,
    grid: LinearGrid,
    zeros: &'a ZeroList,
    evaluator: LineEvaluator,
    series: DirichletSeries,
    /// Series at each distinct `σ_{x,t}` met on the grid, keyed by bits.
    threshold_series: Vec<(u64, DirichletSeries)>,
    thresholds: Vec<Option<f64>>,
}

impl<'a> ScanJob<'a> {
    pub fn new(
        sigma: f64,
        x: f64,
        grid: LinearGrid,
        zeros: &'a ZeroList,
        opts: &ScanOptions,
    ) -> Result<ScanJob<'a>> {
        let spec = SelbergWeightSpec::with_branch(x, opts.normalized_branch3)?;
        if !(sigma > 0.5) || !sigma.is_finite() {
            return Err(domain("scan needs sigma > 1/2"));
        }
        for i in 0..grid.count {
            if !(grid.at(i) > 0.0) {
                return Err(domain("scan heights must be positive"));
            }
        }
        let t_max = grid.at(0).max(grid.at(grid.count.saturating_sub(1)));
        let evaluator = LineEvaluator::new(sigma, t_max, opts.tol)?;
        let series = DirichletSeries::weighted(sigma, &spec, opts.term_cap)?;
        // σ_{x,t} never exceeds 3/2, so no point can be gated out
        let ungated = sigma >= 1.5_f64.max(0.5 + 4.0 / x.ln());
        let mut thresholds = Vec::with_capacity(grid.count);
        let mut threshold_series: Vec<(u64, DirichletSeries)> = Vec::new();
        for i in 0..grid.count {
            let sxt = match sigma_xt(x, grid.at(i), zeros) {
                Ok(v) => v,
                Err(Error::Coverage { .. }) if ungated => 0.5 + 4.0 / x.ln(),
                Err(e) => return Err(e),
            };
            if sigma < sxt {
                thresholds.push(None);
                continue;
            }
            thresholds.push(Some(sxt));
            if !threshold_series.iter().any(|(b, _)| *b == sxt.to_bits()) {
                let s =
                    DirichletSeries::weighted(sxt, &spec, opts.term_cap).or_else(|e| match e {
                        // σ_{x,t} ≤ 1 with a long polynomial: bound with the
                        // truncated series at a line just right of 1
                        Error::TableCap { .. } => {
                            DirichletSeries::weighted(1.0 + 1.0 / x.ln(), &spec, opts.term_cap)
                        }
                        e => Err(e),
                    })?;
                threshold_series.push((sxt.to_bits(), s));
            }
        }
        Ok(ScanJob {
            sigma,
            x,
            grid,
            zeros,
            evaluator,
            series,
            threshold_series,
            thresholds,
        })
    }

    pub fn zeros(&self) -> &ZeroList {
        self.zeros
    }

    /// Assemble rows into a report.
    pub fn report(&self, rows: Vec<ExplicitFormulaResidual>) -> ScanReport {
        summarize(self.sigma, self.x, rows)
    }
}

impl ChunkedJob for ScanJob<'_> {
    type Item = ExplicitFormulaResidual;

    fn chunk_count(&self) -> usize {
        chunks_for(self.grid.count, SCAN_CHUNK)
    }

    fn run_chunk(&self, index: usize) -> Vec<ExplicitFormulaResidual> {
        let range = chunk_range(self.grid.count, SCAN_CHUNK, index);
        let g = self.grid.slice(range.clone());
        let lhs = self.evaluator.chunk(g.start, g.step, g.count);
        let poly = self.series.eval_chunk(&g);
        let damp = self.x.powf((0.5 - self.sigma) / 2.0);
        let nan = Complex64::new(f64::NAN, f64::NAN);
        range
            .enumerate()
            .map(|(j, i)| {
                let t = g.at(j);
                let value = match (&self.thresholds[i], &lhs[j].result) {
                    (Some(sxt), Ok(ld)) => Some((*sxt, -ld.value)),
                    _ => None,
                };
                match value {
                    Some((sxt, lhs_v)) => {
                        let s = &self
                            .threshold_series
                            .iter()
                            .find(|(b, _)| *b == sxt.to_bits())
                            .expect("series built for every threshold")
                            .1;
                        let at_threshold = s.eval(t).norm() + s.tail_bound();
                        let bound = damp * (at_threshold + t.ln().max(1.0));
                        ExplicitFormulaResidual {
                            t,
                            lhs: lhs_v,
                            poly: poly[j],
                            residual: lhs_v - poly[j],
                            bound,
                            flagged: false,
                        }
                    }
                    None => ExplicitFormulaResidual {
                        t,
                        lhs: nan,
                        poly: nan,
                        residual: nan,
                        bound: f64::NAN,
                        flagged: true,
                    },
                }
            })
            .collect()
    }
}

fn summarize(sigma: f64, x: f64, rows: Vec<ExplicitFormulaResidual>) -> ScanReport {
    let n = rows.len();
    let flagged = rows.iter().filter(|r| r.flagged).count();
    let mut ratios: Vec<f64> = rows
        .iter()
        .filter(|r| !r.flagged)
        .map(|r| r.residual.norm() / r.bound)
        .collect();
    ratios.sort_by(f64::total_cmp);
    let max_residual = rows
        .iter()
        .filter(|r| !r.flagged)
        .fold(0.0f64, |m, r| m.max(r.residual.norm()));
    let ratio_quantiles = SCAN_QUANTILES
        .iter()
        .map(|&q| (q, quantile_sorted(&ratios, q)))
        .collect();
    ScanReport {
        sigma,
        x,
        rows,
        flagged_fraction: if n == 0 {
            0.0
        } else {
            flagged as f64 / n as f64
        },
        max_residual,
        ratio_quantiles,
    }
}

/// Nearest-rank quantile of sorted data; NaN when empty.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let k = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[k - 1]
}

/// Residuals of `−ζ'/ζ − Σ Λ w n^{-s}` on `grid`, gated by `σ_{x,t}`.
pub fn explicit_formula_scan(
    sigma: f64,
    x: f64,
    grid: &LinearGrid,
    zeros: &ZeroList,
    opts: &ScanOptions,
) -> Result<ScanReport> {
    let job = ScanJob::new(sigma, x, *grid, zeros, opts)?;
    let rows = run_serial(&job);
    Ok(job.report(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeta::Zero;

    #[test]
    fn weight_breakpoints() {
        let spec = SelbergWeightSpec::new(100.0).unwrap();
        assert_eq!(weight_w(50, &spec), 1.0);
        assert_eq!(weight_w(100, &spec), 1.0);
        assert!((weight_w(10_000, &spec) - 0.5).abs() < 1e-15);
        assert_eq!(weight_w(1_000_000, &spec), 0.0);
        assert_eq!(weight_w(1_000_001, &spec), 0.0);
        let lit = SelbergWeightSpec::literal(100.0).unwrap();
        let l = 100f64.ln();
        assert!((weight_w(10_001, &lit) - (3.0 * l - 10_001f64.ln()).powi(2)).abs() < 1e-12);
        assert!(SelbergWeightSpec::new(9.0).is_err());
    }

    #[test]
    fn sigma_xt_cases() {
        let rh = ZeroList::new(Vec::new(), ZeroSource::Synthetic, None).unwrap();
        let x = 1e3;
        assert!((sigma_xt(x, 500.0, &rh).unwrap() - (0.5 + 4.0 / x.ln())).abs() < 1e-15);
        let off = ZeroList::new(
            vec![Zero {
                beta: 0.7,
                gamma: 500.0,
            }],
            ZeroSource::Synthetic,
            None,
        )
        .unwrap();
        let big = 100f64.exp();
        assert!((sigma_xt(big, 500.0, &off).unwrap() - 0.9).abs() < 1e-12);
        let computed =
            ZeroList::on_critical_line(&[14.13], ZeroSource::Computed, Some(20.0)).unwrap();
        assert!(matches!(
            sigma_xt(x, 10.0, &computed),
            Err(Error::Coverage { .. })
        ));
    }

    #[test]
    fn plain_polynomial_edge_cases() {
        let p = EvaluationPoint::new(2.0, 0.0).unwrap();
        assert_eq!(
            dirichlet_poly_plain(p, 1.5).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        let v = dirichlet_poly_weighted(
            EvaluationPoint::new(2.0, 0.0).unwrap(),
            &SelbergWeightSpec::new(10.0).unwrap(),
        )
        .unwrap();
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn rotor_grid_matches_direct() {
        let s =
            DirichletSeries::weighted(0.8, &SelbergWeightSpec::new(20.0).unwrap(), 1e6).unwrap();
        let g = LinearGrid::linspace(100.0, 900.0, 150);
        let v = s.eval_grid(&g);
        for (i, z) in v.iter().enumerate() {
            assert!((z - s.eval(g.at(i))).norm() < 1e-10);
        }
    }

    #[test]
    fn truncation_only_right_of_one() {
        let spec = SelbergWeightSpec::new(1e3).unwrap();
        let s = DirichletSeries::weighted(2.0, &spec, 1e5).unwrap();
        assert!(s.tail_bound() > 0.0 && s.tail_bound() < 1e-3);
        assert!(matches!(
            DirichletSeries::weighted(0.9, &spec, 1e5),
            Err(Error::TableCap { .. })
        ));
    }
}
