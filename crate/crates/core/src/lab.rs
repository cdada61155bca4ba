//! Samples of `ζ'/ζ(σ+it)·V^{-1/2}` along a line and the statistics
//! compared against the two-dimensional standard Gaussian.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::batch::{chunk_range, chunks_for, run_serial, ChunkedJob};
use crate::error::{domain, Error, Result};
use crate::extremal::{selberg_interval, BandlimitedMajorant, Kind};
use crate::numeric::{e, gauss_legendre, normal_interval, CompensatedSum, ComplexSum, LinearGrid};
use crate::selberg::DirichletSeries;
use crate::torus::{gaussian_chf, torus_moment_exact, TorusModel};
use crate::variance::VarianceContext;
use crate::zeta::{LineEvaluator, CHUNK};

/// Tallest line height the lab will sample.
pub const HEIGHT_CAP: f64 = 1e7;

pub const DEFAULT_T_LO: f64 = 50.0;

/// Samples in a default grid run.
pub const DEFAULT_GRID_SAMPLES: usize = 10_000;

/// Excluded fraction above which a sample set carries a warning.
pub const EXCLUSION_WARNING: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleFlag {
    Ok,
    NearZero,
    PrecisionFail,
}

impl SampleFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            SampleFlag::Ok => "ok",
            SampleFlag::NearZero => "near_zero",
            SampleFlag::PrecisionFail => "precision_fail",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Sampling {
    /// Midpoints of cells of width `dt`.
    Grid { dt: f64 },
    /// `count` uniform heights, sorted.
    Random { seed: u64, count: usize },
}

impl Sampling {
    /// Grid with `count` cells on `[t_lo, t_hi]`.
    pub fn grid_with_count(t_lo: f64, t_hi: f64, count: usize) -> Sampling {
        Sampling::Grid {
            dt: (t_hi - t_lo) / count.max(1) as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSampleSet {
    pub context: VarianceContext,
    pub t_lo: f64,
    pub t_hi: f64,
    pub sampling: Sampling,
    pub t_values: Vec<f64>,
    /// `NaN` where the flag is not `Ok`.
    pub samples: Vec<Complex64>,
    pub flags: Vec<SampleFlag>,
}

/// Counts of each flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FlagCounts {
    pub ok: usize,
    pub near_zero: usize,
    pub precision_fail: usize,
}

impl LineSampleSet {
    pub fn len(&self) -> usize {
        self.t_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_values.is_empty()
    }

    pub fn counts(&self) -> FlagCounts {
        let mut c = FlagCounts::default();
        for f in &self.flags {
            match f {
                SampleFlag::Ok => c.ok += 1,
                SampleFlag::NearZero => c.near_zero += 1,
                SampleFlag::PrecisionFail => c.precision_fail += 1,
            }
        }
        c
    }

    pub fn ok_samples(&self) -> impl Iterator<Item = Complex64> + Clone + '_ {
        self.samples
            .iter()
            .zip(&self.flags)
            .filter(|(_, f)| **f == SampleFlag::Ok)
            .map(|(z, _)| *z)
    }

    pub fn ok_count(&self) -> usize {
        self.counts().ok
    }

    pub fn excluded_fraction(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        1.0 - self.ok_count() as f64 / self.len() as f64
    }

    pub fn warning(&self) -> bool {
        self.excluded_fraction() > EXCLUSION_WARNING
    }

    /// Sample set of independent standard complex Gaussians
    /// `X + iY`, `X, Y ~ N(0,1)`, for checking the statistics.
    pub fn synthetic_gaussian(context: VarianceContext, count: usize, seed: u64) -> LineSampleSet {
        let job = GaussianSampler::new(count, seed);
        job.assemble(context, run_serial(&job))
    }
}

/// Independent standard 2D Gaussian draws, one ChaCha stream per chunk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSampler {
    pub count: usize,
    pub seed: u64,
}

pub const GAUSSIAN_CHUNK: usize = 1024;

impl GaussianSampler {
    pub fn new(count: usize, seed: u64) -> GaussianSampler {
        GaussianSampler { count, seed }
    }

    /// A sample set with every draw flagged ok, at fictitious heights `0..count`.
    pub fn assemble(&self, context: VarianceContext, samples: Vec<Complex64>) -> LineSampleSet {
        let count = samples.len();
        LineSampleSet {
            context,
            t_lo: 0.0,
            t_hi: count as f64,
            sampling: Sampling::Random {
                seed: self.seed,
                count,
            },
            t_values: (0..count).map(|i| i as f64).collect(),
            samples,
            flags: alloc::vec![SampleFlag::Ok; count],
        }
    }
}

impl ChunkedJob for GaussianSampler {
    type Item = Complex64;

    fn chunk_count(&self) -> usize {
        chunks_for(self.count, GAUSSIAN_CHUNK)
    }

    fn run_chunk(&self, index: usize) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        chunk_range(self.count, GAUSSIAN_CHUNK, index)
            .map(|_| {
                let x: f64 = rng.sample(StandardNormal);
                let y: f64 = rng.sample(StandardNormal);
                Complex64::new(x, y)
            })
            .collect()
    }
}

/// One sampled height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinePoint {
    pub t: f64,
    pub value: Complex64,
    pub flag: SampleFlag,
}

/// Sampling job: grid chunks follow the evaluator's rotor chunks; random
/// heights are evaluated one by one in chunks of the same size.
pub struct LineSampler {
    context: VarianceContext,
    t_lo: f64,
    t_hi: f64,
    sampling: Sampling,
    heights: Option<Vec<f64>>,
    grid: LinearGrid,
    evaluator: LineEvaluator,
}

impl LineSampler {
    pub fn new(
        context: &VarianceContext,
        t_lo: f64,
        t_hi: f64,
        sampling: Sampling,
        tol: f64,
    ) -> Result<LineSampler> {
        if !(t_lo >= 0.0) || !(t_hi >= t_lo) {
            return Err(domain("sampling range needs 0 <= t_lo <= t_hi"));
        }
        if t_hi > HEIGHT_CAP {
            return Err(domain("sampling height exceeds the cap of 1e7"));
        }
        let evaluator = LineEvaluator::new(context.sigma, t_hi, tol)?;
        let span = t_hi - t_lo;
        let (grid, heights) = match sampling {
            Sampling::Grid { dt } => {
                if !(dt > 0.0) || !dt.is_finite() {
                    return Err(domain("grid step must be positive"));
                }
                let count = if span == 0.0 {
                    0
                } else {
                    (span / dt).round().max(1.0) as usize
                };
                let grid = LinearGrid {
                    start: t_lo + 0.5 * dt,
                    step: dt,
                    count,
                };
                (grid, None)
            }
            Sampling::Random { seed, count } => {
                let count = if span == 0.0 { 0 } else { count };
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut ts: Vec<f64> = (0..count)
                    .map(|_| t_lo + span * rng.random::<f64>())
                    .collect();
                ts.sort_by(f64::total_cmp);
                let grid = LinearGrid {
                    start: t_lo,
                    step: 0.0,
                    count,
                };
                (grid, Some(ts))
            }
        };
        Ok(LineSampler {
            context: *context,
            t_lo,
            t_hi,
            sampling,
            heights,
            grid,
            evaluator,
        })
    }

    pub fn len(&self) -> usize {
        self.grid.count
    }

    pub fn is_empty(&self) -> bool {
        self.grid.count == 0
    }

    fn point(&self, t: f64, r: Result<crate::zeta::LogDerivative>) -> LinePoint {
        let nan = Complex64::new(f64::NAN, f64::NAN);
        match r {
            Ok(ld) => LinePoint {
                t,
                value: ld.value * self.context.scale(),
                flag: SampleFlag::Ok,
            },
            Err(Error::NearZero { .. }) => LinePoint {
                t,
                value: nan,
                flag: SampleFlag::NearZero,
            },
            Err(_) => LinePoint {
                t,
                value: nan,
                flag: SampleFlag::PrecisionFail,
            },
        }
    }

    /// Collect job output into a sample set.
    pub fn assemble(&self, points: Vec<LinePoint>) -> LineSampleSet {
        LineSampleSet {
            context: self.context,
            t_lo: self.t_lo,
            t_hi: self.t_hi,
            sampling: self.sampling,
            t_values: points.iter().map(|p| p.t).collect(),
            samples: points.iter().map(|p| p.value).collect(),
            flags: points.iter().map(|p| p.flag).collect(),
        }
    }
}

impl ChunkedJob for LineSampler {
    type Item = LinePoint;

    fn chunk_count(&self) -> usize {
        chunks_for(self.grid.count, CHUNK)
    }

    fn run_chunk(&self, index: usize) -> Vec<LinePoint> {
        let range = chunk_range(self.grid.count, CHUNK, index);
        match &self.heights {
            None => {
                let g = self.grid.slice(range);
                self.evaluator
                    .chunk(g.start, g.step, g.count)
                    .into_iter()
                    .map(|s| self.point(s.t, s.result))
                    .collect()
            }
            Some(ts) => ts[range]
                .iter()
                .map(|&t| self.point(t, self.evaluator.point(t)))
                .collect(),
        }
    }
}

pub fn sample_line(
    context: &VarianceContext,
    t_lo: f64,
    t_hi: f64,
    sampling: Sampling,
    tol: f64,
) -> Result<LineSampleSet> {
    let job = LineSampler::new(context, t_lo, t_hi, sampling, tol)?;
    let pts = run_serial(&job);
    Ok(job.assemble(pts))
}

fn require_samples(set: &LineSampleSet) -> Result<usize> {
    match set.ok_count() {
        0 => Err(Error::Empty),
        n => Ok(n),
    }
}

/// Mean of `e(u Re z + v Im z)` over the ok samples.
pub fn empirical_chf(set: &LineSampleSet, u: f64, v: f64) -> Result<Complex64> {
    require_samples(set)?;
    Ok(chf_with_error(set, u, v).0)
}

fn chf_with_error(set: &LineSampleSet, u: f64, v: f64) -> (Complex64, f64) {
    if u == 0.0 && v == 0.0 {
        return (Complex64::new(1.0, 0.0), 0.0);
    }
    crate::torus::mean_with_error(set.ok_samples().map(|z| e(u * z.re + v * z.im)))
}

/// `((|u|+|v|)³/V^{3/2} + (u²+v²)/ψ^{10})·e^{-2π²(u²+v²)} + ψ^{-10}`.
pub fn chf_envelope(context: &VarianceContext, u: f64, v: f64) -> f64 {
    let p10 = context.psi.powi(-10);
    let a = (u.abs() + v.abs()).powi(3) / context.variance.powf(1.5) + (u * u + v * v) * p10;
    a * gaussian_chf(u, v) + p10
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChfPoint {
    pub u: f64,
    pub v: f64,
    pub value: Complex64,
    pub gaussian: f64,
    pub abs_dev: f64,
    pub std_error: f64,
    pub envelope: f64,
    /// `|u|, |v| ≤ Ω`.
    pub within_omega: bool,
}

/// Deviation of the empirical chf from `e^{-2π²(u²+v²)}` on the product grid
/// `us × vs`, row-major in `u`.
pub fn chf_deviation_grid(set: &LineSampleSet, us: &[f64], vs: &[f64]) -> Result<Vec<ChfPoint>> {
    require_samples(set)?;
    let mut out = Vec::with_capacity(us.len() * vs.len());
    for &u in us {
        for &v in vs {
            let (value, se) = chf_with_error(set, u, v);
            let g = gaussian_chf(u, v);
            out.push(ChfPoint {
                u,
                v,
                value,
                gaussian: g,
                abs_dev: (value - g).norm(),
                std_error: se,
                envelope: chf_envelope(&set.context, u, v),
                within_omega: u.abs() <= set.context.omega && v.abs() <= set.context.omega,
            });
        }
    }
    Ok(out)
}

pub fn max_deviation(points: &[ChfPoint]) -> f64 {
    points.iter().fold(0.0, |m, p| m.max(p.abs_dev))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Region {
    Rectangle { a: f64, b: f64, c: f64, d: f64 },
    Disk { r: f64 },
}

impl Region {
    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            Region::Rectangle { a, b, c, d } => z.re >= a && z.re <= b && z.im >= c && z.im <= d,
            Region::Disk { r } => z.norm() <= r,
        }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Region::Rectangle { a, b, c, d } => (b - a) * (d - c),
            Region::Disk { r } => PI * r * r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub region: Region,
    pub empirical_fraction: f64,
    pub gaussian_prediction: f64,
    pub error_scale: f64,
    pub excluded_fraction: f64,
}

impl DistributionReport {
    /// Binomial standard error of the prediction over `n` samples.
    pub fn std_error(&self, n: usize) -> f64 {
        binomial_se(self.gaussian_prediction, n)
    }

    pub fn within_se(&self, n: usize, k: f64) -> bool {
        (self.empirical_fraction - self.gaussian_prediction).abs() <= k * self.std_error(n)
    }
}

pub fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n.max(1) as f64).sqrt()
}

fn fraction_in(set: &LineSampleSet, region: &Region) -> Result<f64> {
    let n = require_samples(set)?;
    let k = set.ok_samples().filter(|z| region.contains(*z)).count();
    Ok(k as f64 / n as f64)
}

pub fn rectangle_report(
    set: &LineSampleSet,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
) -> Result<DistributionReport> {
    if !(a <= b && c <= d) {
        return Err(domain("rectangle needs a <= b and c <= d"));
    }
    let region = Region::Rectangle { a, b, c, d };
    Ok(DistributionReport {
        region,
        empirical_fraction: fraction_in(set, &region)?,
        gaussian_prediction: normal_interval(a, b) * normal_interval(c, d),
        error_scale: (region.area() + 1.0) / set.context.b_omega,
        excluded_fraction: set.excluded_fraction(),
    })
}

pub fn disk_prediction(r: f64) -> f64 {
    -(-0.5 * r * r).exp_m1()
}

pub fn disk_report(set: &LineSampleSet, r: f64) -> Result<DistributionReport> {
    if !(r >= 0.0) {
        return Err(domain("radius must be non-negative"));
    }
    let region = Region::Disk { r };
    Ok(DistributionReport {
        region,
        empirical_fraction: fraction_in(set, &region)?,
        gaussian_prediction: disk_prediction(r),
        error_scale: (r * r + r) / set.context.b_omega,
        excluded_fraction: set.excluded_fraction(),
    })
}

/// `fraction/r²` for radii with `r·Ω̃ ≥ 1`, the small-disk regime.
pub fn small_disk_ratio(set: &LineSampleSet, r: f64) -> Result<Option<f64>> {
    if r * set.context.t_omega < 1.0 || r == 0.0 {
        return Ok(None);
    }
    Ok(Some(fraction_in(set, &Region::Disk { r })? / (r * r)))
}

/// `sup_r |#{|z| ≤ r}/n − (1 − e^{-r²/2})|` over all radii.
pub fn disk_sup_deviation(set: &LineSampleSet) -> Result<f64> {
    let n = require_samples(set)?;
    let mut radii: Vec<f64> = set.ok_samples().map(|z| z.norm()).collect();
    radii.sort_by(f64::total_cmp);
    let mut best = 0.0f64;
    for (i, r) in radii.iter().enumerate() {
        let g = disk_prediction(*r);
        best = best
            .max((g - i as f64 / n as f64).abs())
            .max(((i + 1) as f64 / n as f64 - g).abs());
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondMoment {
    pub mean: f64,
    pub std_error: f64,
    pub target: f64,
}

/// Mean of `|z|²` over the ok samples; a standard complex Gaussian gives 2.
pub fn second_moment_check(set: &LineSampleSet) -> Result<SecondMoment> {
    require_samples(set)?;
    let (m, se) =
        crate::torus::mean_with_error(set.ok_samples().map(|z| Complex64::new(z.norm_sqr(), 0.0)));
    Ok(SecondMoment {
        mean: m.re,
        std_error: se,
        target: 2.0,
    })
}

/// `V^{-1/2} Σ_{p^n ≤ x} log p · p^{-n(σ+it)}` on a grid of heights.
pub fn poly_samples(model: &TorusModel, grid: &LinearGrid) -> Result<Vec<Complex64>> {
    let series = DirichletSeries::plain(model.sigma(), model.x(), f64::INFINITY)?
        .scaled(1.0 / model.variance().sqrt());
    Ok(series.eval_grid(grid))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentComparison {
    pub m: usize,
    pub k: usize,
    pub time_average: Complex64,
    pub torus: Complex64,
    pub discrepancy: f64,
}

/// t-average of `f^m conj(f)^k` against the exact torus moment.
pub fn time_vs_torus_moments(
    poly: &[Complex64],
    model: &TorusModel,
    m: usize,
    k: usize,
) -> Result<MomentComparison> {
    if m > 2 || k > 2 {
        return Err(domain("time/torus comparison covers m, k <= 2"));
    }
    if poly.is_empty() {
        return Err(Error::Empty);
    }
    let mut acc = ComplexSum::new();
    for f in poly {
        acc.add(f.powu(m as u32) * f.conj().powu(k as u32));
    }
    let time_average = acc.value() / poly.len() as f64;
    let torus = torus_moment_exact(model, m, k)?;
    Ok(MomentComparison {
        m,
        k,
        time_average,
        torus,
        discrepancy: (time_average - torus).norm(),
    })
}

/// Majorants and minorants for both sides of a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectangleBand {
    pub f_plus: BandlimitedMajorant,
    pub f_minus: BandlimitedMajorant,
    pub g_plus: BandlimitedMajorant,
    pub g_minus: BandlimitedMajorant,
}

/// Band of width `δ` for `[a,b] × [c,d]`; a degenerate side is widened by
/// `1e-12` so the functions stay defined.
pub fn rectangle_band(
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    delta: f64,
    terms: usize,
) -> Result<RectangleBand> {
    let widen = |lo: f64, hi: f64| if hi > lo { hi } else { lo + 1e-12 };
    let (b, d) = (widen(a, b), widen(c, d));
    Ok(RectangleBand {
        f_plus: selberg_interval(a, b, delta, Kind::Majorant, terms)?,
        f_minus: selberg_interval(a, b, delta, Kind::Minorant, terms)?,
        g_plus: selberg_interval(c, d, delta, Kind::Majorant, terms)?,
        g_minus: selberg_interval(c, d, delta, Kind::Minorant, terms)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub lower: f64,
    pub upper: f64,
    /// Change of the bounds between the last two quadrature sizes.
    pub quad_error: f64,
    pub panels: usize,
}

impl Sandwich {
    pub fn contains(&self, p: f64, slack: f64) -> bool {
        p >= self.lower - slack && p <= self.upper + slack
    }
}

/// Upper `∬ F̂⁺(u)Ĝ⁺(v) φ(u,v)` and lower
/// `∬ (F̂⁻Ĝ⁺ + F̂⁺Ĝ⁻ − F̂⁺Ĝ⁺) φ` over `[−δ, δ]²`, by composite Gauss–Legendre
/// with panels doubling until both bounds move by less than `tol`.
pub fn rect_prob_from_chf<C: Fn(f64, f64) -> Complex64>(
    chf: C,
    band: &RectangleBand,
    tol: f64,
    max_panels: usize,
) -> Result<Sandwich> {
    let delta = band.f_plus.delta;
    if band.g_plus.delta != delta {
        return Err(domain("both directions need the same band limit"));
    }
    let mut panels = 2;
    let mut prev = integrate_band(&chf, band, panels);
    while panels < max_panels {
        panels *= 2;
        let cur = integrate_band(&chf, band, panels);
        let err = (cur.0 - prev.0).abs().max((cur.1 - prev.1).abs());
        if err < tol {
            return Ok(Sandwich {
                lower: cur.0,
                upper: cur.1,
                quad_error: err,
                panels,
            });
        }
        prev = cur;
    }
    Err(Error::Quadrature(alloc::format!(
        "band integral did not settle to {tol:e} within {max_panels} panels per half band"
    )))
}

/// [`rect_prob_from_chf`] for the empirical measure of `samples`.
///
/// The quadrature is the same; the double integral factors per sample into
/// one-dimensional sums, so the cost is linear in the node count.
pub fn rect_prob_from_samples(
    samples: &[Complex64],
    band: &RectangleBand,
    tol: f64,
    max_panels: usize,
) -> Result<Sandwich> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    let delta = band.f_plus.delta;
    if band.g_plus.delta != delta {
        return Err(domain("both directions need the same band limit"));
    }
    let mut panels = 2;
    let mut prev = integrate_band_samples(samples, band, panels);
    while panels < max_panels {
        panels *= 2;
        let cur = integrate_band_samples(samples, band, panels);
        let err = (cur.0 - prev.0).abs().max((cur.1 - prev.1).abs());
        if err < tol {
            return Ok(Sandwich {
                lower: cur.0,
                upper: cur.1,
                quad_error: err,
                panels,
            });
        }
        prev = cur;
    }
    Err(Error::Quadrature(alloc::format!(
        "band integral did not settle to {tol:e} within {max_panels} panels per half band"
    )))
}

fn integrate_band_samples(
    samples: &[Complex64],
    band: &RectangleBand,
    panels: usize,
) -> (f64, f64) {
    let (xs, ws) = band_nodes(band.f_plus.delta, panels);
    let weighted = |f: &BandlimitedMajorant| -> Vec<Complex64> {
        xs.iter()
            .zip(&ws)
            .map(|(&u, &w)| f.transform(u) * w)
            .collect()
    };
    let (fp, fm, gp, gm) = (
        weighted(&band.f_plus),
        weighted(&band.f_minus),
        weighted(&band.g_plus),
        weighted(&band.g_minus),
    );
    let mut lower = CompensatedSum::new();
    let mut upper = CompensatedSum::new();
    for z in samples {
        let (mut ap, mut am, mut bp, mut bm) = (
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        );
        for (i, &u) in xs.iter().enumerate() {
            let ex = e(u * z.re);
            let ey = e(u * z.im);
            ap += fp[i] * ex;
            am += fm[i] * ex;
            bp += gp[i] * ey;
            bm += gm[i] * ey;
        }
        let pp = ap * bp;
        upper.add(pp.re);
        lower.add((am * bp + ap * bm - pp).re);
    }
    let n = samples.len() as f64;
    (lower.value() / n, upper.value() / n)
}

const BAND_ORDER: usize = 8;

fn band_nodes(delta: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(BAND_ORDER);
    let h = delta / panels as f64;
    let mut xs = Vec::with_capacity(2 * panels * BAND_ORDER);
    let mut ws = Vec::with_capacity(2 * panels * BAND_ORDER);
    for p in 0..2 * panels {
        let mid = -delta + (p as f64 + 0.5) * h;
        for (x, w) in gx.iter().zip(&gw) {
            xs.push(mid + 0.5 * h * x);
            ws.push(0.5 * h * w);
        }
    }
    (xs, ws)
}

fn integrate_band<C: Fn(f64, f64) -> Complex64>(
    chf: &C,
    band: &RectangleBand,
    panels: usize,
) -> (f64, f64) {
    let (xs, ws) = band_nodes(band.f_plus.delta, panels);
    let fp: Vec<Complex64> = xs.iter().map(|&u| band.f_plus.transform(u)).collect();
    let fm: Vec<Complex64> = xs.iter().map(|&u| band.f_minus.transform(u)).collect();
    let gp: Vec<Complex64> = xs.iter().map(|&v| band.g_plus.transform(v)).collect();
    let gm: Vec<Complex64> = xs.iter().map(|&v| band.g_minus.transform(v)).collect();
    let mut lower = CompensatedSum::new();
    let mut upper = CompensatedSum::new();
    for (i, &u) in xs.iter().enumerate() {
        for (j, &v) in xs.iter().enumerate() {
            let w = ws[i] * ws[j];
            let phi = chf(u, v) * w;
            let pp = fp[i] * gp[j];
            upper.add((pp * phi).re);
            lower.add(((fm[i] * gp[j] + fp[i] * gm[j] - pp) * phi).re);
        }
    }
    (lower.value(), upper.value())
}
