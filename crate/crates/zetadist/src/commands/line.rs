use serde::Serialize;
use serde_json::json;
use zetadist_core::lab::{
    chf_deviation_grid, disk_report, disk_sup_deviation, rect_prob_from_samples, rectangle_band,
    rectangle_report, second_moment_check, small_disk_ratio, LineSampleSet, LineSampler, Sampling,
    DEFAULT_GRID_SAMPLES, DEFAULT_T_LO, HEIGHT_CAP,
};
use zetadist_core::numeric::LinearGrid;
use zetadist_core::variance::VarianceContext;
use zetadist_core::Complex64;

use super::{context, invalid, positive, regime, CliError, Outcome, Regime, Settings};
use crate::config::{ChfArgs, DistArgs, LineArgs, Rect, RegimeArgs};
use crate::io::{chf_csv, report_json, samples_csv};
use crate::parallel::{par_map, run_job};

pub const SANDWICH_TOL: f64 = 1e-6;
pub const SANDWICH_PANELS: usize = 256;

pub fn variance(a: &RegimeArgs, _s: &Settings) -> Result<Outcome, CliError> {
    let r = regime(a)?;
    let ctx = context(&r)?;
    let body = json!({ "context": ctx });
    Ok(Outcome {
        files: vec![("variance.json".into(), report_json("variance", &r, body)?)],
        invariants_ok: true,
        summary: format!(
            "sigma={} T={} V={} psi={} Omega={} bOmega={} tOmega={}",
            ctx.sigma, ctx.height, ctx.variance, ctx.psi, ctx.omega, ctx.b_omega, ctx.t_omega
        ),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
struct Line {
    t_lo: f64,
    t_hi: f64,
    samples: usize,
    sampling: Sampling,
}

fn line(a: &LineArgs, r: &Regime, s: &Settings) -> Result<Line, CliError> {
    let t_lo = a.t_lo.unwrap_or(DEFAULT_T_LO);
    let t_hi = a.t_hi.unwrap_or(r.height);
    if !(t_lo >= 0.0 && t_hi > t_lo) {
        return Err(invalid("sampling range needs 0 <= t_lo < t_hi").into());
    }
    if t_hi > HEIGHT_CAP {
        return Err(invalid("t_hi exceeds the height cap of 1e7").into());
    }
    let samples = a.samples.unwrap_or(DEFAULT_GRID_SAMPLES);
    if samples == 0 {
        return Err(invalid("samples must be positive").into());
    }
    let sampling = match a.sampling.as_deref().unwrap_or("grid") {
        "grid" => Sampling::grid_with_count(t_lo, t_hi, samples),
        "random" => Sampling::Random {
            seed: s.seed,
            count: samples,
        },
        other => return Err(invalid(format!("unknown sampling `{other}`")).into()),
    };
    Ok(Line {
        t_lo,
        t_hi,
        samples,
        sampling,
    })
}

fn sample(ctx: &VarianceContext, l: &Line, s: &Settings) -> Result<LineSampleSet, CliError> {
    let job = LineSampler::new(ctx, l.t_lo, l.t_hi, l.sampling, s.tol)?;
    let pts = run_job(&job, s.workers);
    Ok(job.assemble(pts))
}

fn exclusion(set: &LineSampleSet) -> serde_json::Value {
    json!({
        "counts": set.counts(),
        "excluded_fraction": set.excluded_fraction(),
        "warning": set.warning(),
    })
}

pub fn chf(a: &ChfArgs, s: &Settings) -> Result<Outcome, CliError> {
    let r = regime(&a.regime)?;
    let l = line(&a.line, &r, s)?;
    let u_max = positive("u_max", a.u_max.unwrap_or(1.0))?;
    let points = a.points.unwrap_or(21);
    if points < 2 {
        return Err(invalid("points must be at least 2").into());
    }
    let ctx = context(&r)?;
    let set = sample(&ctx, &l, s)?;
    let axis = LinearGrid::linspace(-u_max, u_max, points).values();
    let rows = par_map(&axis, s.workers, |&u| chf_deviation_grid(&set, &[u], &axis));
    let grid: Vec<_> = rows
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    let max_dev = grid.iter().fold(0.0f64, |m, p| m.max(p.abs_dev));
    let max_in = grid
        .iter()
        .filter(|p| p.within_omega)
        .fold(0.0f64, |m, p| m.max(p.abs_dev));
    let max_ratio = grid
        .iter()
        .fold(0.0f64, |m, p| m.max(p.abs_dev / p.envelope));
    let body = json!({
        "context": ctx,
        "sampling": exclusion(&set),
        "max_abs_dev": max_dev,
        "max_abs_dev_within_omega": max_in,
        "max_dev_to_envelope": max_ratio,
    });
    let config = json!({ "regime": r, "line": l, "u_max": u_max, "points": points, "tol": s.tol });
    Ok(Outcome {
        files: vec![
            ("chf.json".into(), report_json("chf", &config, body)?),
            ("chf.csv".into(), chf_csv(&grid)),
            ("samples.csv".into(), samples_csv(&set)),
        ],
        invariants_ok: true,
        summary: format!(
            "samples={} excluded={:.4} max|chf-gauss|={:.4}",
            set.len(),
            set.excluded_fraction(),
            max_dev
        ),
    })
}

pub fn dist(a: &DistArgs, s: &Settings) -> Result<Outcome, CliError> {
    let r = regime(&a.regime)?;
    let l = line(&a.line, &r, s)?;
    let radii = a
        .radii
        .clone()
        .unwrap_or_else(|| vec![0.5, 1.0, 1.5, 2.0, 3.0]);
    if radii.iter().any(|r| !(*r >= 0.0)) {
        return Err(invalid("radii must be non-negative").into());
    }
    let rects = a
        .rects
        .clone()
        .unwrap_or_else(|| vec![Rect([-1.0, 1.0, -1.0, 1.0])]);
    for Rect([ra, rb, rc, rd]) in &rects {
        if !(ra <= rb && rc <= rd) {
            return Err(invalid("rectangles need a <= b and c <= d").into());
        }
    }
    let delta = a.delta.map(|d| positive("delta", d)).transpose()?;
    let ctx = context(&r)?;
    let set = sample(&ctx, &l, s)?;
    let n = set.ok_count();

    let points: Vec<Complex64> = set.ok_samples().collect();
    let mut rect_out = Vec::new();
    for Rect([ra, rb, rc, rd]) in &rects {
        let rep = rectangle_report(&set, *ra, *rb, *rc, *rd)?;
        let sandwich = match delta {
            Some(d) => {
                let band = rectangle_band(*ra, *rb, *rc, *rd, d, 500)?;
                Some(rect_prob_from_samples(
                    &points,
                    &band,
                    SANDWICH_TOL,
                    SANDWICH_PANELS,
                )?)
            }
            None => None,
        };
        rect_out
            .push(json!({ "report": rep, "std_error": rep.std_error(n), "sandwich": sandwich }));
    }
    let mut disk_out = Vec::new();
    for &rad in &radii {
        let rep = disk_report(&set, rad)?;
        disk_out.push(json!({
            "report": rep,
            "std_error": rep.std_error(n),
            "small_disk_ratio": small_disk_ratio(&set, rad)?,
        }));
    }
    let body = json!({
        "context": ctx,
        "sampling": exclusion(&set),
        "rectangles": rect_out,
        "disks": disk_out,
        "disk_sup_deviation": disk_sup_deviation(&set)?,
        "second_moment": second_moment_check(&set)?,
    });
    let config = json!({ "regime": r, "line": l, "radii": radii, "rects": rects, "delta": delta, "tol": s.tol });
    Ok(Outcome {
        files: vec![
            ("dist.json".into(), report_json("dist", &config, body)?),
            ("samples.csv".into(), samples_csv(&set)),
        ],
        invariants_ok: true,
        summary: format!(
            "samples={} excluded={:.4}",
            set.len(),
            set.excluded_fraction()
        ),
    })
}
