use serde::Serialize;
use serde_json::json;
use zetadist_core::numeric::LinearGrid;
use zetadist_core::selberg::{ScanJob, ScanOptions, DEFAULT_TERM_CAP};
use zetadist_core::zeta::{find_zero_ordinates, ZeroList, ZeroSource};

use super::{invalid, positive, CliError, Outcome, Settings};
use crate::config::{ScanArgs, ZerosArgs};
use crate::io::{read_zero_table, report_json, scan_csv, zero_table};
use crate::parallel::run_job;

/// Coverage heights up to which a missing zero table is computed on the fly.
pub const AUTO_ZERO_HEIGHT: f64 = 2000.0;

#[derive(Debug, Clone, Serialize)]
struct Resolved {
    sigma: f64,
    x: f64,
    t_lo: f64,
    t_hi: f64,
    points: usize,
    zeros: Option<String>,
    normalized_branch3: bool,
    term_cap: f64,
    tol: f64,
}

pub fn scan(a: &ScanArgs, s: &Settings) -> Result<Outcome, CliError> {
    let sigma = a.sigma.ok_or_else(|| invalid("scan needs sigma"))?;
    if !(sigma > 0.5 && sigma.is_finite()) {
        return Err(invalid("sigma must exceed 1/2").into());
    }
    let x = a.x.unwrap_or(1e3);
    if !(x >= 10.0 && x.is_finite()) {
        return Err(invalid("x must be at least 10").into());
    }
    let t_lo = positive("t_lo", a.t_lo.unwrap_or(50.0))?;
    let t_hi = a.t_hi.unwrap_or(1e3);
    if !(t_hi >= t_lo) {
        return Err(invalid("t_hi must not be below t_lo").into());
    }
    let r = Resolved {
        sigma,
        x,
        t_lo,
        t_hi,
        points: a.points.unwrap_or(1000),
        zeros: a.zeros.as_ref().map(|p| p.display().to_string()),
        normalized_branch3: a.normalized_branch3.unwrap_or(true),
        term_cap: positive("term_cap", a.term_cap.unwrap_or(DEFAULT_TERM_CAP))?,
        tol: s.tol,
    };
    if r.points == 0 {
        return Err(invalid("points must be positive").into());
    }
    let zeros = match &a.zeros {
        Some(p) => read_zero_table(p)?,
        None => {
            let reach = t_hi + x.powf(1.5) / x.ln();
            if reach <= AUTO_ZERO_HEIGHT {
                find_zero_ordinates(reach, 1e-10)?
            } else {
                ZeroList::new(Vec::new(), ZeroSource::Computed, Some(0.0))?
            }
        }
    };
    let opts = ScanOptions {
        tol: s.tol,
        term_cap: r.term_cap,
        normalized_branch3: r.normalized_branch3,
    };
    let grid = LinearGrid::linspace(t_lo, t_hi, r.points);
    let job = ScanJob::new(sigma, x, grid, &zeros, &opts)?;
    let report = job.report(run_job(&job, s.workers));
    let body = json!({
        "zeros_covered_to": zeros.covers_to(),
        "zeros_used": zeros.len(),
        "flagged_fraction": report.flagged_fraction,
        "max_residual": report.max_residual,
        "ratio_quantiles": report.ratio_quantiles,
    });
    Ok(Outcome {
        files: vec![
            ("scan.json".into(), report_json("scan", &r, body)?),
            ("scan.csv".into(), scan_csv(&report)),
        ],
        invariants_ok: true,
        summary: format!(
            "rows={} flagged={:.4} max|residual|={:e}",
            report.rows.len(),
            report.flagged_fraction,
            report.max_residual
        ),
    })
}

pub fn zeros(a: &ZerosArgs, s: &Settings) -> Result<Outcome, CliError> {
    let t_max = a.t_max.ok_or_else(|| invalid("zeros needs t_max"))?;
    if !(t_max >= 0.0 && t_max <= 1e5) {
        return Err(invalid("t_max must lie in [0, 1e5]").into());
    }
    let list = find_zero_ordinates(t_max, s.tol)?;
    Ok(Outcome {
        files: vec![("zeros.txt".into(), zero_table(&list))],
        invariants_ok: true,
        summary: format!("{} zeros up to {t_max}", list.len()),
    })
}
