use std::fmt::Write as _;

use serde::Serialize;
use serde_json::json;
use zetadist_core::extremal::{
    check_domination, selberg_interval, verify_bandlimit, BandlimitedMajorant, Kind,
    DEFAULT_SERIES_TERMS, DEFAULT_WINDOW_SCALE, MIN_SERIES_TERMS,
};
use zetadist_core::numeric::LinearGrid;

use super::{invalid, positive, CliError, Outcome, Settings};
use crate::config::BsArgs;
use crate::io::report_json;

/// `|F̂(ξ)|` beyond `1.05 δ` must stay below this fraction of `F̂(0)`.
pub const BANDLIMIT_TOL: f64 = 1e-4;
pub const BAND_MARGIN: f64 = 0.05;
pub const EXCESS_TOL: f64 = 1e-6;
pub const DOMINATION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
struct Resolved {
    a: f64,
    b: f64,
    delta: f64,
    kinds: Vec<Kind>,
    terms: usize,
    window: f64,
    xi_max: f64,
    xi_points: usize,
    grid_points: usize,
}

pub fn bs(args: &BsArgs, _s: &Settings) -> Result<Outcome, CliError> {
    let a = args.a.unwrap_or(-1.0);
    let b = args.b.unwrap_or(1.0);
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(invalid("interval needs a < b").into());
    }
    let delta = positive("delta", args.delta.unwrap_or(4.0))?;
    let kinds = match args.kind.as_deref().unwrap_or("both") {
        "majorant" => vec![Kind::Majorant],
        "minorant" => vec![Kind::Minorant],
        "both" => vec![Kind::Majorant, Kind::Minorant],
        k => return Err(invalid(format!("unknown kind `{k}`")).into()),
    };
    let terms = args.terms.unwrap_or(DEFAULT_SERIES_TERMS);
    if terms < MIN_SERIES_TERMS {
        return Err(invalid("terms must be at least 50").into());
    }
    let r = Resolved {
        a,
        b,
        delta,
        kinds,
        terms,
        window: positive(
            "window",
            args.window.unwrap_or(DEFAULT_WINDOW_SCALE / delta),
        )?,
        xi_max: positive("xi_max", args.xi_max.unwrap_or(3.0 * delta))?,
        xi_points: args.xi_points.unwrap_or(121),
        grid_points: args.grid_points.unwrap_or(10_000),
    };
    if r.xi_points < 2 || r.grid_points < 2 {
        return Err(invalid("xi_points and grid_points must be at least 2").into());
    }

    let xi = LinearGrid::linspace(-r.xi_max, r.xi_max, r.xi_points).values();
    let mut ok = true;
    let mut reports = Vec::new();
    let mut files = Vec::new();
    for &kind in &r.kinds {
        let f = selberg_interval(a, b, delta, kind, terms)?;
        let excess = f.excess_integral(r.window)?;
        let dom = check_domination(&f, r.grid_points);
        let band = verify_bandlimit(&f, &xi, r.window, BAND_MARGIN)?;
        let target = match kind {
            Kind::Majorant => 1.0 / delta,
            Kind::Minorant => -1.0 / delta,
        };
        let excess_ok = (excess - target).abs() <= EXCESS_TOL;
        let dom_ok = dom.min_slack >= -(DOMINATION_SLACK + f.tolerance());
        let band_ok = band.band_limited(BANDLIMIT_TOL);
        let bounded_ok = band.bounded(2.0);
        ok &= excess_ok && dom_ok && band_ok && bounded_ok;
        let name = match kind {
            Kind::Majorant => "majorant",
            Kind::Minorant => "minorant",
        };
        files.push((
            format!("bs_{name}_values.csv"),
            values_csv(&f, r.grid_points),
        ));
        let mut t = String::from("xi,re,im,abs,closed_re,closed_im\n");
        for ((x, z), c) in band.xi.iter().zip(&band.numeric).zip(&band.closed_form) {
            let _ = writeln!(t, "{x},{},{},{},{},{}", z.re, z.im, z.norm(), c.re, c.im);
        }
        files.push((format!("bs_{name}_transform.csv"), t));
        reports.push(json!({
            "kind": kind,
            "excess": excess,
            "excess_target": target,
            "excess_ok": excess_ok,
            "domination": dom,
            "domination_ok": dom_ok,
            "f_hat_zero": band.f_hat_zero,
            "tail_bound": band.tail_bound,
            "max_beyond_band": band.max_beyond_band,
            "band_limited": band_ok,
            "max_abs_transform": band.max_abs,
            "bounded": bounded_ok,
        }));
    }
    let body = json!({ "functions": reports, "invariants_ok": ok });
    files.insert(0, ("bs.json".into(), report_json("bs", &r, body)?));
    Ok(Outcome {
        files,
        invariants_ok: ok,
        summary: format!(
            "interval [{a}, {b}] delta={delta}: properties {}",
            if ok { "hold" } else { "FAIL" }
        ),
    })
}

fn values_csv(f: &BandlimitedMajorant, points: usize) -> String {
    let lo = f.a - 5.0 / f.delta;
    let hi = f.b + 5.0 / f.delta;
    let mut s = String::from("x,f,indicator\n");
    for x in LinearGrid::linspace(lo, hi, points).values() {
        let _ = writeln!(s, "{x},{},{}", f.eval(x), f.indicator(x));
    }
    s
}
