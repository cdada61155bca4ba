use serde::Serialize;
use serde_json::json;
use zetadist_core::numeric::LinearGrid;
use zetadist_core::torus::{
    chf_from_samples, chf_product, gaussian_chf, moment_bound_from_samples, torus_moment_exact,
    TorusModel, TorusSampler,
};

use super::{invalid, positive, CliError, Outcome, Settings};
use crate::config::TorusArgs;
use crate::io::{chf_csv_rows, report_json};
use crate::parallel::{par_map, run_job};

#[derive(Debug, Clone, Copy, Serialize)]
struct Resolved {
    sigma: f64,
    x: f64,
    u_max: f64,
    points: usize,
    mc_samples: usize,
    quad_points: usize,
    max_k: usize,
    seed: u64,
}

pub fn torus(a: &TorusArgs, s: &Settings) -> Result<Outcome, CliError> {
    let sigma = a.sigma.ok_or_else(|| invalid("torus needs sigma"))?;
    if !(sigma > 0.5 && sigma <= 2.0) {
        return Err(invalid("sigma must lie in (1/2, 2]").into());
    }
    let x = a.x.unwrap_or(1e3);
    if !(2.0..=1e7).contains(&x) {
        return Err(invalid("x must lie in [2, 1e7]").into());
    }
    let r = Resolved {
        sigma,
        x,
        u_max: positive("u_max", a.u_max.unwrap_or(0.5))?,
        points: a.points.unwrap_or(11),
        mc_samples: a.mc_samples.unwrap_or(100_000),
        quad_points: a.quad_points.unwrap_or(64),
        max_k: a.max_k.unwrap_or(3),
        seed: s.seed,
    };
    if r.points < 2 || r.mc_samples < 1000 || r.quad_points < 64 || r.max_k > 3 {
        return Err(invalid(
            "need points >= 2, mc_samples >= 1000, quad_points >= 64 and max_k <= 3",
        )
        .into());
    }

    let model = TorusModel::new(sigma, x)?;
    let samples = run_job(&TorusSampler::new(&model, r.mc_samples, r.seed), s.workers);
    let axis = LinearGrid::linspace(-r.u_max, r.u_max, r.points).values();
    let pairs: Vec<(f64, f64)> = axis
        .iter()
        .flat_map(|&u| axis.iter().map(move |&v| (u, v)))
        .collect();
    let products = par_map(&pairs, s.workers, |&(u, v)| {
        chf_product(&model, u, v, r.quad_points)
    });
    let products = products.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut max_gauss = 0.0f64;
    let mut max_mc_z = 0.0f64;
    let mut rows = Vec::with_capacity(pairs.len());
    for (&(u, v), &p) in pairs.iter().zip(&products) {
        let g = gaussian_chf(u, v);
        let (mc, se) = chf_from_samples(&samples, u, v);
        max_gauss = max_gauss.max((p - g).norm());
        if se > 0.0 {
            max_mc_z = max_mc_z.max((mc - p).norm() / se);
        }
        rows.push((u, v, p, g, 0.0));
    }
    let mut moments = Vec::new();
    for m in 0..=2 {
        for k in 0..=2 {
            moments.push(json!({ "m": m, "k": k, "value": torus_moment_exact(&model, m, k)? }));
        }
    }
    let mut bounds = Vec::new();
    for k in 0..=r.max_k {
        bounds.push(moment_bound_from_samples(&model, k, &samples)?);
    }
    let ok = bounds.iter().all(|b| b.within_bound);
    let body = json!({
        "model": {
            "sigma": sigma,
            "x": x,
            "V": model.variance(),
            "primes": model.terms().len(),
            "prime_powers": model.table().len(),
            "second_moment": model.second_moment(),
        },
        "exact_moments": moments,
        "moment_bounds": bounds,
        "max_product_minus_gaussian": max_gauss,
        "max_montecarlo_z": max_mc_z,
    });
    Ok(Outcome {
        files: vec![
            ("torus.json".into(), report_json("torus", &r, body)?),
            ("torus_chf.csv".into(), chf_csv_rows(rows.into_iter())),
        ],
        invariants_ok: ok,
        summary: format!(
            "primes={} E|S|^2={:.6} max|chf-gauss|={:.4} moment bounds {}",
            model.terms().len(),
            model.second_moment(),
            max_gauss,
            if ok { "hold" } else { "FAIL" }
        ),
    })
}
