//! Command-line arguments and JSON config files.
//!
//! A config file is one flat JSON object. The keys `out`, `workers`, `seed`
//! and `tol` are shared; every other key belongs to the subcommand. Values
//! given as flags or `ZETADIST_*` environment variables override the file.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config: {0}")]
    Invalid(String),
    #[error("config file: {0}")]
    Read(#[from] std::io::Error),
    #[error("config file: {0}")]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Parser, Debug)]
#[command(
    name = "zetadist",
    version,
    about = "Value distribution experiments for the logarithmic derivative of zeta"
)]
pub struct Cli {
    /// JSON config file; flags and environment variables override it.
    #[arg(long, global = true, env = "ZETADIST_CONFIG")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct Common {
    /// Output directory.
    #[arg(long, global = true, env = "ZETADIST_OUT")]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "ZETADIST_WORKERS")]
    pub workers: Option<usize>,
    #[arg(long, global = true, env = "ZETADIST_SEED")]
    pub seed: Option<u64>,
    /// Absolute tolerance for zeta evaluations.
    #[arg(long, global = true, env = "ZETADIST_TOL")]
    pub tol: Option<f64>,
}

const COMMON_KEYS: [&str; 4] = ["out", "workers", "seed", "tol"];

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Variance and threshold radii for a regime.
    Variance(RegimeArgs),
    /// Empirical characteristic function against the Gaussian.
    Chf(ChfArgs),
    /// Rectangle and disk frequencies against the Gaussian.
    Dist(DistArgs),
    /// Random Euler product: moments and characteristic function.
    Torus(TorusArgs),
    /// Band-limited majorant and minorant of an interval.
    Bs(BsArgs),
    /// Residuals of the weighted Dirichlet polynomial approximation.
    Scan(ScanArgs),
    /// Zeros on the critical line up to a height.
    Zeros(ZerosArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Variance(_) => "variance",
            Command::Chf(_) => "chf",
            Command::Dist(_) => "dist",
            Command::Torus(_) => "torus",
            Command::Bs(_) => "bs",
            Command::Scan(_) => "scan",
            Command::Zeros(_) => "zeros",
        }
    }
}

/// Exactly one of `sigma` and `psi`.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct RegimeArgs {
    #[arg(long, env = "ZETADIST_SIGMA", allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    #[arg(long, env = "ZETADIST_PSI", allow_hyphen_values = true)]
    pub psi: Option<f64>,
    /// Height T.
    #[arg(long = "height", env = "ZETADIST_T")]
    #[serde(rename = "T")]
    pub height: Option<f64>,
    #[arg(long = "k-const", env = "ZETADIST_K_CONST")]
    #[serde(rename = "K_const")]
    pub k_const: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct LineArgs {
    #[arg(long = "t-lo", env = "ZETADIST_T_LO")]
    pub t_lo: Option<f64>,
    /// Defaults to the height T.
    #[arg(long = "t-hi", env = "ZETADIST_T_HI")]
    pub t_hi: Option<f64>,
    #[arg(long, env = "ZETADIST_SAMPLES")]
    pub samples: Option<usize>,
    /// `grid` or `random`.
    #[arg(long, env = "ZETADIST_SAMPLING")]
    pub sampling: Option<String>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct ChfArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub regime: RegimeArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub line: LineArgs,
    /// Grid covers `[-u_max, u_max]²`.
    #[arg(long = "u-max", env = "ZETADIST_U_MAX")]
    pub u_max: Option<f64>,
    /// Grid points per axis.
    #[arg(long, env = "ZETADIST_POINTS")]
    pub points: Option<usize>,
}

/// `a,b,c,d` for `[a,b] × [c,d]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect(pub [f64; 4]);

impl FromStr for Rect {
    type Err = String;

    fn from_str(s: &str) -> Result<Rect, String> {
        let v: Vec<f64> = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("bad number `{p}`"))
            })
            .collect::<Result<_, _>>()?;
        match v[..] {
            [a, b, c, d] => Ok(Rect([a, b, c, d])),
            _ => Err("rectangle needs four numbers a,b,c,d".into()),
        }
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct DistArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub regime: RegimeArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub line: LineArgs,
    /// Disk radii, comma separated.
    #[arg(long = "radii", env = "ZETADIST_RADII", value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    /// Rectangle `a,b,c,d`; repeatable.
    #[arg(long = "rect", allow_hyphen_values = true)]
    pub rects: Option<Vec<Rect>>,
    /// Band limit for the Fourier sandwich of each rectangle; omitted skips it.
    #[arg(long, env = "ZETADIST_DELTA")]
    pub delta: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct TorusArgs {
    #[arg(long, env = "ZETADIST_SIGMA")]
    pub sigma: Option<f64>,
    /// Prime powers up to x.
    #[arg(long, env = "ZETADIST_X")]
    pub x: Option<f64>,
    #[arg(long = "u-max", env = "ZETADIST_U_MAX")]
    pub u_max: Option<f64>,
    #[arg(long, env = "ZETADIST_POINTS")]
    pub points: Option<usize>,
    #[arg(long = "mc-samples", env = "ZETADIST_MC_SAMPLES")]
    pub mc_samples: Option<usize>,
    #[arg(long = "quad-points", env = "ZETADIST_QUAD_POINTS")]
    pub quad_points: Option<usize>,
    /// Largest k in the `|S|^{2k}` bound check.
    #[arg(long = "max-k", env = "ZETADIST_MAX_K")]
    pub max_k: Option<usize>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct BsArgs {
    #[arg(long, allow_hyphen_values = true, env = "ZETADIST_A")]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true, env = "ZETADIST_B")]
    pub b: Option<f64>,
    #[arg(long, env = "ZETADIST_DELTA")]
    pub delta: Option<f64>,
    /// `majorant`, `minorant` or `both`.
    #[arg(long, env = "ZETADIST_KIND")]
    pub kind: Option<String>,
    #[arg(long, env = "ZETADIST_TERMS")]
    pub terms: Option<usize>,
    /// Fourier window half-width; defaults to 1000/δ.
    #[arg(long, env = "ZETADIST_WINDOW")]
    pub window: Option<f64>,
    /// Largest |ξ| of the transform grid; defaults to 3δ.
    #[arg(long = "xi-max", env = "ZETADIST_XI_MAX")]
    pub xi_max: Option<f64>,
    #[arg(long = "xi-points", env = "ZETADIST_XI_POINTS")]
    pub xi_points: Option<usize>,
    /// Points of the domination grid.
    #[arg(long = "grid-points", env = "ZETADIST_GRID_POINTS")]
    pub grid_points: Option<usize>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct ScanArgs {
    #[arg(long, env = "ZETADIST_SIGMA")]
    pub sigma: Option<f64>,
    #[arg(long, env = "ZETADIST_X")]
    pub x: Option<f64>,
    #[arg(long = "t-lo", env = "ZETADIST_T_LO")]
    pub t_lo: Option<f64>,
    #[arg(long = "t-hi", env = "ZETADIST_T_HI")]
    pub t_hi: Option<f64>,
    #[arg(long, env = "ZETADIST_POINTS")]
    pub points: Option<usize>,
    /// Zero table with `beta gamma` per line.
    #[arg(long, env = "ZETADIST_ZEROS")]
    pub zeros: Option<PathBuf>,
    /// Use the weight `(log(x³/u))² / (2 log² x)` between `x²` and `x³`.
    #[arg(long = "normalized-branch3", env = "ZETADIST_NORMALIZED_BRANCH3")]
    pub normalized_branch3: Option<bool>,
    #[arg(long = "term-cap", env = "ZETADIST_TERM_CAP")]
    pub term_cap: Option<f64>,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct ZerosArgs {
    #[arg(long = "t-max", env = "ZETADIST_T_MAX")]
    pub t_max: Option<f64>,
}

/// Split a config object into shared keys and subcommand keys.
pub fn split_config(file: Value) -> Result<(Map<String, Value>, Map<String, Value>), ConfigError> {
    let Value::Object(map) = file else {
        return Err(invalid("config file must hold a JSON object"));
    };
    let (common, rest): (Vec<_>, Vec<_>) = map
        .into_iter()
        .partition(|(k, _)| COMMON_KEYS.contains(&k.as_str()));
    Ok((common.into_iter().collect(), rest.into_iter().collect()))
}

/// `over` with unset fields filled from `file`; unknown keys in `file` are
/// rejected.
pub fn merge<P: Serialize + DeserializeOwned>(
    over: &P,
    file: &Map<String, Value>,
) -> Result<P, ConfigError> {
    let Value::Object(mut base) = serde_json::to_value(over)? else {
        return Err(invalid("parameters must serialize to an object"));
    };
    for (k, v) in file {
        match base.get_mut(k) {
            Some(slot) if slot.is_null() => *slot = v.clone(),
            Some(_) => {}
            None => return Err(invalid(format!("unknown key `{k}`"))),
        }
    }
    Ok(serde_json::from_value(Value::Object(base))?)
}
