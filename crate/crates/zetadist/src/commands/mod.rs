//! Subcommand implementations. Every command resolves and validates its
//! full configuration before computing, and returns its output files
//! instead of writing them.

mod bs;
mod line;
mod scan;
mod torus;

use std::fs;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{Map, Value};
use zetadist_core::variance::{context_from_psi, make_context, VarianceContext};

use crate::config::{invalid, merge, split_config, Cli, Command, Common, ConfigError, RegimeArgs};
use crate::io::IoError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] zetadist_core::Error),
    #[error(transparent)]
    Io(#[from] IoError),
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> CliError {
        CliError::Io(IoError::Json(e))
    }
}

/// Files produced by a command and whether its asserted invariants held.
#[derive(Debug)]
pub struct Outcome {
    pub files: Vec<(String, String)>,
    pub invariants_ok: bool,
    pub summary: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub out: PathBuf,
    pub workers: usize,
    pub seed: u64,
    pub tol: f64,
}

pub const DEFAULT_OUT: &str = "zetadist-out";
pub const DEFAULT_TOL: f64 = 1e-10;

fn settings(common: &Common, file: &Map<String, Value>) -> Result<Settings, ConfigError> {
    let c: Common = merge(common, file)?;
    let tol = c.tol.unwrap_or(DEFAULT_TOL);
    if !(1e-15..=1e-6).contains(&tol) {
        return Err(invalid("tol must lie in [1e-15, 1e-6]"));
    }
    Ok(Settings {
        out: c.out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        workers: c.workers.unwrap_or(0),
        seed: c.seed.unwrap_or(0),
        tol,
    })
}

/// Resolve the config and run the command.
pub fn execute(cli: &Cli) -> Result<(Settings, Outcome), CliError> {
    let (common_file, rest) = match &cli.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(ConfigError::Read)?;
            split_config(serde_json::from_str(&text).map_err(ConfigError::Json)?)?
        }
        None => (Map::new(), Map::new()),
    };
    let s = settings(&cli.common, &common_file)?;
    let outcome = match &cli.command {
        Command::Variance(a) => line::variance(&merge(a, &rest)?, &s)?,
        Command::Chf(a) => line::chf(&merge(a, &rest)?, &s)?,
        Command::Dist(a) => line::dist(&merge(a, &rest)?, &s)?,
        Command::Torus(a) => torus::torus(&merge(a, &rest)?, &s)?,
        Command::Bs(a) => bs::bs(&merge(a, &rest)?, &s)?,
        Command::Scan(a) => scan::scan(&merge(a, &rest)?, &s)?,
        Command::Zeros(a) => scan::zeros(&merge(a, &rest)?, &s)?,
    };
    Ok((s, outcome))
}

pub const DEFAULT_HEIGHT: f64 = 1e5;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Regime {
    pub sigma: Option<f64>,
    pub psi: Option<f64>,
    #[serde(rename = "T")]
    pub height: f64,
    #[serde(rename = "K_const")]
    pub k_const: f64,
}

fn regime(a: &RegimeArgs) -> Result<Regime, ConfigError> {
    if a.sigma.is_some() == a.psi.is_some() {
        return Err(invalid("give exactly one of sigma and psi"));
    }
    Ok(Regime {
        sigma: a.sigma,
        psi: a.psi,
        height: a.height.unwrap_or(DEFAULT_HEIGHT),
        k_const: a.k_const.unwrap_or(1.0),
    })
}

fn context(r: &Regime) -> zetadist_core::Result<VarianceContext> {
    match (r.sigma, r.psi) {
        (Some(s), _) => make_context(s, r.height, r.k_const),
        (_, Some(p)) => context_from_psi(p, r.height, r.k_const),
        _ => unreachable!("regime checked"),
    }
}

fn positive(name: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(format!("{name} must be positive and finite")))
    }
}
