//! Zero tables, CSV dumps and JSON reports.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use zetadist_core::lab::{ChfPoint, LineSampleSet};
use zetadist_core::selberg::ScanReport;
use zetadist_core::zeta::{Zero, ZeroList, ZeroSource};
use zetadist_core::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] zetadist_core::Error),
}

/// Parse a zero table: one `beta gamma` pair per line; blank lines and lines
/// starting with `#` are skipped.
pub fn parse_zero_table(text: &str) -> Result<Vec<Zero>, IoError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let mut next = |what: &str| -> Result<f64, IoError> {
            let tok = it.next().ok_or_else(|| IoError::Parse {
                line: i + 1,
                msg: format!("missing {what}"),
            })?;
            tok.parse().map_err(|_| IoError::Parse {
                line: i + 1,
                msg: format!("bad {what} `{tok}`"),
            })
        };
        let beta = next("beta")?;
        let gamma = next("gamma")?;
        if it.next().is_some() {
            return Err(IoError::Parse {
                line: i + 1,
                msg: "expected exactly two columns".into(),
            });
        }
        out.push(Zero { beta, gamma });
    }
    Ok(out)
}

pub fn read_zero_table(path: &Path) -> Result<ZeroList, IoError> {
    let zeros = parse_zero_table(&fs::read_to_string(path)?)?;
    Ok(ZeroList::new(zeros, ZeroSource::Ingested, None)?)
}

pub fn zero_table(list: &ZeroList) -> String {
    let mut s = String::new();
    for z in list.zeros() {
        let _ = writeln!(s, "{} {}", z.beta, z.gamma);
    }
    s
}

pub fn samples_csv(set: &LineSampleSet) -> String {
    let mut s = String::from("t,re,im,flag\n");
    for ((t, z), f) in set.t_values.iter().zip(&set.samples).zip(&set.flags) {
        let _ = writeln!(s, "{t},{},{},{}", z.re, z.im, f.as_str());
    }
    s
}

pub fn chf_csv(points: &[ChfPoint]) -> String {
    chf_csv_rows(
        points
            .iter()
            .map(|p| (p.u, p.v, p.value, p.gaussian, p.std_error)),
    )
}

/// Rows `(u, v, value, gaussian, std_error)` in the chf CSV layout.
pub fn chf_csv_rows(rows: impl Iterator<Item = (f64, f64, Complex64, f64, f64)>) -> String {
    let mut s = String::from("u,v,re,im,gaussian_re,abs_dev,std_error\n");
    for (u, v, z, g, se) in rows {
        let _ = writeln!(s, "{u},{v},{},{},{g},{},{se}", z.re, z.im, (z - g).norm());
    }
    s
}

pub fn scan_csv(report: &ScanReport) -> String {
    let mut s = String::from("t,lhs_re,lhs_im,poly_re,poly_im,res_abs,bound,flagged\n");
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.t,
            r.lhs.re,
            r.lhs.im,
            r.poly.re,
            r.poly.im,
            r.residual.norm(),
            r.bound,
            r.flagged
        );
    }
    s
}

pub fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// Report with a fixed header: command name, timestamp and resolved config.
#[derive(Serialize)]
pub struct Report<'a, C: Serialize, B: Serialize> {
    pub command: &'a str,
    pub timestamp: u64,
    pub config: &'a C,
    #[serde(flatten)]
    pub body: B,
}

pub fn report_json<C: Serialize, B: Serialize>(
    command: &str,
    config: &C,
    body: B,
) -> Result<String, IoError> {
    let r = Report {
        command,
        timestamp: timestamp(),
        config,
        body,
    };
    let mut s = serde_json::to_string_pretty(&r)?;
    s.push('\n');
    Ok(s)
}

/// Write every file into `dir`, creating it first.
pub fn write_outputs(dir: &Path, files: &[(String, String)]) -> Result<(), IoError> {
    fs::create_dir_all(dir)?;
    for (name, body) in files {
        fs::write(dir.join(name), body)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_table_round_trip() {
        let text = "# first zeros\n0.5 14.134725141734695\n\n0.5 21.022039638771556\n";
        let zs = parse_zero_table(text).unwrap();
        assert_eq!(zs.len(), 2);
        let list = ZeroList::new(zs, ZeroSource::Ingested, None).unwrap();
        assert_eq!(list.covers_to(), 21.022039638771556);
        let back = parse_zero_table(&zero_table(&list)).unwrap();
        assert_eq!(back, list.zeros());
        assert!(matches!(
            parse_zero_table("0.5\n"),
            Err(IoError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_zero_table("0.5 1 2\n"),
            Err(IoError::Parse { .. })
        ));
    }

    #[test]
    fn report_header_and_context_names() {
        let ctx = zetadist_core::variance::make_context(0.6, 1e4, 1.0).unwrap();
        let s = report_json(
            "variance",
            &serde_json::json!({"sigma": 0.6}),
            serde_json::json!({ "context": ctx }),
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["command"], "variance");
        assert!(v["timestamp"].is_u64());
        for key in [
            "sigma",
            "T",
            "V",
            "psi",
            "Omega",
            "bOmega",
            "tOmega",
            "K_const",
            "truncation_bound",
        ] {
            assert!(v["context"].get(key).is_some(), "{key}");
        }
    }
}
