//! Input parsing and run manifests.

use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{QfinError, Result};
use crate::state::RNG_ALGORITHM;

/// Whether a probability array was given in percent or as fractions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbabilityScale {
    Percent,
    Unit,
}

/// Whitespace- or comma-separated reals summing to 100 or 1. The scale is
/// picked from the sum; published arrays are rounded, so sums within 0.01 of
/// 100 (or 1e-4 of 1) are accepted and later normalized.
pub fn parse_probability_array(text: &str) -> Result<(Vec<f64>, ProbabilityScale)> {
    let values = text
        .split(|c: char| c.is_whitespace() || c == ',' || c == ';')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| QfinError::Parse(format!("not a number: `{s}`"))))
        .collect::<Result<Vec<f64>>>()?;
    if values.is_empty() {
        return Err(QfinError::Parse("empty probability array".into()));
    }
    let sum: f64 = values.iter().sum();
    let scale = if (sum - 100.0).abs() <= 1e-2 {
        ProbabilityScale::Percent
    } else if (sum - 1.0).abs() <= 1e-4 {
        ProbabilityScale::Unit
    } else {
        return Err(QfinError::InvalidDistribution(format!("array sums to {sum}, expected 100 or 1")));
    };
    Ok((values, scale))
}

/// One P/L value per line, optionally preceded by a date column. A header
/// line is skipped when its last field is not numeric.
pub fn parse_pl_series(text: &str) -> Result<Vec<f64>> {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| QfinError::Parse(e.to_string()))?;
        let Some(field) = record.iter().rev().find(|f| !f.is_empty()) else { continue };
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            _ if line == 0 => continue,
            _ => return Err(QfinError::Parse(format!("line {}: not a number: `{field}`", line + 1))),
        }
    }
    if out.is_empty() {
        return Err(QfinError::Parse("no values in series".into()));
    }
    Ok(out)
}

/// Returns, optional prices and a covariance matrix keyed by asset label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssetTable {
    pub labels: Vec<String>,
    pub returns: Vec<f64>,
    pub prices: Option<Vec<f64>>,
    pub covariance: Vec<Vec<f64>>,
}

/// Parses the labeled layout
///
/// ```text
/// label,A,B
/// returns,0.1,0.2
/// prices,1,1        (optional)
/// A,0.04,
/// B,0.01,0.09
/// ```
///
/// Covariance rows follow the header order. Blank cells are filled from the
/// mirrored entry, so a lower triangle is enough.
pub fn parse_asset_table(text: &str) -> Result<AssetTable> {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(true).flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| QfinError::Parse(e.to_string()))?.clone();
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let n = labels.len();
    if n == 0 {
        return Err(QfinError::Parse("header names no assets".into()));
    }
    let mut returns = None;
    let mut prices = None;
    let mut cov: Vec<Option<Vec<Option<f64>>>> = vec![None; n];
    for record in reader.records() {
        let record = record.map_err(|e| QfinError::Parse(e.to_string()))?;
        let key = record.get(0).unwrap_or("").to_string();
        if key.is_empty() {
            continue;
        }
        let cells = (0..n)
            .map(|j| match record.get(j + 1).unwrap_or("") {
                "" => Ok(None),
                s => s
                    .trim_end_matches('%')
                    .parse::<f64>()
                    .map(Some)
                    .map_err(|_| QfinError::Parse(format!("row `{key}`: not a number: `{s}`"))),
            })
            .collect::<Result<Vec<Option<f64>>>>()?;
        let full = |cells: Vec<Option<f64>>| -> Result<Vec<f64>> {
            cells
                .into_iter()
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| QfinError::Parse(format!("row `{key}` has blank cells")))
        };
        match key.to_ascii_lowercase().as_str() {
            "returns" | "return" | "average returns" => returns = Some(full(cells)?),
            "prices" | "price" => prices = Some(full(cells)?),
            _ => {
                let i = labels
                    .iter()
                    .position(|l| *l == key)
                    .ok_or_else(|| QfinError::Parse(format!("unknown row `{key}`")))?;
                cov[i] = Some(cells);
            }
        }
    }
    let returns = returns.ok_or_else(|| QfinError::Parse("missing `returns` row".into()))?;
    let rows: Vec<Vec<Option<f64>>> = cov
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.ok_or_else(|| QfinError::Parse(format!("missing covariance row `{}`", labels[i]))))
        .collect::<Result<_>>()?;
    let mut covariance = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            covariance[i][j] = match (rows[i][j], rows[j][i]) {
                (Some(a), Some(b)) if (a - b).abs() > 1e-9 * a.abs().max(b.abs()).max(1.0) => {
                    return Err(QfinError::Parse(format!("covariance not symmetric at ({i}, {j})")))
                }
                (Some(a), _) | (None, Some(a)) => a,
                (None, None) => return Err(QfinError::Parse(format!("covariance entry ({i}, {j}) missing"))),
            };
        }
    }
    Ok(AssetTable { labels, returns, prices, covariance })
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| QfinError::Parse(format!("{}: {e}", path.display())))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &Path, contents: &str) -> Self {
        Self { path: path.display().to_string(), sha256: sha256_hex(contents.as_bytes()) }
    }
}

/// Everything needed to replay a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub rng_algorithm: String,
    pub version: String,
    pub inputs: Vec<InputDigest>,
    pub elapsed_ms: f64,
}

impl RunManifest {
    pub fn new(subcommand: &str, parameters: serde_json::Value, seed: Option<u64>) -> Self {
        Self {
            subcommand: subcommand.into(),
            parameters,
            seed,
            rng_algorithm: RNG_ALGORITHM.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            inputs: Vec::new(),
            elapsed_ms: 0.0,
        }
    }

    pub fn with_input(mut self, digest: InputDigest) -> Self {
        self.inputs.push(digest);
        self
    }

    pub fn finish(mut self, elapsed: Duration) -> Self {
        self.elapsed_ms = elapsed.as_secs_f64() * 1e3;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probability_scale_detected() {
        let (v, s) = parse_probability_array("50 25\n25").unwrap();
        assert_eq!((v.len(), s), (3, ProbabilityScale::Percent));
        let (_, s) = parse_probability_array("0.5,0.25, 0.25").unwrap();
        assert_eq!(s, ProbabilityScale::Unit);
        assert!(parse_probability_array("0.5 0.1").is_err());
        assert!(parse_probability_array("0.5 x").is_err());
        assert!(parse_probability_array(include_str!("../data/cnb_risk_16.txt")).is_ok());
    }

    #[test]
    fn series_with_dates() {
        assert_eq!(parse_pl_series("date,pl\n2020-01-02,1.5\n2020-01-03,-2\n").unwrap(), vec![1.5, -2.0]);
        assert_eq!(parse_pl_series("3\n4\n").unwrap(), vec![3.0, 4.0]);
        assert!(parse_pl_series("1\nfoo\n").is_err());
        assert!(parse_pl_series("").is_err());
    }

    #[test]
    fn asset_tables() {
        let full = parse_asset_table(include_str!("../data/semis.csv")).unwrap();
        assert_eq!(full.labels[2], "Qualcomm");
        assert_eq!(full.covariance[4][2], 0.05288);
        assert!(full.prices.is_none());
        let tri = parse_asset_table(include_str!("../data/semis_rounded.csv")).unwrap();
        assert_eq!(tri.covariance[0][4], -0.019);
        let be = parse_asset_table(include_str!("../data/bonds_equities.csv")).unwrap();
        assert_eq!(be.prices, Some(vec![1.0, 1.0]));
        assert!(parse_asset_table("label,A\nreturns,1\n").is_err());
        assert!(parse_asset_table("label,A,B\nreturns,1,2\nA,1,2\nB,3,1\n").is_err());
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
