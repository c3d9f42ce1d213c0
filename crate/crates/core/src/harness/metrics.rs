//! Result rows and their CSV/JSON encodings.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const METRICS_VERSION: &str = "1";

/// One (algorithm, Eb/N0) point. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub format_version: String,
    pub algorithm: String,
    pub ebno_db: f64,
    pub trials: u64,
    pub block_errors: u64,
    pub bler: f64,
    pub avg_queries: f64,
    pub avg_rounds: f64,
    /// Mean fraction of parity rows evaluated per test.
    pub avg_fraction_parity_checked: f64,
    pub wall_ns_per_decode: f64,
    pub seed: u64,
    pub code: String,
    pub pattern_set: String,
}

pub const CSV_COLUMNS: [&str; 13] = [
    "format_version",
    "algorithm",
    "ebno_db",
    "trials",
    "block_errors",
    "bler",
    "avg_queries",
    "avg_rounds",
    "avg_fraction_parity_checked",
    "wall_ns_per_decode",
    "seed",
    "code",
    "pattern_set",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    /// Picks JSON for `.json` paths and CSV otherwise.
    pub fn for_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonDocument {
    format_version: String,
    rows: Vec<MetricsRow>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn to_csv(rows: &[MetricsRow]) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for r in rows {
        let fields = [
            csv_field(&r.format_version),
            csv_field(&r.algorithm),
            r.ebno_db.to_string(),
            r.trials.to_string(),
            r.block_errors.to_string(),
            format!("{:e}", r.bler),
            r.avg_queries.to_string(),
            r.avg_rounds.to_string(),
            r.avg_fraction_parity_checked.to_string(),
            format!("{:.1}", r.wall_ns_per_decode),
            r.seed.to_string(),
            csv_field(&r.code),
            csv_field(&r.pattern_set),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json(rows: &[MetricsRow]) -> Result<String> {
    let doc = JsonDocument {
        format_version: METRICS_VERSION.into(),
        rows: rows.to_vec(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn from_json(text: &str) -> Result<Vec<MetricsRow>> {
    let doc: JsonDocument = serde_json::from_str(text)?;
    if doc.format_version != METRICS_VERSION {
        return Err(Error::VersionMismatch {
            expected: METRICS_VERSION.into(),
            found: doc.format_version,
        });
    }
    Ok(doc.rows)
}

pub fn emit(rows: &[MetricsRow], format: OutputFormat, path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Config("no metrics rows to write".into()));
    }
    let text = match format {
        OutputFormat::Csv => to_csv(rows),
        OutputFormat::Json => to_json(rows)?,
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
