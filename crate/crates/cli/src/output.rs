use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::experiments::Cell;

/// Writes a header row and data rows with LF line endings, quoting only where needed.
pub fn write_csv(path: &Path, columns: &[&str], rows: &[Vec<Cell>]) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(columns)?;
    for row in rows {
        w.write_record(row.iter().map(Cell::render))?;
    }
    w.flush()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    NumericalFailure,
}

/// Which subsystem failed and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub module: String,
    pub message: String,
}

/// The JSON summary written next to the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub kind: String,
    pub status: Status,
    pub config: Value,
    pub units: Value,
    pub csv_columns: Vec<String>,
    pub results: Value,
    pub error: Option<Failure>,
    pub duration_seconds: f64,
    /// Always 0; every computation is deterministic.
    pub seed: u64,
}

impl RunReport {
    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        text.push('\n');
        std::fs::write(path, text)
    }
}
