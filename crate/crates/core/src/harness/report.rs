use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::grid::{ExperimentReport, ExperimentRow, GridMetadata};
use crate::{Error, Result};

pub const RESULTS_CSV: &str = "results.csv";
pub const SUMMARY_JSON: &str = "summary.json";

#[derive(Serialize)]
struct Summary<'a> {
    n_rows: usize,
    best_overall: &'a ExperimentRow,
    best_per_set: BTreeMap<u8, &'a ExperimentRow>,
    metadata: &'a GridMetadata,
}

/// Writes `results.csv` (one line per experiment) and `summary.json` (best row
/// per set and overall) into `dir`, creating it if needed.
pub fn emit_report(report: &ExperimentReport, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    let best_overall = report
        .best_overall()
        .ok_or_else(|| Error::Contract("cannot emit an empty experiment report".into()))?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let csv_path = dir.join(RESULTS_CSV);
    let mut w = csv::Writer::from_path(&csv_path).map_err(|e| Error::Csv(e).context(csv_path.display().to_string()))?;
    for row in &report.rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(&csv_path, e))?;

    let best_per_set = (1..=5)
        .filter_map(|s| report.best_in_set(s).map(|r| (s, r)))
        .collect();
    let summary = Summary {
        n_rows: report.rows.len(),
        best_overall,
        best_per_set,
        metadata: &report.metadata,
    };
    let json_path = dir.join(SUMMARY_JSON);
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    std::fs::write(&json_path, text).map_err(|e| Error::io(&json_path, e))?;
    Ok((csv_path, json_path))
}
