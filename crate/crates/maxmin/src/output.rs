//! Flat-file outputs: `trials.csv` and `summary.json`.
//!
//! The CSV carries one record per (trial, scheme, candidate size) cell with
//! a fixed header, UTF-8, LF line endings, and no volatile fields, so equal
//! seeds reproduce it byte for byte. Wall-clock time lives only in the JSON
//! summary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cellfree_core::error::{Error, Result};

use crate::campaign::{CampaignOutcome, TrialRecord};
use crate::cdf::Summary;

/// File name of the per-trial table inside the output directory.
pub const TRIALS_FILE: &str = "trials.csv";

/// File name of the campaign summary inside the output directory.
pub const SUMMARY_FILE: &str = "summary.json";

fn describe_io(context: &str, path: &Path, err: impl std::fmt::Display) -> Error {
    Error::Config(format!("cannot {context} {}: {err}", path.display()))
}

/// Serializes the records as `trials.csv` rows, in their sorted order.
pub fn write_trials_csv(path: &Path, records: &[TrialRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| describe_io("create", path, e))?;
    for record in records {
        writer
            .serialize(record)
            .map_err(|e| describe_io("write", path, e))?;
    }
    writer.flush().map_err(|e| describe_io("flush", path, e))
}

/// Reads `trials.csv` back into records (used by tests and downstream
/// tooling; the harness itself only writes).
pub fn read_trials_csv(path: &Path) -> Result<Vec<TrialRecord>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| describe_io("open", path, e))?;
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<TrialRecord>, _>>()
        .map_err(|e| describe_io("parse", path, e))
}

/// Writes the pretty-printed campaign summary.
pub fn write_summary_json(path: &Path, summary: &Summary) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summary)
        .map_err(|e| describe_io("serialize", path, e))?;
    text.push('\n');
    let mut file = fs::File::create(path).map_err(|e| describe_io("create", path, e))?;
    file.write_all(text.as_bytes())
        .map_err(|e| describe_io("write", path, e))
}

/// Writes both campaign artifacts into `dir`, creating it if needed, and
/// returns their paths.
pub fn write_outcome(dir: &Path, outcome: &CampaignOutcome) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir).map_err(|e| describe_io("create directory", dir, e))?;
    let trials = dir.join(TRIALS_FILE);
    let summary = dir.join(SUMMARY_FILE);
    write_trials_csv(&trials, &outcome.records)?;
    write_summary_json(&summary, &outcome.summary)?;
    Ok((trials, summary))
}
