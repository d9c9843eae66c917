//! Empirical CDFs and campaign summaries.
//!
//! Sorted per-group SINR values are ranked `k/(T+1)`, the unbiased plotting
//! position for continuous distributions; quantiles invert that rule with
//! linear interpolation, so a single sample sits at rank one half and the
//! median of three samples is the middle one exactly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::campaign::{CampaignEcho, CampaignSpec, TrialRecord};

/// Quantile of pre-sorted values under the `k/(T+1)` ranking rule,
/// linearly interpolated and clamped to the observed range.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    assert!((0.0..=1.0).contains(&q), "quantile {q} outside [0, 1]");
    let position = q * (sorted.len() + 1) as f64;
    if position <= 1.0 {
        return sorted[0];
    }
    if position >= sorted.len() as f64 {
        return sorted[sorted.len() - 1];
    }
    let lower = position.floor() as usize;
    let weight = position - lower as f64;
    sorted[lower - 1] + weight * (sorted[lower] - sorted[lower - 1])
}

/// One point of an empirical CDF.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CdfPoint {
    pub gamma_db: f64,
    pub rank: f64,
}

/// Distribution summary of one (setup, scheme, candidate size) group.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupSummary {
    pub setup: String,
    pub scheme: String,
    pub candidate_size: usize,
    pub records: usize,
    pub converged: usize,
    pub median_db: Option<f64>,
    pub p10_db: Option<f64>,
    pub cdf: Vec<CdfPoint>,
}

/// Groups records by (setup, scheme, candidate size) and summarizes each
/// group's converged SINR values.
pub fn summarize_groups(records: &[TrialRecord]) -> Vec<GroupSummary> {
    let mut groups: BTreeMap<(String, String, usize), (usize, Vec<f64>)> = BTreeMap::new();
    for record in records {
        let key = (
            record.setup.clone(),
            record.scheme.clone(),
            record.candidate_size,
        );
        let entry = groups.entry(key).or_default();
        entry.0 += 1;
        if let Some(gamma_db) = record.gamma_star_db {
            entry.1.push(gamma_db);
        }
    }

    groups
        .into_iter()
        .map(|((setup, scheme, candidate_size), (records, mut values))| {
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let count = values.len();
            let cdf = values
                .iter()
                .enumerate()
                .map(|(i, &gamma_db)| CdfPoint {
                    gamma_db,
                    rank: (i + 1) as f64 / (count + 1) as f64,
                })
                .collect();
            let (median_db, p10_db) = if count > 0 {
                (
                    Some(percentile(&values, 0.5)),
                    Some(percentile(&values, 0.1)),
                )
            } else {
                (None, None)
            };
            GroupSummary {
                setup,
                scheme,
                candidate_size,
                records,
                converged: count,
                median_db,
                p10_db,
                cdf,
            }
        })
        .collect()
}

/// Campaign-level summary: configuration echo, convergence counts, and the
/// per-group CDF tables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub version: String,
    pub config: CampaignEcho,
    pub wall_time_seconds: f64,
    pub total_records: usize,
    pub converged_records: usize,
    pub unconverged_records: usize,
    pub groups: Vec<GroupSummary>,
}

impl Summary {
    pub fn build(spec: &CampaignSpec, records: &[TrialRecord], wall_time_seconds: f64) -> Self {
        let converged_records = records.iter().filter(|r| r.converged).count();
        Summary {
            version: concat!("v", env!("CARGO_PKG_VERSION")).to_string(),
            config: CampaignEcho::from(spec),
            wall_time_seconds,
            total_records: records.len(),
            converged_records,
            unconverged_records: records.len() - converged_records,
            groups: summarize_groups(records),
        }
    }

    /// The summary of one (setup, scheme, candidate size) group, if present.
    pub fn group(&self, setup: &str, scheme: &str, candidate_size: usize) -> Option<&GroupSummary> {
        self.groups.iter().find(|g| {
            g.setup == setup && g.scheme == scheme && g.candidate_size == candidate_size
        })
    }
}
