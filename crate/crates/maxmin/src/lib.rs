//! Monte Carlo campaign harness for max-min fair power control in
//! cell-free massive MIMO.
//!
//! Built on `cellfree-core`, this crate adds the benchmark setups, the
//! seeded campaign runner with paired channels across clustering schemes,
//! empirical-CDF summaries, and the flat-file outputs behind the
//! `cellfree-maxmin` binary.

pub mod campaign;
pub mod cdf;
pub mod output;
pub mod scenario;
pub mod setups;

pub use campaign::{run_campaign, CampaignOutcome, CampaignSpec, TrialRecord};
pub use cdf::{percentile, summarize_groups, GroupSummary, Summary};
pub use scenario::Scenario;
pub use setups::SetupId;
