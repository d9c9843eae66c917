//! Seeded Monte Carlo campaigns over schemes, candidate sizes, and setups.
//!
//! One trial draws one network and one channel realization; every
//! (scheme, candidate size) combination then reuses that identical channel,
//! so scheme comparisons are paired and their differences are pure
//! algorithmic effect, not sampling noise. Trials run in parallel, each
//! owning its seeded generator, and records are sorted before writing so
//! output is independent of scheduling.

use std::time::Instant;

use cellfree_core::channel::generate_instance;
use cellfree_core::clustering::{candidate_set, capped_candidate_size, enumerate_clusters};
use cellfree_core::error::{Error, Result};
use cellfree_core::sinr::sinr_value;
use cellfree_core::solver::solve_max_min;
use cellfree_core::spectral::oracle_max_min;
use cellfree_core::units::{dbm_to_watts, linear_to_db};
use cellfree_core::{ChannelRealization64, ClusterIndicator, NetworkConfig64, SchemeId, SolverConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cdf::Summary;
use crate::scenario::NetworkEcho;
use crate::setups::SetupId;

/// A fully resolved campaign: what to run and with which knobs.
#[derive(Debug, Clone)]
pub struct CampaignSpec {
    /// Label recorded with every trial; `network` holds the actual grid.
    pub setup: SetupId,
    /// Resolved network, including user count and the campaign seed.
    pub network: NetworkConfig64,
    pub schemes: Vec<SchemeId>,
    pub candidate_sizes: Vec<usize>,
    pub num_trials: u64,
    pub p_max_dbm: f64,
    pub epsilon: f64,
    pub max_iterations: usize,
    /// Cross-check every in-budget instance against the spectral oracle.
    pub oracle_check: bool,
    /// Association-enumeration budget for the oracle cross-check.
    pub oracle_budget: u64,
    /// Lift the soft cap on exhaustive candidate-set size.
    pub allow_uncapped_exhaustive: bool,
}

impl CampaignSpec {
    /// Campaign defaults on a named setup: its grid and candidate size,
    /// all three schemes, 58 users, 200 trials at 20 dBm.
    pub fn for_setup(setup: SetupId, seed: u64) -> Self {
        let params = setup.params().or_else(|| SetupId::II.params()).unwrap();
        let mut network = setup.network(58);
        network.rng_seed = seed;
        CampaignSpec {
            setup,
            network,
            schemes: SchemeId::ALL.to_vec(),
            candidate_sizes: vec![params.candidate_size],
            num_trials: 200,
            p_max_dbm: 20.0,
            epsilon: 1e-8,
            max_iterations: 10_000,
            oracle_check: false,
            oracle_budget: 1_000_000,
            allow_uncapped_exhaustive: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        if self.num_trials == 0 {
            return Err(Error::Config("campaign needs at least one trial".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Config("campaign needs at least one scheme".into()));
        }
        if self.candidate_sizes.is_empty() {
            return Err(Error::Config(
                "campaign needs at least one candidate size".into(),
            ));
        }
        for &size in &self.candidate_sizes {
            if size == 0 || size > self.network.num_aps {
                return Err(Error::Config(format!(
                    "candidate size {size} outside 1..={}",
                    self.network.num_aps
                )));
            }
        }
        if !(self.p_max_dbm.is_finite()) {
            return Err(Error::Config("p_max must be finite".into()));
        }
        Ok(())
    }

    /// The (scheme, effective candidate size) pairs a trial runs, after the
    /// exhaustive cap, with duplicates collapsed.
    pub fn combos(&self) -> Vec<(SchemeId, usize)> {
        let mut combos = Vec::new();
        for &scheme in &self.schemes {
            for &size in &self.candidate_sizes {
                let effective =
                    capped_candidate_size(scheme, size, self.allow_uncapped_exhaustive);
                if !combos.contains(&(scheme, effective)) {
                    combos.push((scheme, effective));
                }
            }
        }
        combos
    }

    pub fn p_max_watts(&self) -> f64 {
        dbm_to_watts(self.p_max_dbm)
    }
}

/// One solved (trial, scheme, candidate size) cell of a campaign.
///
/// Optional fields are empty when the solver did not converge; the oracle
/// fields are additionally empty when the cross-check is off or the
/// instance exceeds the enumeration budget.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub setup: String,
    pub scheme: String,
    pub candidate_size: usize,
    pub gamma_star_db: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// (max SINR - min SINR) / gamma* at the solution.
    pub sinr_spread_rel: Option<f64>,
    /// |max_n p_n - p_max| / p_max at the solution.
    pub p_peak_rel_gap: Option<f64>,
    /// Cluster-size counts "n1;n2;..." for sizes 1..=candidate_size.
    pub cluster_size_hist: String,
    /// FNV-1a over the channel realization; equal across a trial's schemes.
    pub channel_checksum: String,
    /// |gamma*_solver - gamma*_oracle| / gamma*_oracle.
    pub oracle_gamma_rel_gap: Option<f64>,
    /// max_n |p_n_solver - p_n_oracle| / p_max.
    pub oracle_power_rel_gap: Option<f64>,
}

/// Records plus the campaign-level summary.
#[derive(Debug, Clone)]
pub struct CampaignOutcome {
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

/// FNV-1a over the bit patterns of every channel coefficient, real part
/// then imaginary, users outermost.
pub fn channel_checksum(ch: &ChannelRealization64) -> u64 {
    const OFFSET: u64 = 0xcbf29ce484222325;
    const PRIME: u64 = 0x100000001b3;
    let mut hash = OFFSET;
    let mut eat = |bits: u64| {
        for shift in (0..64).step_by(8) {
            hash ^= (bits >> shift) & 0xff;
            hash = hash.wrapping_mul(PRIME);
        }
    };
    for user in 0..ch.num_users() {
        for h in ch.user(user) {
            eat(h.re.to_bits());
            eat(h.im.to_bits());
        }
    }
    hash
}

fn cluster_lists(
    gains: &cellfree_core::linalg::DenseMatrix<f64>,
    num_users: usize,
    size: usize,
    scheme: SchemeId,
) -> Result<Vec<Vec<ClusterIndicator>>> {
    (0..num_users)
        .map(|user| {
            let cand = candidate_set(gains, user, size)?;
            Ok(enumerate_clusters(&cand, scheme))
        })
        .collect()
}

fn size_histogram(clusters: &[ClusterIndicator], candidate_size: usize) -> String {
    let mut counts = vec![0usize; candidate_size];
    for cluster in clusters {
        counts[cluster.size() - 1] += 1;
    }
    counts
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

fn within_budget(lists: &[Vec<ClusterIndicator>], budget: u64) -> bool {
    let mut total: u128 = 1;
    for list in lists {
        total = total.saturating_mul(list.len() as u128);
        if total > budget as u128 {
            return false;
        }
    }
    true
}

fn run_trial(
    spec: &CampaignSpec,
    combos: &[(SchemeId, usize)],
    trial: u64,
) -> Result<Vec<TrialRecord>> {
    let (instance, ch) = generate_instance(&spec.network, trial)?;
    let checksum = format!("{:016x}", channel_checksum(&ch));
    let num_users = spec.network.num_users;
    let p_max = spec.p_max_watts();

    let mut records = Vec::with_capacity(combos.len());
    for &(scheme, size) in combos {
        let lists = cluster_lists(&instance.gains, num_users, size, scheme)?;
        let mut config = SolverConfig::new(p_max);
        config.epsilon = spec.epsilon;
        config.max_iterations = spec.max_iterations;

        let mut record = TrialRecord {
            trial,
            setup: spec.setup.name().to_string(),
            scheme: scheme.name().to_string(),
            candidate_size: size,
            gamma_star_db: None,
            iterations: 0,
            converged: false,
            sinr_spread_rel: None,
            p_peak_rel_gap: None,
            cluster_size_hist: String::new(),
            channel_checksum: checksum.clone(),
            oracle_gamma_rel_gap: None,
            oracle_power_rel_gap: None,
        };

        match solve_max_min(&ch, &lists, &config) {
            Ok(solution) => {
                let mut lowest = f64::INFINITY;
                let mut highest = f64::NEG_INFINITY;
                for user in 0..num_users {
                    let s = sinr_value(&solution.p_star, &ch, user, &solution.clusters[user])?;
                    lowest = lowest.min(s);
                    highest = highest.max(s);
                }
                let peak = solution.p_star.iter().cloned().fold(0.0, f64::max);

                record.gamma_star_db = Some(linear_to_db(solution.gamma_star));
                record.iterations = solution.iterations;
                record.converged = true;
                record.sinr_spread_rel = Some((highest - lowest) / solution.gamma_star);
                record.p_peak_rel_gap = Some(((peak - p_max) / p_max).abs());
                record.cluster_size_hist = size_histogram(&solution.clusters, size);

                if spec.oracle_check && within_budget(&lists, spec.oracle_budget) {
                    let oracle = oracle_max_min(&ch, &lists, p_max, spec.oracle_budget)?;
                    let gamma_gap = ((solution.gamma_star - oracle.gamma_star)
                        / oracle.gamma_star)
                        .abs();
                    let power_gap = solution
                        .p_star
                        .iter()
                        .zip(&oracle.p_star)
                        .map(|(a, b)| (a - b).abs() / p_max)
                        .fold(0.0, f64::max);
                    record.oracle_gamma_rel_gap = Some(gamma_gap);
                    record.oracle_power_rel_gap = Some(power_gap);
                }
            }
            Err(Error::NonConvergence { iterations, .. }) => {
                record.iterations = iterations;
            }
            Err(other) => return Err(other),
        }
        records.push(record);
    }
    Ok(records)
}

/// Runs every trial of the campaign and summarizes the outcome.
///
/// Solver non-convergence is recorded (empty optional columns) and counted,
/// never fatal; configuration and numerical errors abort the campaign.
pub fn run_campaign(spec: &CampaignSpec) -> Result<CampaignOutcome> {
    spec.validate()?;
    let started = Instant::now();
    let combos = spec.combos();

    let per_trial: Vec<Vec<TrialRecord>> = (0..spec.num_trials)
        .into_par_iter()
        .map(|trial| run_trial(spec, &combos, trial))
        .collect::<Result<_>>()?;

    let mut records: Vec<TrialRecord> = per_trial.into_iter().flatten().collect();
    records.sort_by(|a, b| {
        (a.trial, &a.scheme, a.candidate_size).cmp(&(b.trial, &b.scheme, b.candidate_size))
    });

    let summary = Summary::build(spec, &records, started.elapsed().as_secs_f64());
    Ok(CampaignOutcome { records, summary })
}

/// Echo of the resolved campaign configuration, embedded in summaries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignEcho {
    pub setup: String,
    pub schemes: Vec<String>,
    pub candidate_sizes: Vec<usize>,
    pub num_trials: u64,
    pub p_max_dbm: f64,
    pub epsilon: f64,
    pub max_iterations: usize,
    pub oracle_check: bool,
    pub oracle_budget: u64,
    pub allow_uncapped_exhaustive: bool,
    pub network: NetworkEcho,
}

impl From<&CampaignSpec> for CampaignEcho {
    fn from(spec: &CampaignSpec) -> Self {
        CampaignEcho {
            setup: spec.setup.name().to_string(),
            schemes: spec.schemes.iter().map(|s| s.name().to_string()).collect(),
            candidate_sizes: spec.candidate_sizes.clone(),
            num_trials: spec.num_trials,
            p_max_dbm: spec.p_max_dbm,
            epsilon: spec.epsilon,
            max_iterations: spec.max_iterations,
            oracle_check: spec.oracle_check,
            oracle_budget: spec.oracle_budget,
            allow_uncapped_exhaustive: spec.allow_uncapped_exhaustive,
            network: NetworkEcho::from(&spec.network),
        }
    }
}
