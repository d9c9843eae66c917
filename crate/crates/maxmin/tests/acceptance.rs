//! The acceptance gate: nine numbered criteria covering oracle equivalence,
//! optimality structure, interference-function properties, scheme dominance,
//! the two qualitative campaign reproductions, channel statistics, spectral
//! arithmetic, and reproducibility. Each criterion is one test that prints a
//! single PASS line; the tolerances it enforces are pinned right here.
//!
//! The expensive campaigns are shared across criteria through `OnceLock`,
//! so the whole gate runs each Monte Carlo sweep exactly once.

use std::fs;
use std::process::Command;
use std::sync::OnceLock;

use cellfree_core::channel::{
    build_topology, draw_channel, large_scale_fading, place_users, shadow_fields, substream_rng,
    NetworkConfig, Point2, RngStream,
};
use cellfree_core::clustering::{candidate_set, enumerate_clusters};
use cellfree_core::linalg::DenseMatrix;
use cellfree_core::sinr::{affine_tables, best_cluster, AffineInterference};
use cellfree_core::spectral::spectral_radius;
use cellfree_core::units::{db_to_linear, dbm_to_watts};
use cellfree_core::{NetworkConfig64, SchemeId};
use cellfree_maxmin::campaign::{run_campaign, CampaignOutcome, CampaignSpec, TrialRecord};
use cellfree_maxmin::setups::{area_matched_spacing, SetupId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Pinned tolerances and sample counts, one block per criterion.

/// 1: relative agreement between the fixed-point solver and the spectral
/// oracle, in the max-min SINR and in every per-user power.
const ORACLE_REL_TOL: f64 = 1e-6;
const ORACLE_TRIALS: u64 = 100;
const ORACLE_EXHAUSTIVE_TRIALS: u64 = 20;

/// 2: equal-SINR spread relative to gamma*, and the relative gap between the
/// peak power and the budget, on every solved instance of every campaign.
const SINR_SPREAD_REL_TOL: f64 = 1e-4;
const PEAK_POWER_REL_TOL: f64 = 1e-10;

/// 3: randomized samples of the interference-function properties.
const PROPERTY_SAMPLES: usize = 10_000;

/// 4: per-trial scheme dominance slack (relative, on linear SINR).
const DOMINANCE_REL_SLACK: f64 = 1e-10;

/// 7: channel-statistics tolerances.
const CHANNEL_POWER_DRAWS: usize = 100_000;
const CHANNEL_POWER_REL_TOL: f64 = 0.02;
const SHADOW_COV_REL_TOL: f64 = 0.05;
const SHADOW_FIELD_DRAWS: usize = 4_000;
const CROSS_AP_SE_FACTOR: f64 = 3.0;

/// 8: spectral arithmetic and Perron-bound samples.
const SPECTRAL_EXAMPLE_TOL: f64 = 1e-10;
const PERRON_BOUND_MATRICES: usize = 1_000;
const PERRON_BOUND_REL_SLACK: f64 = 1e-9;
const PERRON_BOUND_ABS_SLACK: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Shared campaigns.

/// The oracle-comparison network: a 3x3 grid, 4 antennas per AP, 6 users,
/// candidate sets of 3, at a 30 dBm budget.
fn oracle_network() -> NetworkConfig64 {
    let spacing = area_matched_spacing(9).unwrap();
    let mut network = NetworkConfig64::new(9, 4, 6, spacing);
    network.rng_seed = 1001;
    network
}

fn oracle_campaign(schemes: Vec<SchemeId>, num_trials: u64) -> CampaignOutcome {
    let spec = CampaignSpec {
        setup: SetupId::Custom,
        network: oracle_network(),
        schemes,
        candidate_sizes: vec![3],
        num_trials,
        p_max_dbm: 30.0,
        epsilon: 1e-10,
        max_iterations: 1_000_000,
        oracle_check: true,
        oracle_budget: 1_000_000,
        allow_uncapped_exhaustive: false,
    };
    run_campaign(&spec).expect("oracle campaign failed")
}

/// Fixed and add-AP schemes, oracle-checked on every trial. The exhaustive
/// scheme enumerates 7^6 associations per instance, so its oracle runs on a
/// shorter prefix of the same seeded trials (identical channels per trial).
fn oracle_fixed_add() -> &'static CampaignOutcome {
    static OUTCOME: OnceLock<CampaignOutcome> = OnceLock::new();
    OUTCOME.get_or_init(|| oracle_campaign(vec![SchemeId::Fixed, SchemeId::AddAp], ORACLE_TRIALS))
}

fn oracle_exhaustive() -> &'static CampaignOutcome {
    static OUTCOME: OnceLock<CampaignOutcome> = OnceLock::new();
    OUTCOME.get_or_init(|| oracle_campaign(vec![SchemeId::Exhaustive], ORACLE_EXHAUSTIVE_TRIALS))
}

/// A sweep campaign: the named setup with 58 users, 200 trials at 20 dBm,
/// all three schemes. Epsilon is tightened well below the dominance slack so
/// per-trial orderings are not blurred by solver tolerance.
fn sweep_campaign(setup: SetupId, candidate_sizes: Vec<usize>) -> CampaignOutcome {
    let mut spec = CampaignSpec::for_setup(setup, 42);
    spec.candidate_sizes = candidate_sizes;
    spec.epsilon = 1e-11;
    spec.max_iterations = 500_000;
    run_campaign(&spec).unwrap_or_else(|e| panic!("campaign on setup {setup} failed: {e}"))
}

/// Candidate sizes 1..3 on the 36-AP setup.
fn size_sweep() -> &'static CampaignOutcome {
    static OUTCOME: OnceLock<CampaignOutcome> = OnceLock::new();
    OUTCOME.get_or_init(|| sweep_campaign(SetupId::II, vec![1, 2, 3]))
}

/// The three named setups, each at its own candidate size.
fn setup_sweep() -> &'static Vec<CampaignOutcome> {
    static OUTCOMES: OnceLock<Vec<CampaignOutcome>> = OnceLock::new();
    OUTCOMES.get_or_init(|| {
        SetupId::ALL
            .iter()
            .map(|&setup| {
                let size = setup.params().unwrap().candidate_size;
                sweep_campaign(setup, vec![size])
            })
            .collect()
    })
}

fn all_campaigns() -> Vec<&'static CampaignOutcome> {
    let mut campaigns = vec![oracle_fixed_add(), oracle_exhaustive(), size_sweep()];
    campaigns.extend(setup_sweep().iter());
    campaigns
}

fn record_for<'a>(
    records: &'a [TrialRecord],
    trial: u64,
    scheme: SchemeId,
    size: usize,
) -> &'a TrialRecord {
    records
        .iter()
        .find(|r| r.trial == trial && r.scheme == scheme.name() && r.candidate_size == size)
        .unwrap_or_else(|| panic!("no record for trial {trial}, {scheme:?}, size {size}"))
}

fn gamma_linear(record: &TrialRecord) -> f64 {
    let db = record
        .gamma_star_db
        .unwrap_or_else(|| panic!("trial {} did not converge", record.trial));
    db_to_linear(db)
}

fn median_db(outcome: &CampaignOutcome, setup: &str, scheme: SchemeId, size: usize) -> f64 {
    outcome
        .summary
        .group(setup, scheme.name(), size)
        .and_then(|g| g.median_db)
        .unwrap_or_else(|| panic!("no median for {setup}/{scheme:?}/{size}"))
}

// ---------------------------------------------------------------------------
// Criteria.

#[test]
fn criterion_1_solver_matches_the_spectral_oracle() {
    let mut checked = 0usize;
    let mut worst_gamma = 0f64;
    let mut worst_power = 0f64;

    for outcome in [oracle_fixed_add(), oracle_exhaustive()] {
        for record in &outcome.records {
            assert!(record.converged, "oracle trial {} unconverged", record.trial);
            let gamma_gap = record
                .oracle_gamma_rel_gap
                .expect("oracle cross-check was skipped");
            let power_gap = record
                .oracle_power_rel_gap
                .expect("oracle cross-check was skipped");
            assert!(
                gamma_gap < ORACLE_REL_TOL,
                "trial {} {}: gamma gap {gamma_gap:e}",
                record.trial,
                record.scheme
            );
            assert!(
                power_gap < ORACLE_REL_TOL,
                "trial {} {}: power gap {power_gap:e}",
                record.trial,
                record.scheme
            );
            worst_gamma = worst_gamma.max(gamma_gap);
            worst_power = worst_power.max(power_gap);
            checked += 1;
        }
    }

    assert_eq!(checked, (2 * ORACLE_TRIALS + ORACLE_EXHAUSTIVE_TRIALS) as usize);
    println!(
        "criterion 1 PASS: solver and oracle agree on {checked} records \
         (worst gamma gap {worst_gamma:.2e}, worst power gap {worst_power:.2e}, tol {ORACLE_REL_TOL:.0e})"
    );
}

#[test]
fn criterion_2_solutions_are_equal_sinr_at_full_peak_power() {
    let mut solved = 0usize;
    let mut worst_spread = 0f64;
    let mut worst_peak = 0f64;

    for outcome in all_campaigns() {
        for record in &outcome.records {
            if !record.converged {
                continue;
            }
            let spread = record.sinr_spread_rel.unwrap();
            let peak = record.p_peak_rel_gap.unwrap();
            assert!(
                spread < SINR_SPREAD_REL_TOL,
                "trial {} {} size {}: SINR spread {spread:e}",
                record.trial,
                record.scheme,
                record.candidate_size
            );
            assert!(
                peak <= PEAK_POWER_REL_TOL,
                "trial {} {} size {}: peak-power gap {peak:e}",
                record.trial,
                record.scheme,
                record.candidate_size
            );
            worst_spread = worst_spread.max(spread);
            worst_peak = worst_peak.max(peak);
            solved += 1;
        }
    }

    assert!(solved > 2_000, "only {solved} solved records to inspect");
    println!(
        "criterion 2 PASS: {solved} solved instances show equal SINRs \
         (worst spread {worst_spread:.2e} < {SINR_SPREAD_REL_TOL:.0e}) \
         and a full-power user (worst peak gap {worst_peak:.2e} <= {PEAK_POWER_REL_TOL:.0e})"
    );
}

/// Affine tables for one sampling instance, rescaled per user so that
/// `T_n(p_max * 1) = 1`; positive rescaling preserves every property under
/// test while pinning the scale that the absolute slacks assume.
fn normalized_tables(trial: u64) -> (Vec<Vec<AffineInterference<f64>>>, f64) {
    const USERS: usize = 4;
    let cfg: NetworkConfig<f64> = NetworkConfig::new(9, 2, USERS, 100.0);
    let (instance, ch) = cellfree_core::channel::generate_instance(&cfg, trial).unwrap();
    let lists: Vec<_> = (0..USERS)
        .map(|user| {
            let cand = candidate_set(&instance.gains, user, 3).unwrap();
            enumerate_clusters(&cand, SchemeId::Exhaustive)
        })
        .collect();
    let mut tables = affine_tables(&ch, &lists).unwrap();

    let p_max = dbm_to_watts(20.0);
    let full_power = vec![p_max; USERS];
    for table in tables.iter_mut() {
        let (scale, _) = best_cluster(&full_power, table);
        for coeffs in table.iter_mut() {
            for z in coeffs.cross_gains.iter_mut() {
                *z /= scale;
            }
            coeffs.noise_offset /= scale;
        }
    }
    (tables, p_max)
}

#[test]
fn criterion_3_interference_function_property_sweep() {
    const INSTANCES: u64 = 200;
    const SAMPLES_PER_INSTANCE: usize = 50;
    const STRICTNESS_FLOOR: f64 = 1e-13;
    const CONCAVITY_SLACK: f64 = 1e-12;

    let mut rng = ChaCha8Rng::seed_from_u64(301);
    let mut samples = 0usize;
    let mut failures: Vec<String> = Vec::new();
    let mut check = |ok: bool, message: String| {
        if !ok {
            failures.push(message);
        }
    };

    for instance in 0..INSTANCES {
        let (tables, p_max) = normalized_tables(instance);
        let users = tables.len();
        for _ in 0..SAMPLES_PER_INSTANCE {
            let p: Vec<f64> = (0..users).map(|_| rng.gen_range(0.0..p_max)).collect();
            let q: Vec<f64> = (0..users).map(|_| rng.gen_range(0.0..p_max)).collect();
            let alpha = rng.gen_range(1.05..3.0);
            let theta = rng.gen_range(0.05..0.95);
            let user = rng.gen_range(0..users);
            samples += 1;

            let shrunk: Vec<f64> = p.iter().map(|&x| x * rng.gen_range(0.0..1.0)).collect();
            let scaled: Vec<f64> = p.iter().map(|&x| alpha * x).collect();
            let mixed: Vec<f64> = p
                .iter()
                .zip(&q)
                .map(|(&a, &b)| theta * a + (1.0 - theta) * b)
                .collect();

            for (n, table) in tables.iter().enumerate() {
                let (t, _) = best_cluster(&p, table);

                // Positivity.
                check(t > 0.0, format!("instance {instance}: T_{n} = {t:e}"));

                // Monotonicity under a componentwise shrink.
                let (t_small, _) = best_cluster(&shrunk, table);
                check(
                    t_small <= t + STRICTNESS_FLOOR,
                    format!("instance {instance}: T_{n} rose under smaller powers"),
                );

                // Scalability, strict once the guaranteed margin
                // (alpha - 1) * sigma^2 of the winning cluster is resolvable.
                let (t_scaled, winner) = best_cluster(&scaled, table);
                let margin = alpha * t - t_scaled;
                let guaranteed = (alpha - 1.0) * table[winner].noise_offset;
                check(
                    if guaranteed > STRICTNESS_FLOOR {
                        margin > 0.0
                    } else {
                        margin > -STRICTNESS_FLOOR
                    },
                    format!("instance {instance}: scalability margin {margin:e} for T_{n}"),
                );

                // Concavity along the sampled chord.
                let (t_mixed, _) = best_cluster(&mixed, table);
                let (t_q, _) = best_cluster(&q, table);
                let chord = theta * t + (1.0 - theta) * t_q;
                check(
                    t_mixed >= chord - CONCAVITY_SLACK,
                    format!("instance {instance}: T_{n}(mix) {t_mixed:e} < chord {chord:e}"),
                );
            }

            // Utility behaviour of SINR_n = p_n / T_n(p).
            let table = &tables[user];
            let mut zeroed = p.clone();
            zeroed[user] = 0.0;
            check(
                zeroed[user] / best_cluster(&zeroed, table).0 == 0.0,
                format!("instance {instance}: SINR positive at zero power"),
            );

            let mut active = p.clone();
            active[user] = rng.gen_range(0.01..1.0) * p_max;
            let base = active[user] / best_cluster(&active, table).0;
            check(base > 0.0, format!("instance {instance}: SINR not positive"));

            let mut own_up = active.clone();
            own_up[user] *= 1.25;
            let raised = own_up[user] / best_cluster(&own_up, table).0;
            check(
                raised > base,
                format!("instance {instance}: own-power raise lowered SINR"),
            );

            let other = (user + 1 + rng.gen_range(0..users - 1)) % users;
            let mut other_up = active.clone();
            other_up[other] = p_max.min(other_up[other] * 1.5 + 0.01 * p_max);
            let (t_after, winner) = best_cluster(&other_up, table);
            let squeezed = active[user] / t_after;
            let added = table[winner].cross_gains[other] * (other_up[other] - active[other]);
            check(
                if added > STRICTNESS_FLOOR {
                    squeezed < base
                } else {
                    squeezed <= base * (1.0 + 1e-12)
                },
                format!("instance {instance}: interference raise lifted SINR"),
            );

            let rescaled: Vec<f64> = active.iter().map(|&x| alpha * x).collect();
            let (t_rescaled, winner) = best_cluster(&rescaled, table);
            let lifted = rescaled[user] / t_rescaled;
            let guaranteed = (alpha - 1.0) * table[winner].noise_offset;
            check(
                if guaranteed > STRICTNESS_FLOOR {
                    lifted > base
                } else {
                    lifted >= base * (1.0 - 1e-12)
                },
                format!("instance {instance}: uniform power raise lowered SINR"),
            );
        }
    }

    assert_eq!(samples, PROPERTY_SAMPLES);
    assert!(
        failures.is_empty(),
        "{} of {samples} samples failed; first: {}",
        failures.len(),
        failures[0]
    );
    println!(
        "criterion 3 PASS: {samples} randomized samples of positivity, monotonicity, \
         scalability, concavity, and utility behaviour, zero failures"
    );
}

#[test]
fn criterion_4_scheme_dominance_on_every_paired_trial() {
    let mut pairs = 0usize;
    let dominates = |hi: &TrialRecord, lo: &TrialRecord| {
        assert_eq!(hi.channel_checksum, lo.channel_checksum, "unpaired trial");
        let (hi_gamma, lo_gamma) = (gamma_linear(hi), gamma_linear(lo));
        assert!(
            hi_gamma >= lo_gamma * (1.0 - DOMINANCE_REL_SLACK),
            "trial {} size {}: {} ({hi_gamma:e}) below {} ({lo_gamma:e})",
            hi.trial,
            hi.candidate_size,
            hi.scheme,
            lo.scheme
        );
    };

    // Candidate sizes 1..3 on the 36-AP setup: the three families are nested
    // at equal size, so the full chain must hold on every single trial.
    let outcome = size_sweep();
    for trial in 0..outcome.summary.config.num_trials {
        for size in [1, 2, 3] {
            let fixed = record_for(&outcome.records, trial, SchemeId::Fixed, size);
            let add = record_for(&outcome.records, trial, SchemeId::AddAp, size);
            let ex = record_for(&outcome.records, trial, SchemeId::Exhaustive, size);
            dominates(ex, add);
            dominates(add, fixed);
            pairs += 2;
        }
    }

    // The named setups. Setup III requests candidate sets of 8; the
    // exhaustive scheme caps them at 5, which breaks the family nesting
    // against the size-8 schemes, so only add-AP over fixed is asserted
    // per-trial there.
    for outcome in setup_sweep() {
        let trials = outcome.summary.config.num_trials;
        let size = outcome.summary.config.candidate_sizes[0];
        let capped = cellfree_core::clustering::capped_candidate_size(
            SchemeId::Exhaustive,
            size,
            false,
        );
        for trial in 0..trials {
            let fixed = record_for(&outcome.records, trial, SchemeId::Fixed, size);
            let add = record_for(&outcome.records, trial, SchemeId::AddAp, size);
            dominates(add, fixed);
            pairs += 1;
            if capped == size {
                let ex = record_for(&outcome.records, trial, SchemeId::Exhaustive, capped);
                dominates(ex, add);
                pairs += 1;
            }
        }
    }

    // The oracle campaigns share seeded channels trial for trial, giving a
    // third chain at 30 dBm on the exhaustive prefix.
    let fixed_add = oracle_fixed_add();
    let exhaustive = oracle_exhaustive();
    for trial in 0..ORACLE_EXHAUSTIVE_TRIALS {
        let fixed = record_for(&fixed_add.records, trial, SchemeId::Fixed, 3);
        let add = record_for(&fixed_add.records, trial, SchemeId::AddAp, 3);
        let ex = record_for(&exhaustive.records, trial, SchemeId::Exhaustive, 3);
        dominates(ex, add);
        dominates(add, fixed);
        pairs += 2;
    }

    println!(
        "criterion 4 PASS: exhaustive >= add-AP >= fixed on {pairs} paired comparisons \
         (relative slack {DOMINANCE_REL_SLACK:.0e})"
    );
}

#[test]
fn criterion_5_candidate_size_and_scheme_orderings() {
    let outcome = size_sweep();
    let setup = SetupId::II.name();

    for scheme in SchemeId::ALL {
        let medians: Vec<f64> = (1..=3)
            .map(|size| median_db(outcome, setup, scheme, size))
            .collect();
        assert!(
            medians[0] < medians[1] && medians[1] < medians[2],
            "{scheme:?}: medians {medians:?} not increasing in candidate size"
        );
    }

    let fixed = median_db(outcome, setup, SchemeId::Fixed, 3);
    let add = median_db(outcome, setup, SchemeId::AddAp, 3);
    let ex = median_db(outcome, setup, SchemeId::Exhaustive, 3);
    assert!(
        ex > add && add > fixed,
        "size-3 medians not ordered: ex {ex}, add {add}, fixed {fixed}"
    );

    println!(
        "criterion 5 PASS: medians rise with candidate size for all schemes; \
         at size 3: exhaustive {ex:.2} dB > add {add:.2} dB > fixed {fixed:.2} dB"
    );
}

#[test]
fn criterion_6_setup_orderings_across_the_named_grids() {
    let campaigns = setup_sweep();
    let ex_i = median_db(&campaigns[0], "I", SchemeId::Exhaustive, 1);
    let ex_iii = median_db(&campaigns[2], "III", SchemeId::Exhaustive, 5);
    let fixed_i = median_db(&campaigns[0], "I", SchemeId::Fixed, 1);
    let fixed_iii = median_db(&campaigns[2], "III", SchemeId::Fixed, 8);

    assert!(
        ex_iii > ex_i,
        "exhaustive median did not improve: setup III {ex_iii} dB vs setup I {ex_i} dB"
    );
    assert!(
        fixed_i > fixed_iii,
        "fixed median did not degrade: setup I {fixed_i} dB vs setup III {fixed_iii} dB"
    );

    println!(
        "criterion 6 PASS: exhaustive median {ex_iii:.2} dB (setup III) > {ex_i:.2} dB (setup I); \
         fixed median {fixed_i:.2} dB (setup I) > {fixed_iii:.2} dB (setup III)"
    );
}

#[test]
fn criterion_7_channel_statistics_match_the_model() {
    // Per-entry power: with the large-scale gains frozen, the average of
    // |h|^2 over many small-scale draws must match each link gain.
    let cfg: NetworkConfig<f64> = NetworkConfig::new(4, 2, 3, 100.0);
    let topology = build_topology(&cfg).unwrap();
    let mut rng = substream_rng(7, 0, RngStream::UserPositions);
    let users = place_users(&topology, &cfg, &mut rng);
    let mut rng = substream_rng(7, 0, RngStream::Shadowing);
    let gains = large_scale_fading(&topology, &users, &cfg, &mut rng).unwrap();

    let dims = cfg.num_aps * cfg.antennas_per_ap;
    let mut power_sums = vec![vec![0f64; dims]; cfg.num_users];
    let mut rng = substream_rng(7, 0, RngStream::Fading);
    for _ in 0..CHANNEL_POWER_DRAWS {
        let ch = draw_channel(&gains, &cfg, &mut rng);
        for (user, sums) in power_sums.iter_mut().enumerate() {
            for (sum, h) in sums.iter_mut().zip(ch.user(user)) {
                *sum += h.norm_sqr();
            }
        }
    }
    let mut worst_power_err = 0f64;
    for (user, sums) in power_sums.iter().enumerate() {
        for (dim, sum) in sums.iter().enumerate() {
            let expected = gains.get(dim / cfg.antennas_per_ap, user);
            let rel = (sum / CHANNEL_POWER_DRAWS as f64 - expected).abs() / expected;
            assert!(
                rel < CHANNEL_POWER_REL_TOL,
                "user {user} dim {dim}: channel power off by {rel:.4}"
            );
            worst_power_err = worst_power_err.max(rel);
        }
    }

    // Shadow covariance: users pinned at pairwise distances 0, 9, and 27 m
    // from the first; each AP row of the field is an independent draw, so
    // rows accumulate covariance samples.
    let mut shadow_cfg: NetworkConfig<f64> = NetworkConfig::new(100, 1, 4, 100.0);
    shadow_cfg.rng_seed = 11;
    let pinned = [
        Point2::new(0.0, 0.0),
        Point2::new(0.0, 0.0),
        Point2::new(9.0, 0.0),
        Point2::new(27.0, 0.0),
    ];
    let variance = shadow_cfg.shadow_std_db * shadow_cfg.shadow_std_db;
    let half_distance = shadow_cfg.shadow_decorrelation_distance;

    let mut rng = substream_rng(11, 0, RngStream::Shadowing);
    let mut pair_sums = [0f64; 3];
    let mut cross_sum = 0f64;
    let mut cross_sq = 0f64;
    let mut cross_count = 0usize;
    for _ in 0..SHADOW_FIELD_DRAWS {
        let fields = shadow_fields(&pinned, &shadow_cfg, &mut rng).unwrap();
        for ap in 0..shadow_cfg.num_aps {
            let row = fields.row(ap);
            pair_sums[0] += row[0] * row[1];
            pair_sums[1] += row[0] * row[2];
            pair_sums[2] += row[0] * row[3];
        }
        // Disjoint AP pairs keep the independence samples independent too.
        for pair in 0..shadow_cfg.num_aps / 2 {
            for user in 0..pinned.len() {
                let product = fields.get(2 * pair, user) * fields.get(2 * pair + 1, user);
                cross_sum += product;
                cross_sq += product * product;
                cross_count += 1;
            }
        }
    }

    let rows = (SHADOW_FIELD_DRAWS * shadow_cfg.num_aps) as f64;
    let mut worst_shadow_err = 0f64;
    for (slot, &delta) in [0.0, 9.0, 27.0].iter().enumerate() {
        let expected = variance * 2f64.powf(-delta / half_distance);
        let rel = (pair_sums[slot] / rows - expected).abs() / expected;
        assert!(
            rel < SHADOW_COV_REL_TOL,
            "shadow covariance at {delta} m off by {rel:.4}"
        );
        worst_shadow_err = worst_shadow_err.max(rel);
    }

    let cross_mean = cross_sum / cross_count as f64;
    let cross_var = cross_sq / cross_count as f64 - cross_mean * cross_mean;
    let cross_se = (cross_var / cross_count as f64).sqrt();
    assert!(
        cross_mean.abs() <= CROSS_AP_SE_FACTOR * cross_se,
        "cross-AP shadow covariance {cross_mean:e} exceeds {CROSS_AP_SE_FACTOR} x SE {cross_se:e}"
    );

    println!(
        "criterion 7 PASS: channel power within {worst_power_err:.4} of the link gains \
         (tol {CHANNEL_POWER_REL_TOL}), shadow covariance within {worst_shadow_err:.4} \
         at 0/9/27 m (tol {SHADOW_COV_REL_TOL}), cross-AP covariance {cross_mean:.1e} \
         within {CROSS_AP_SE_FACTOR} standard errors ({cross_se:.1e})"
    );
}

#[test]
fn criterion_8_spectral_radius_arithmetic_and_bounds() {
    // Hand-checked Perron roots.
    let examples: [(Vec<Vec<f64>>, f64); 3] = [
        (vec![vec![2.0]], 2.0),
        (vec![vec![0.0, 1.0], vec![1.0, 0.0]], 1.0),
        (
            vec![vec![1.0, 2.0], vec![3.0, 4.0]],
            (5.0 + 33f64.sqrt()) / 2.0,
        ),
    ];
    for (rows, expected) in &examples {
        let rho = spectral_radius(&DenseMatrix::from_rows(rows)).unwrap();
        assert!(
            (rho - expected).abs() < SPECTRAL_EXAMPLE_TOL,
            "rho {rho} vs {expected}"
        );
    }

    // Collatz-Wielandt bounds: for y > 0 with A y <= lambda y elementwise,
    // rho(A) <= lambda; for x > 0 with mu x <= A x, mu <= rho(A). Both
    // certificates are built by taking the extreme ratio, so they are tight
    // whenever the chosen vector happens to be the Perron vector; the slack
    // only absorbs the regularization bias of the radius estimate.
    let mut rng = ChaCha8Rng::seed_from_u64(801);
    for matrix in 0..PERRON_BOUND_MATRICES {
        let n = 2 + matrix % 7;
        let mut a = DenseMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if rng.gen_range(0.0..1.0) > 0.3 {
                    a.set(i, j, rng.gen_range(0.0..2.0));
                }
            }
        }
        let rho = spectral_radius(&a).unwrap();

        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
        let ay = a.matvec(&y);
        let lambda = ay
            .iter()
            .zip(&y)
            .map(|(num, den)| num / den)
            .fold(0f64, f64::max);
        assert!(
            rho <= lambda * (1.0 + PERRON_BOUND_REL_SLACK) + PERRON_BOUND_ABS_SLACK,
            "matrix {matrix}: rho {rho:e} above upper bound {lambda:e}"
        );

        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
        let ax = a.matvec(&x);
        let mu = ax
            .iter()
            .zip(&x)
            .map(|(num, den)| num / den)
            .fold(f64::INFINITY, f64::min);
        assert!(
            mu <= rho * (1.0 + PERRON_BOUND_REL_SLACK) + PERRON_BOUND_ABS_SLACK,
            "matrix {matrix}: rho {rho:e} below lower bound {mu:e}"
        );
    }

    println!(
        "criterion 8 PASS: 3 hand-checked Perron roots to {SPECTRAL_EXAMPLE_TOL:.0e}; \
         Collatz-Wielandt bounds hold on {PERRON_BOUND_MATRICES} random non-negative matrices"
    );
}

#[test]
fn criterion_9_identical_seeds_give_byte_identical_output() {
    let run = |dir: &std::path::Path| {
        let output = Command::new(env!("CARGO_BIN_EXE_cellfree-maxmin"))
            .args([
                "run",
                "--setup",
                "II",
                "--users",
                "6",
                "--trials",
                "10",
                "--candidate-size",
                "3",
                "--seed",
                "987",
                "--out",
                dir.to_str().unwrap(),
            ])
            .output()
            .expect("failed to run the binary");
        assert!(
            output.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&output.stderr)
        );
        fs::read(dir.join("trials.csv")).unwrap()
    };

    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let bytes_a = run(dir_a.path());
    let bytes_b = run(dir_b.path());
    assert_eq!(bytes_a, bytes_b, "reruns with the same seed diverged");

    println!(
        "criterion 9 PASS: two seeded runs produced byte-identical trials.csv ({} bytes)",
        bytes_a.len()
    );
}
