//! Max-min SINR power control by normalized fixed-point iteration.
//!
//! With `T_n(p)` the best-cluster interference of user `n` (module
//! [`crate::sinr`]), the max-min problem under a per-user power cap `p_max`
//! is solved by iterating
//!
//! ```text
//! p(t) = p_max / max_n T_n(p(t-1)) * T(p(t-1))
//! ```
//!
//! `T` is positive, monotone, and scales sublinearly, so the normalized
//! iteration converges to the unique fixed point where every user hits the
//! same SINR and at least one user transmits at `p_max`. The common SINR is
//! `p_max / max_n T_n(p*)`, and the per-user minimizing clusters at `p*`
//! are the jointly optimal serving sets.
//!
//! Convergence is declared when one more update would move no component by
//! more than `epsilon` relative to its current value. Each loop evaluates
//! `T` once and reuses it for both the residual and the next update.

use crate::channel::ChannelRealization;
use crate::clustering::ClusterIndicator;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sinr::{affine_tables, best_cluster, AffineInterference};

/// Solver parameters.
#[derive(Debug, Clone)]
pub struct SolverConfig<T> {
    /// Per-user transmit power cap in watts.
    pub p_max: T,
    /// Elementwise relative convergence tolerance.
    pub epsilon: T,
    /// Iteration budget before giving up.
    pub max_iterations: usize,
    /// Starting powers; `None` starts every user at `p_max`.
    pub initial_power: Option<Vec<T>>,
}

impl<T: Scalar> SolverConfig<T> {
    /// Defaults: `epsilon = 1e-8`, `max_iterations = 10_000`, start at cap.
    pub fn new(p_max: T) -> Self {
        Self {
            p_max,
            epsilon: crate::scalar::cast(1e-8),
            max_iterations: 10_000,
            initial_power: None,
        }
    }

    fn validate(&self, num_users: usize) -> Result<()> {
        if !(self.p_max > T::zero()) || !self.p_max.is_finite() {
            return Err(Error::Config("power cap must be positive and finite".into()));
        }
        if !(self.epsilon > T::zero()) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("iteration budget must be positive".into()));
        }
        if let Some(p0) = &self.initial_power {
            if p0.len() != num_users {
                return Err(Error::Config(format!(
                    "{} starting powers for {num_users} users",
                    p0.len()
                )));
            }
            if p0.iter().any(|&p| !(p > T::zero()) || !p.is_finite()) {
                return Err(Error::Config("starting powers must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Joint power and clustering optimum.
#[derive(Debug, Clone)]
pub struct MaxMinSolution<T> {
    /// Optimal transmit powers in watts; the maximum equals the cap.
    pub p_star: Vec<T>,
    /// Per-user serving clusters selected at the optimum.
    pub clusters: Vec<ClusterIndicator>,
    /// The common SINR every user attains.
    pub gamma_star: T,
    /// Work performed: update count for the iterative path, associations
    /// enumerated for the oracle.
    pub iterations: usize,
    /// Relative residual after each update; empty for the oracle.
    pub residual_trace: Vec<T>,
}

/// One normalized update: scales the interference vector so its largest
/// entry lands exactly on the cap.
pub fn scaled_update<T: Scalar>(t_values: &[T], p_max: T) -> Vec<T> {
    let t_max = t_values.iter().fold(T::zero(), |acc, &v| acc.max(v));
    debug_assert!(t_max > T::zero(), "interference values must be positive");
    let scale = p_max / t_max;
    t_values.iter().map(|&t| scale * t).collect()
}

fn evaluate_best_clusters<T: Scalar>(
    tables: &[Vec<AffineInterference<T>>],
    p: &[T],
    t_values: &mut [T],
    picks: &mut [usize],
) {
    for (user, table) in tables.iter().enumerate() {
        let (value, idx) = best_cluster(p, table);
        t_values[user] = value;
        picks[user] = idx;
    }
}

/// Solves the joint problem for the given cluster families.
pub fn solve_max_min<T: Scalar>(
    ch: &ChannelRealization<T>,
    cluster_lists: &[Vec<ClusterIndicator>],
    config: &SolverConfig<T>,
) -> Result<MaxMinSolution<T>> {
    let tables = affine_tables(ch, cluster_lists)?;
    solve_with_tables(&tables, config)
}

/// Solves the joint problem from precomputed affine tables.
pub fn solve_with_tables<T: Scalar>(
    tables: &[Vec<AffineInterference<T>>],
    config: &SolverConfig<T>,
) -> Result<MaxMinSolution<T>> {
    let num_users = tables.len();
    if num_users == 0 {
        return Err(Error::Config("no users to solve for".into()));
    }
    for (user, table) in tables.iter().enumerate() {
        if table.is_empty() {
            return Err(Error::Config(format!("user {user} has no clusters")));
        }
        for coeffs in table {
            if coeffs.cross_gains.len() != num_users {
                return Err(Error::Config(format!(
                    "user {user} has coefficients for {} users, expected {num_users}",
                    coeffs.cross_gains.len()
                )));
            }
        }
    }
    config.validate(num_users)?;

    let mut t_values = vec![T::zero(); num_users];
    let mut picks = vec![0usize; num_users];
    let mut residual_trace = Vec::new();

    // p(1) from the starting point.
    let p0 = config
        .initial_power
        .clone()
        .unwrap_or_else(|| vec![config.p_max; num_users]);
    evaluate_best_clusters(tables, &p0, &mut t_values, &mut picks);
    let mut p = scaled_update(&t_values, config.p_max);

    for iteration in 1..=config.max_iterations {
        evaluate_best_clusters(tables, &p, &mut t_values, &mut picks);
        let p_next = scaled_update(&t_values, config.p_max);

        let mut residual = T::zero();
        for (cur, next) in p.iter().zip(&p_next) {
            residual = residual.max((*cur - *next).abs() / *cur);
        }
        residual_trace.push(residual);

        if residual < config.epsilon {
            let t_max = t_values.iter().fold(T::zero(), |acc, &v| acc.max(v));
            let clusters = tables
                .iter()
                .zip(&picks)
                .map(|(table, &idx)| table[idx].cluster)
                .collect();
            return Ok(MaxMinSolution {
                p_star: p,
                clusters,
                gamma_star: config.p_max / t_max,
                iterations: iteration,
                residual_trace,
            });
        }
        p = p_next;
    }

    Err(Error::NonConvergence {
        iterations: config.max_iterations,
        residual_trace: residual_trace
            .iter()
            .map(|r| r.to_f64().unwrap_or(f64::NAN))
            .collect(),
    })
}
