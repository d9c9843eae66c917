//! Spectral-radius certificate for the joint max-min optimum.
//!
//! For a fixed per-user cluster association `D`, collect the affine
//! interference coefficients into a non-negative matrix `Z(D)` (zero
//! diagonal) and offset vector `o(D)`. Augmenting column `j` with the
//! scaled offsets,
//!
//! ```text
//! Z_j(D) = Z(D) + o(D) e_j^T / p_max,
//! ```
//!
//! the best common SINR under association `D` is `1 / max_j rho(Z_j(D))`,
//! and optimizing the association means minimizing that worst Perron root:
//!
//! ```text
//! gamma* = 1 / min_D max_j rho(Z_j(D)).
//! ```
//!
//! The optimal powers then solve the linear system
//! `(I - gamma* Z(D*)) p = gamma* o(D*)`.
//!
//! This path shares the affine coefficients with the iterative solver but
//! nothing else, so the two act as independent cross-checks. Enumeration
//! walks every association in odometer order (last user's cluster index
//! spins fastest) and is embarrassingly parallel; ties on the worst Perron
//! root keep the earliest association.

use rayon::prelude::*;

use crate::channel::ChannelRealization;
use crate::clustering::ClusterIndicator;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::{cast, Scalar};
use crate::sinr::{affine_tables, AffineInterference};
use crate::solver::MaxMinSolution;

/// Iterations granted to the Rayleigh-quotient power iteration before the
/// root is handed to the certified bisection. Any matrix whose spectral gap
/// exceeds ~1.5% converges well inside this allowance; the rest are the
/// near-imprimitive couplings the bisection exists for.
pub const POWER_ITERATION_LIMIT: usize = 2_000;

/// Relative tolerance between successive Rayleigh-quotient estimates.
pub const POWER_ITERATION_TOL: f64 = 1e-12;

/// Uniform perturbation that makes the iteration matrix strictly positive,
/// hence primitive, so the power iteration cannot cycle.
pub const PRIMITIVITY_JITTER: f64 = 1e-14;

/// Relative bracket width at which the Perron-root bisection stops.
pub const PERRON_BISECTION_TOL: f64 = 1e-13;

/// Safety bound on bisection steps; the bracket reaches 64-bit float
/// resolution long before this.
const PERRON_BISECTION_CAP: usize = 200;

/// Default cap on the number of enumerated associations.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1_000_000;

/// Interference coupling of one fixed association.
#[derive(Debug, Clone)]
pub struct GainMatrix<T> {
    /// Normalized cross gains; row `n` comes from user `n`'s coefficients.
    pub cross_gains: DenseMatrix<T>,
    /// Normalized noise offsets, one per user.
    pub noise_offsets: Vec<T>,
    /// The association the rows were built from.
    pub association: Vec<ClusterIndicator>,
}

impl<T: Scalar> GainMatrix<T> {
    fn from_rows(rows: &[&AffineInterference<T>]) -> Self {
        let n = rows.len();
        let mut cross_gains = DenseMatrix::zeros(n, n);
        let mut noise_offsets = Vec::with_capacity(n);
        let mut association = Vec::with_capacity(n);
        for (user, coeffs) in rows.iter().enumerate() {
            cross_gains.set_row(user, &coeffs.cross_gains);
            noise_offsets.push(coeffs.noise_offset);
            association.push(coeffs.cluster);
        }
        Self {
            cross_gains,
            noise_offsets,
            association,
        }
    }

    pub fn num_users(&self) -> usize {
        self.noise_offsets.len()
    }
}

/// Builds the coupling matrix of one association directly from the channel.
pub fn build_gain_matrix<T: Scalar>(
    ch: &ChannelRealization<T>,
    association: &[ClusterIndicator],
) -> Result<GainMatrix<T>> {
    let lists: Vec<Vec<ClusterIndicator>> = association.iter().map(|c| vec![*c]).collect();
    let tables = affine_tables(ch, &lists)?;
    let rows: Vec<&AffineInterference<T>> = tables.iter().map(|t| &t[0]).collect();
    Ok(GainMatrix::from_rows(&rows))
}

/// The coupling matrix with one column augmented by the scaled noise
/// offsets. Its Perron root caps the SINR achievable while user `column`
/// respects the power limit.
#[derive(Debug, Clone)]
pub struct AugmentedMatrix<T> {
    pub matrix: DenseMatrix<T>,
    pub column: usize,
}

impl<T: Scalar> AugmentedMatrix<T> {
    pub fn new(gain: &GainMatrix<T>, column: usize, p_max: T) -> Self {
        let n = gain.num_users();
        assert!(column < n);
        let mut matrix = gain.cross_gains.clone();
        for row in 0..n {
            let bumped = matrix.get(row, column) + gain.noise_offsets[row] / p_max;
            matrix.set(row, column, bumped);
        }
        Self { matrix, column }
    }
}

/// Perron root of a non-negative square matrix.
///
/// The fast path is a power iteration on `A + jitter * ones`, whose strict
/// positivity guarantees convergence; the jitter (1e-14) is far below every
/// tolerance used on top of this estimate. Successive Rayleigh quotients
/// must agree to `1e-12` relative.
///
/// Near-imprimitive matrices — say two users coupled almost exclusively to
/// each other, giving two dominant eigenvalues of equal modulus and
/// opposite sign — oscillate essentially forever under any power method, so
/// when the iteration fails to settle the root is instead certified by
/// [`perron_bisection`], which terminates unconditionally.
pub fn spectral_radius<T: Scalar>(a: &DenseMatrix<T>) -> Result<T> {
    assert!(a.is_square(), "spectral radius needs a square matrix");
    let n = a.nrows();
    if n == 0 {
        return Err(Error::Config("spectral radius of an empty matrix".into()));
    }
    debug_assert!(
        (0..n).all(|r| a.row(r).iter().all(|&v| v >= T::zero())),
        "matrix must be non-negative"
    );

    let jitter: T = cast(PRIMITIVITY_JITTER);
    // Never ask for agreement finer than the scalar type resolves.
    let tol = cast::<T>(POWER_ITERATION_TOL).max(T::epsilon() * cast(4.0));
    let start = (cast::<T>(n as f64)).sqrt().recip();
    let mut x = vec![start; n];
    let mut y = vec![T::zero(); n];
    let mut estimate = T::zero();

    for iteration in 0..POWER_ITERATION_LIMIT {
        // y = (A + jitter * ones) x, without materializing the jitter.
        let x_sum: T = x.iter().copied().sum();
        a.matvec_into(&x, &mut y);
        for v in y.iter_mut() {
            *v += jitter * x_sum;
        }

        // Rayleigh quotient with ||x|| = 1.
        let mut quotient = T::zero();
        for (&xi, &yi) in x.iter().zip(&y) {
            quotient += xi * yi;
        }

        if iteration > 0 && (quotient - estimate).abs() <= tol * quotient.abs() {
            return Ok(quotient);
        }
        estimate = quotient;

        let norm = y.iter().map(|&v| v * v).sum::<T>().sqrt();
        for (xi, &yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
    }
    perron_bisection(a)
}

/// Perron root by bisection on the subinvariance certificate: for a
/// non-negative matrix `M` and `t > 0`, the system `(tI - M) x = 1` has a
/// strictly positive solution exactly when `t > rho(M)`. A sign check on a
/// linear solve therefore decides every probe, and the row sums of `M`
/// bracket the root from the start.
fn perron_bisection<T: Scalar>(a: &DenseMatrix<T>) -> Result<T> {
    let n = a.nrows();
    let jitter: T = cast(PRIMITIVITY_JITTER);
    let half = cast::<T>(0.5);

    let mut lo = T::infinity();
    let mut hi = T::zero();
    for r in 0..n {
        let sum = a.row(r).iter().copied().sum::<T>() + jitter * cast(n as f64);
        lo = lo.min(sum);
        hi = hi.max(sum);
    }
    if !hi.is_finite() {
        return Err(Error::Numerical(
            "non-finite entries in spectral-radius input".into(),
        ));
    }

    let tol = cast::<T>(PERRON_BISECTION_TOL).max(T::epsilon() * cast(4.0));
    let ones = vec![T::one(); n];
    let mut steps = 0;
    while hi - lo > tol * hi {
        steps += 1;
        if steps > PERRON_BISECTION_CAP {
            return Err(Error::IterationCap {
                limit: PERRON_BISECTION_CAP,
            });
        }
        let mid = (lo + hi) * half;
        let mut system = DenseMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let identity = if r == c { mid } else { T::zero() };
                system.set(r, c, identity - a.get(r, c) - jitter);
            }
        }
        let certified = match system.solve_partial_pivot(&ones) {
            Some(x) => x.iter().all(|&v| v > T::zero()),
            None => false,
        };
        if certified {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo + hi) * half)
}

/// Worst augmented Perron root of one association; the reciprocal of the
/// best common SINR attainable under it.
fn worst_augmented_root<T: Scalar>(gain: &GainMatrix<T>, p_max: T) -> Result<T> {
    let n = gain.num_users();
    let mut worst = T::zero();
    for column in 0..n {
        let augmented = AugmentedMatrix::new(gain, column, p_max);
        worst = worst.max(spectral_radius(&augmented.matrix)?);
    }
    Ok(worst)
}

/// Number of associations (product of family sizes), checked against a cap.
fn association_count(list_sizes: &[usize], budget: u64) -> Result<u64> {
    let mut total: u128 = 1;
    for &size in list_sizes {
        total = total.saturating_mul(size as u128);
        if total > budget as u128 {
            return Err(Error::BudgetExceeded {
                required: total,
                budget,
            });
        }
    }
    Ok(total as u64)
}

/// Decodes an odometer index into per-user cluster choices. The last user's
/// digit advances fastest.
fn decode_association(mut index: u64, list_sizes: &[usize], digits: &mut [usize]) {
    for user in (0..list_sizes.len()).rev() {
        let size = list_sizes[user] as u64;
        digits[user] = (index % size) as usize;
        index /= size;
    }
}

/// Exhaustive max-min certificate over every cluster association.
///
/// Enumerates the full product of the per-user cluster families, scoring
/// each association by its worst augmented Perron root, and reconstructs
/// the optimal powers from the winning association's linear system. Refuses
/// to start when the product exceeds `budget`.
pub fn oracle_max_min<T: Scalar>(
    ch: &ChannelRealization<T>,
    cluster_lists: &[Vec<ClusterIndicator>],
    p_max: T,
    budget: u64,
) -> Result<MaxMinSolution<T>> {
    let tables = affine_tables(ch, cluster_lists)?;
    oracle_with_tables(&tables, p_max, budget)
}

/// Oracle entry point on precomputed affine tables.
pub fn oracle_with_tables<T: Scalar>(
    tables: &[Vec<AffineInterference<T>>],
    p_max: T,
    budget: u64,
) -> Result<MaxMinSolution<T>> {
    let num_users = tables.len();
    if num_users == 0 {
        return Err(Error::Config("no users to solve for".into()));
    }
    if !(p_max > T::zero()) || !p_max.is_finite() {
        return Err(Error::Config("power cap must be positive and finite".into()));
    }
    for (user, table) in tables.iter().enumerate() {
        if table.is_empty() {
            return Err(Error::Config(format!("user {user} has no clusters")));
        }
    }

    let list_sizes: Vec<usize> = tables.iter().map(Vec::len).collect();
    let total = association_count(&list_sizes, budget)?;

    let score_association = |index: u64| -> Result<T> {
        let mut digits = vec![0usize; num_users];
        decode_association(index, &list_sizes, &mut digits);
        let rows: Vec<&AffineInterference<T>> = tables
            .iter()
            .zip(&digits)
            .map(|(table, &d)| &table[d])
            .collect();
        let gain = GainMatrix::from_rows(&rows);
        worst_augmented_root(&gain, p_max)
    };

    // Deterministic parallel argmin: order by (root, index), so exact ties
    // resolve to the earliest association regardless of thread scheduling.
    let best = (0..total)
        .into_par_iter()
        .map(|index| score_association(index).map(|root| (root, index)))
        .try_reduce(
            || (T::infinity(), u64::MAX),
            |a, b| {
                Ok(if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                })
            },
        )?;

    let (worst_root, best_index) = best;
    if !worst_root.is_finite() || !(worst_root > T::zero()) {
        return Err(Error::Numerical(format!(
            "degenerate worst Perron root {worst_root}"
        )));
    }
    let gamma_star = worst_root.recip();

    let mut digits = vec![0usize; num_users];
    decode_association(best_index, &list_sizes, &mut digits);
    let rows: Vec<&AffineInterference<T>> = tables
        .iter()
        .zip(&digits)
        .map(|(table, &d)| &table[d])
        .collect();
    let gain = GainMatrix::from_rows(&rows);

    // The optimum is only meaningful if gamma* Z(D*) is a contraction.
    let plain_root = spectral_radius(&gain.cross_gains)?;
    if !(gamma_star * plain_root < T::one()) {
        return Err(Error::Numerical(format!(
            "gamma* rho(Z) = {} is not below one",
            gamma_star * plain_root
        )));
    }

    let (gamma_star, p_star) = refine_normalization(&gain, p_max, gamma_star)?;

    Ok(MaxMinSolution {
        p_star,
        clusters: gain.association,
        gamma_star,
        iterations: total as usize,
        residual_trace: Vec::new(),
    })
}

/// Powers at a trial SINR target: `p(gamma) = gamma (I - gamma Z)^{-1} o`,
/// or `None` when the target is infeasible — the system is singular or some
/// power comes out non-positive, both of which only happen at or beyond the
/// pole `1/rho(Z)`.
fn power_profile<T: Scalar>(gain: &GainMatrix<T>, gamma: T) -> Option<Vec<T>> {
    let n = gain.num_users();
    let mut system = DenseMatrix::zeros(n, n);
    for row in 0..n {
        for col in 0..n {
            let identity = if row == col { T::one() } else { T::zero() };
            system.set(row, col, identity - gamma * gain.cross_gains.get(row, col));
        }
    }
    let rhs: Vec<T> = gain.noise_offsets.iter().map(|&o| gamma * o).collect();
    let p = system.solve_partial_pivot(&rhs)?;
    if p.iter().all(|&v| v > T::zero() && v.is_finite()) {
        Some(p)
    } else {
        None
    }
}

/// Polishes the SINR target until the recovered powers meet the cap.
///
/// `max_n p_n(gamma)` grows monotonically from zero towards infinity at the
/// pole `1/rho(Z)`, so bisecting on "the cap is exceeded or the solve went
/// infeasible" pins the unique crossing. The Perron-root seed is already
/// within ~1e-12 relative; the point of the polish is that the solve
/// amplifies any seed error by the condition of `(I - gamma Z)` — large by
/// design near the optimum — while the crossing itself is immune to that
/// amplification.
fn refine_normalization<T: Scalar>(
    gain: &GainMatrix<T>,
    p_max: T,
    seed: T,
) -> Result<(T, Vec<T>)> {
    let one = T::one();
    let half = cast::<T>(0.5);
    let too_big = |gamma: T| -> bool {
        match power_profile(gain, gamma) {
            Some(p) => p.iter().cloned().fold(T::zero(), T::max) >= p_max,
            None => true,
        }
    };

    // Bracket the crossing around the seed, doubling the reach as needed.
    let mut width = cast::<T>(1e-9);
    let mut lo = seed * (one - width);
    while too_big(lo) {
        width = width + width;
        if !(width < one) {
            return Err(Error::Numerical(
                "power normalization failed to bracket the cap crossing".into(),
            ));
        }
        lo = seed * (one - width);
    }
    let mut width = cast::<T>(1e-9);
    let mut hi = seed * (one + width);
    while !too_big(hi) {
        width = width + width;
        if !width.is_finite() {
            return Err(Error::Numerical(
                "power normalization failed to bracket the cap crossing".into(),
            ));
        }
        hi = seed * (one + width);
    }

    // Bisect to float resolution; `lo` stays on the feasible side.
    loop {
        let mid = (lo + hi) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        if too_big(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let p = power_profile(gain, lo).ok_or_else(|| {
        Error::Numerical("optimal-power system is numerically singular".into())
    })?;
    Ok((lo, p))
}
