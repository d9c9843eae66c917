//! Uplink SINR under maximum-ratio combining with cluster masks.
//!
//! With user `n` served by the AP set `D`, the combiner only sees the
//! antennas of member APs, so every quantity reduces to masked inner
//! products `h_n^H D h_i` over the stacked channel vectors. The received
//! SINR is
//!
//! ```text
//!          p_n |h_n^H D h_n|^2
//! ---------------------------------------------
//! sum_{i != n} p_i |h_n^H D h_i|^2 + s^2 h_n^H D h_n
//! ```
//!
//! Dividing through by `|h_n^H D h_n|^2` rewrites the denominator as an
//! affine function of the transmit powers, `z^T p + o`, which this module
//! precomputes per (user, cluster). The per-user interference under the
//! best cluster choice, `min` over the cluster family of those affine
//! functions, is what the max-min solver iterates on: as a pointwise
//! minimum of affine maps it is concave and monotone in `p`.

use num_complex::Complex;

use crate::channel::ChannelRealization;
use crate::clustering::ClusterIndicator;
use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};

/// Transmit powers in watts, one entry per user.
pub type PowerVector<T> = Vec<T>;

/// Below this value the masked signal power `h^H D h` counts as degenerate;
/// the affine normalization would divide by (numerically) nothing.
pub const DEGENERATE_SIGNAL_FLOOR: f64 = 1e-30;

/// Affine expansion of one user's interference-plus-noise under one cluster:
/// `I(p) = cross_gains^T p + noise_offset`, normalized by the cluster's
/// signal gain. `cross_gains[user]` is zero by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineInterference<T> {
    pub user: usize,
    pub cluster: ClusterIndicator,
    pub cross_gains: Vec<T>,
    pub noise_offset: T,
}

/// Masked inner product `h_n^H D h_i`: the sum over the cluster's AP blocks
/// of the per-antenna conjugated products.
pub fn effective_inner<T: Scalar>(
    h_n: &[Complex<T>],
    h_i: &[Complex<T>],
    cluster: &ClusterIndicator,
    antennas_per_ap: usize,
) -> Complex<T> {
    debug_assert_eq!(h_n.len(), h_i.len());
    let mut acc = Complex::new(T::zero(), T::zero());
    for ap in cluster.ap_indices() {
        let start = ap * antennas_per_ap;
        for k in 0..antennas_per_ap {
            acc = acc + h_n[start + k].conj() * h_i[start + k];
        }
    }
    acc
}

/// Per-AP inner products of one user's channel against every user:
/// entry `ap * num_users + i` holds `h_user^H h_i` restricted to that AP.
/// Cluster sums then reduce to adding a few of these.
fn per_ap_inner<T: Scalar>(ch: &ChannelRealization<T>, user: usize) -> Vec<Complex<T>> {
    let num_aps = ch.num_aps();
    let num_users = ch.num_users();
    let k = ch.antennas_per_ap();
    let h_n = ch.user(user);

    let mut w = vec![Complex::new(T::zero(), T::zero()); num_aps * num_users];
    for i in 0..num_users {
        let h_i = ch.user(i);
        for ap in 0..num_aps {
            let start = ap * k;
            let mut acc = Complex::new(T::zero(), T::zero());
            for idx in start..start + k {
                acc = acc + h_n[idx].conj() * h_i[idx];
            }
            w[ap * num_users + i] = acc;
        }
    }
    w
}

fn coeffs_from_inner<T: Scalar>(
    w: &[Complex<T>],
    num_users: usize,
    noise_power: T,
    user: usize,
    cluster: &ClusterIndicator,
) -> Result<AffineInterference<T>> {
    // The self inner product is real by construction; its imaginary part is
    // exactly zero in floating point as well.
    let mut own = T::zero();
    for ap in cluster.ap_indices() {
        own += w[ap * num_users + user].re;
    }
    if !(own >= cast(DEGENERATE_SIGNAL_FLOOR)) {
        return Err(Error::DegenerateChannel {
            user,
            value: own.to_f64().unwrap_or(f64::NAN),
        });
    }

    let own_sq = own * own;
    let mut cross_gains = vec![T::zero(); num_users];
    for (i, gain) in cross_gains.iter_mut().enumerate() {
        if i == user {
            continue;
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for ap in cluster.ap_indices() {
            acc = acc + w[ap * num_users + i];
        }
        *gain = acc.norm_sqr() / own_sq;
    }

    Ok(AffineInterference {
        user,
        cluster: *cluster,
        cross_gains,
        noise_offset: noise_power / own,
    })
}

/// Affine interference coefficients for one (user, cluster) pair.
pub fn affine_coeffs<T: Scalar>(
    ch: &ChannelRealization<T>,
    user: usize,
    cluster: &ClusterIndicator,
) -> Result<AffineInterference<T>> {
    let w = per_ap_inner(ch, user);
    coeffs_from_inner(&w, ch.num_users(), ch.noise_power(), user, cluster)
}

/// Affine coefficients for every cluster in one user's family, sharing the
/// per-AP inner products across the clusters.
pub fn affine_table_for_user<T: Scalar>(
    ch: &ChannelRealization<T>,
    user: usize,
    clusters: &[ClusterIndicator],
) -> Result<Vec<AffineInterference<T>>> {
    let w = per_ap_inner(ch, user);
    clusters
        .iter()
        .map(|c| coeffs_from_inner(&w, ch.num_users(), ch.noise_power(), user, c))
        .collect()
}

/// Affine coefficient tables for all users at once. `cluster_lists[n]` is
/// user `n`'s cluster family; the result keeps both orderings.
pub fn affine_tables<T: Scalar>(
    ch: &ChannelRealization<T>,
    cluster_lists: &[Vec<ClusterIndicator>],
) -> Result<Vec<Vec<AffineInterference<T>>>> {
    if cluster_lists.len() != ch.num_users() {
        return Err(Error::Config(format!(
            "{} cluster lists for {} users",
            cluster_lists.len(),
            ch.num_users()
        )));
    }
    cluster_lists
        .iter()
        .enumerate()
        .map(|(user, clusters)| {
            if clusters.is_empty() {
                return Err(Error::Config(format!("user {user} has no clusters")));
            }
            affine_table_for_user(ch, user, clusters)
        })
        .collect()
}

/// Normalized interference-plus-noise `cross_gains^T p + noise_offset`.
pub fn interference<T: Scalar>(p: &[T], coeffs: &AffineInterference<T>) -> T {
    debug_assert_eq!(p.len(), coeffs.cross_gains.len());
    let mut acc = coeffs.noise_offset;
    for (&gain, &power) in coeffs.cross_gains.iter().zip(p) {
        acc += gain * power;
    }
    acc
}

/// Minimum interference over a user's cluster family at powers `p`.
///
/// Returns the minimum value and the index of the minimizing cluster in the
/// family's enumeration order; ties keep the earliest cluster.
pub fn best_cluster<T: Scalar>(p: &[T], table: &[AffineInterference<T>]) -> (T, usize) {
    assert!(!table.is_empty(), "cluster family must not be empty");
    let mut best = interference(p, &table[0]);
    let mut best_idx = 0;
    for (idx, coeffs) in table.iter().enumerate().skip(1) {
        let value = interference(p, coeffs);
        if value < best {
            best = value;
            best_idx = idx;
        }
    }
    (best, best_idx)
}

/// Received SINR of `user` under `cluster`, evaluated directly from the
/// channel vectors. Matches `p[user] / interference(p, coeffs)` up to
/// rounding; the two paths are kept separate on purpose so they can check
/// each other.
pub fn sinr_value<T: Scalar>(
    p: &[T],
    ch: &ChannelRealization<T>,
    user: usize,
    cluster: &ClusterIndicator,
) -> Result<T> {
    let k = ch.antennas_per_ap();
    let h_n = ch.user(user);
    let own = effective_inner(h_n, h_n, cluster, k).re;
    if !(own >= cast(DEGENERATE_SIGNAL_FLOOR)) {
        return Err(Error::DegenerateChannel {
            user,
            value: own.to_f64().unwrap_or(f64::NAN),
        });
    }

    let mut denom = ch.noise_power() * own;
    for i in 0..ch.num_users() {
        if i == user {
            continue;
        }
        let cross = effective_inner(h_n, ch.user(i), cluster, k);
        denom += p[i] * cross.norm_sqr();
    }
    Ok(p[user] * own * own / denom)
}
