//! User-centric AP clustering: candidate selection and cluster enumeration.
//!
//! Each user first gets a candidate set, the `m` APs with the strongest
//! large-scale gain toward it. A clustering scheme then turns the candidate
//! set into the family of serving clusters the optimizer may choose from:
//!
//! * `Fixed`: the whole candidate set, one cluster.
//! * `AddAp`: the nested prefixes (best AP, best two, ..., all `m`).
//! * `Exhaustive`: every non-empty subset of the candidate set.
//!
//! The three families are nested in that order, which is what makes the
//! schemes comparable on the same channel.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;

/// Clustering scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeId {
    Fixed,
    AddAp,
    Exhaustive,
}

impl SchemeId {
    pub const ALL: [SchemeId; 3] = [SchemeId::Fixed, SchemeId::AddAp, SchemeId::Exhaustive];

    /// Stable lower-case name, also accepted by `from_name`.
    pub fn name(&self) -> &'static str {
        match self {
            SchemeId::Fixed => "fixed",
            SchemeId::AddAp => "add",
            SchemeId::Exhaustive => "exhaustive",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "fixed" => Ok(SchemeId::Fixed),
            "add" => Ok(SchemeId::AddAp),
            "exhaustive" => Ok(SchemeId::Exhaustive),
            other => Err(Error::Config(format!("unknown clustering scheme '{other}'"))),
        }
    }
}

impl std::fmt::Display for SchemeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Default upper bound on the candidate-set size of the exhaustive scheme.
///
/// The exhaustive family doubles per candidate AP, so large candidate sets
/// are almost always a mistake; callers can lift the cap explicitly.
pub const EXHAUSTIVE_CANDIDATE_CAP: usize = 5;

/// Effective candidate-set size after the exhaustive cap.
pub fn capped_candidate_size(scheme: SchemeId, requested: usize, allow_uncapped: bool) -> usize {
    if scheme == SchemeId::Exhaustive && !allow_uncapped {
        requested.min(EXHAUSTIVE_CANDIDATE_CAP)
    } else {
        requested
    }
}

/// A user's candidate APs, strongest large-scale gain first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    pub user: usize,
    /// AP indices ordered by decreasing gain; ties break toward the lower
    /// AP index.
    pub aps: Vec<usize>,
}

impl CandidateSet {
    pub fn size(&self) -> usize {
        self.aps.len()
    }
}

/// Serving-cluster membership for one user, stored as a bitmask over APs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClusterIndicator {
    pub user: usize,
    members: u128,
}

impl ClusterIndicator {
    /// Builds a cluster from explicit AP indices (each must be below 128).
    pub fn from_aps(user: usize, aps: &[usize]) -> Self {
        let mut members = 0u128;
        for &ap in aps {
            assert!(ap < 128, "AP index {ap} exceeds the bitmask width");
            members |= 1u128 << ap;
        }
        Self { user, members }
    }

    pub fn contains(&self, ap: usize) -> bool {
        ap < 128 && self.members & (1u128 << ap) != 0
    }

    /// Number of member APs.
    pub fn size(&self) -> usize {
        self.members.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.members == 0
    }

    pub fn is_subset_of(&self, other: &ClusterIndicator) -> bool {
        self.members & !other.members == 0
    }

    /// Member AP indices in ascending order.
    pub fn ap_indices(&self) -> impl Iterator<Item = usize> + '_ {
        let mut rest = self.members;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let ap = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(ap)
            }
        })
    }
}

/// Picks the `size` APs with the strongest gain toward `user`.
///
/// `gains` holds linear large-scale gains, APs along rows and users along
/// columns. Ordering is by decreasing gain with ties broken toward the lower
/// AP index, so the result is unique.
pub fn candidate_set<T: Scalar>(
    gains: &DenseMatrix<T>,
    user: usize,
    size: usize,
) -> Result<CandidateSet> {
    let num_aps = gains.nrows();
    if size == 0 || size > num_aps {
        return Err(Error::Config(format!(
            "candidate-set size {size} outside 1..={num_aps}"
        )));
    }
    if user >= gains.ncols() {
        return Err(Error::Config(format!(
            "user {user} outside the gain matrix ({} users)",
            gains.ncols()
        )));
    }

    let mut order: Vec<usize> = (0..num_aps).collect();
    order.sort_by(|&a, &b| {
        gains
            .get(b, user)
            .partial_cmp(&gains.get(a, user))
            .expect("gains must not be NaN")
            .then(a.cmp(&b))
    });
    order.truncate(size);
    Ok(CandidateSet { user, aps: order })
}

/// Expands a candidate set into the scheme's cluster family.
///
/// Enumeration order is deterministic: `Fixed` yields the single full
/// candidate set; `AddAp` yields prefixes by increasing length; `Exhaustive`
/// yields subsets by increasing cardinality and, within a cardinality,
/// lexicographically over candidate positions (so `{best, third}` precedes
/// `{second, third}`).
pub fn enumerate_clusters(candidate: &CandidateSet, scheme: SchemeId) -> Vec<ClusterIndicator> {
    let m = candidate.size();
    assert!(m > 0, "candidate set must not be empty");
    match scheme {
        SchemeId::Fixed => vec![ClusterIndicator::from_aps(candidate.user, &candidate.aps)],
        SchemeId::AddAp => (1..=m)
            .map(|len| ClusterIndicator::from_aps(candidate.user, &candidate.aps[..len]))
            .collect(),
        SchemeId::Exhaustive => {
            let mut clusters = Vec::with_capacity((1usize << m) - 1);
            let mut picked = Vec::new();
            for cardinality in 1..=m {
                picked.clear();
                picked.extend(0..cardinality);
                loop {
                    let aps: Vec<usize> = picked.iter().map(|&p| candidate.aps[p]).collect();
                    clusters.push(ClusterIndicator::from_aps(candidate.user, &aps));

                    // Advance the position combination lexicographically.
                    let mut i = cardinality;
                    loop {
                        if i == 0 {
                            break;
                        }
                        i -= 1;
                        if picked[i] != i + m - cardinality {
                            picked[i] += 1;
                            for j in i + 1..cardinality {
                                picked[j] = picked[j - 1] + 1;
                            }
                            break;
                        }
                        if i == 0 {
                            picked.clear();
                            break;
                        }
                    }
                    if picked.is_empty() {
                        break;
                    }
                }
            }
            clusters
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gains_column(values: &[f64]) -> DenseMatrix<f64> {
        let rows: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
        DenseMatrix::from_rows(&rows)
    }

    #[test]
    fn candidate_set_orders_by_gain() {
        let gains = gains_column(&[0.1, 0.5, 0.3]);
        let cand = candidate_set(&gains, 0, 2).unwrap();
        assert_eq!(cand.aps, vec![1, 2]);
        let full = candidate_set(&gains, 0, 3).unwrap();
        assert_eq!(full.aps, vec![1, 2, 0]);
    }

    #[test]
    fn candidate_set_breaks_ties_toward_lower_index() {
        let gains = gains_column(&[0.5, 0.5, 0.5, 0.5]);
        let cand = candidate_set(&gains, 0, 3).unwrap();
        assert_eq!(cand.aps, vec![0, 1, 2]);
    }

    #[test]
    fn candidate_set_rejects_bad_sizes() {
        let gains = gains_column(&[0.1, 0.2]);
        assert!(candidate_set(&gains, 0, 0).is_err());
        assert!(candidate_set(&gains, 0, 3).is_err());
        assert!(candidate_set(&gains, 1, 1).is_err());
    }

    #[test]
    fn fixed_scheme_yields_the_full_candidate_set() {
        let cand = CandidateSet { user: 3, aps: vec![5, 1, 2] };
        let clusters = enumerate_clusters(&cand, SchemeId::Fixed);
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].size(), 3);
        for ap in [5, 1, 2] {
            assert!(clusters[0].contains(ap));
        }
    }

    #[test]
    fn add_ap_scheme_yields_nested_prefixes() {
        let cand = CandidateSet { user: 0, aps: vec![5, 1, 2] };
        let clusters = enumerate_clusters(&cand, SchemeId::AddAp);
        assert_eq!(clusters.len(), 3);
        assert_eq!(
            clusters.iter().map(ClusterIndicator::size).collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
        for window in clusters.windows(2) {
            assert!(window[0].is_subset_of(&window[1]));
        }
        assert!(clusters[0].contains(5));
        assert!(clusters[1].contains(5) && clusters[1].contains(1));
    }

    #[test]
    fn exhaustive_scheme_enumerates_subsets_in_documented_order() {
        let cand = CandidateSet { user: 0, aps: vec![4, 7, 2] };
        let clusters = enumerate_clusters(&cand, SchemeId::Exhaustive);
        let as_sets: Vec<Vec<usize>> = clusters
            .iter()
            .map(|c| c.ap_indices().collect())
            .collect();
        // Cardinality first, then lexicographic over candidate positions.
        assert_eq!(
            as_sets,
            vec![
                vec![4],
                vec![7],
                vec![2],
                vec![4, 7],
                vec![2, 4],
                vec![2, 7],
                vec![2, 4, 7],
            ]
        );
    }

    #[test]
    fn single_candidate_gives_one_cluster_under_every_scheme() {
        let cand = CandidateSet { user: 0, aps: vec![3] };
        for scheme in SchemeId::ALL {
            let clusters = enumerate_clusters(&cand, scheme);
            assert_eq!(clusters.len(), 1, "{scheme}");
            assert!(clusters[0].contains(3));
            assert_eq!(clusters[0].size(), 1);
        }
    }

    #[test]
    fn family_sizes_match_their_combinatorics() {
        for m in 1..=8 {
            let cand = CandidateSet { user: 0, aps: (0..m).collect() };
            assert_eq!(enumerate_clusters(&cand, SchemeId::Fixed).len(), 1);
            assert_eq!(enumerate_clusters(&cand, SchemeId::AddAp).len(), m);
            assert_eq!(
                enumerate_clusters(&cand, SchemeId::Exhaustive).len(),
                (1usize << m) - 1
            );
        }
    }

    #[test]
    fn scheme_families_are_nested() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let m = rng.gen_range(1..=8usize);
            let mut aps: Vec<usize> = (0..30).collect();
            for i in (1..aps.len()).rev() {
                aps.swap(i, rng.gen_range(0..=i));
            }
            aps.truncate(m);
            let cand = CandidateSet { user: 0, aps };

            let fixed = enumerate_clusters(&cand, SchemeId::Fixed);
            let add = enumerate_clusters(&cand, SchemeId::AddAp);
            let exhaustive = enumerate_clusters(&cand, SchemeId::Exhaustive);

            for c in &fixed {
                assert!(add.contains(c), "fixed cluster missing from add-AP family");
            }
            for c in &add {
                assert!(exhaustive.contains(c), "add-AP cluster missing from exhaustive family");
            }
            for c in &exhaustive {
                assert!(!c.is_empty());
            }
        }
    }

    #[test]
    fn exhaustive_cap_applies_only_to_the_exhaustive_scheme() {
        assert_eq!(capped_candidate_size(SchemeId::Exhaustive, 8, false), 5);
        assert_eq!(capped_candidate_size(SchemeId::Exhaustive, 8, true), 8);
        assert_eq!(capped_candidate_size(SchemeId::Exhaustive, 3, false), 3);
        assert_eq!(capped_candidate_size(SchemeId::Fixed, 8, false), 8);
        assert_eq!(capped_candidate_size(SchemeId::AddAp, 8, false), 8);
    }

    #[test]
    fn scheme_names_round_trip() {
        for scheme in SchemeId::ALL {
            assert_eq!(SchemeId::from_name(scheme.name()).unwrap(), scheme);
        }
        assert!(SchemeId::from_name("dynamic").is_err());
    }

    #[test]
    fn cluster_indicator_set_operations() {
        let a = ClusterIndicator::from_aps(0, &[1, 3]);
        let b = ClusterIndicator::from_aps(0, &[1, 3, 7]);
        assert!(a.is_subset_of(&b));
        assert!(!b.is_subset_of(&a));
        assert_eq!(b.ap_indices().collect::<Vec<_>>(), vec![1, 3, 7]);
        assert_eq!(b.size(), 3);
        assert!(!a.contains(2));
    }
}
