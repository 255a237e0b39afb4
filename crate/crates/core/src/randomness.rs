//! Per-user mobility randomness: visit entropy (bits) and `max_frq`.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::ccdf_of_values;
use crate::error::{Error, Result};
use crate::ingest::{Trajectory, Visit};

/// Default active-user thresholds: strictly more than 2 distinct communities
/// and strictly more than 1000 visits.
pub const DEFAULT_MIN_DISTINCT: usize = 2;
pub const DEFAULT_MIN_VISITS: usize = 1000;

/// Visit counts per community, sorted by community id.
#[derive(Debug, Clone, PartialEq)]
pub struct VisitDistribution {
    pub user: Arc<str>,
    pub counts: Vec<(Arc<str>, u64)>,
    pub total_visits: u64,
}

impl VisitDistribution {
    /// Number of distinct communities.
    pub fn n(&self) -> usize {
        self.counts.len()
    }

    pub fn prob(&self, community: &str) -> Option<f64> {
        self.counts
            .binary_search_by(|(c, _)| (**c).cmp(community))
            .ok()
            .map(|i| self.counts[i].1 as f64 / self.total_visits as f64)
    }

    /// `(community, p_i)` with `p_i = count_i / total`.
    pub fn probs(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        let t = self.total_visits as f64;
        self.counts.iter().map(move |(c, k)| (&**c, *k as f64 / t))
    }
}

pub fn visit_distribution(t: &Trajectory) -> Result<VisitDistribution> {
    distribution_of(t.user.clone(), &t.visits)
}

/// Distribution over an arbitrary slice of visits (used for stages too).
pub fn distribution_of(user: Arc<str>, visits: &[Visit]) -> Result<VisitDistribution> {
    if visits.is_empty() {
        return Err(Error::EmptyInput(format!("user {user} has no visits")));
    }
    let mut counts: HashMap<&Arc<str>, u64> = HashMap::new();
    for v in visits {
        *counts.entry(&v.community).or_default() += 1;
    }
    let mut counts: Vec<(Arc<str>, u64)> = counts.into_iter().map(|(c, k)| (c.clone(), k)).collect();
    counts.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    Ok(VisitDistribution { user, counts, total_visits: visits.len() as u64 })
}

/// Shannon entropy of raw counts, in bits.
pub fn entropy_of_counts(counts: impl IntoIterator<Item = u64>, total: u64) -> f64 {
    let t = total as f64;
    let mut h = 0.0;
    for c in counts {
        if c > 0 {
            let p = c as f64 / t;
            h -= p * p.log2();
        }
    }
    h + 0.0
}

/// `-sum p_i log2 p_i`.
pub fn entropy(dist: &VisitDistribution) -> f64 {
    entropy_of_counts(dist.counts.iter().map(|c| c.1), dist.total_visits)
}

/// Largest `p_i`.
pub fn max_frq(dist: &VisitDistribution) -> f64 {
    let max = dist.counts.iter().map(|c| c.1).max().unwrap_or(0);
    max as f64 / dist.total_visits as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserRandomness {
    pub user: String,
    pub entropy: f64,
    pub max_frq: f64,
}

pub fn user_randomness(t: &Trajectory) -> Result<UserRandomness> {
    let d = visit_distribution(t)?;
    Ok(UserRandomness { user: t.user.to_string(), entropy: entropy(&d), max_frq: max_frq(&d) })
}

/// Randomness of every user, in input order.
pub fn randomness_all(trajectories: &[Trajectory]) -> Result<Vec<UserRandomness>> {
    trajectories.par_iter().map(user_randomness).collect()
}

/// Keeps users with more than `min_distinct` distinct communities and more
/// than `min_visits` visits (both strict).
pub fn active_filter(trajectories: &[Trajectory], min_distinct: usize, min_visits: usize) -> Vec<Trajectory> {
    trajectories.iter().filter(|t| is_active(t, min_distinct, min_visits)).cloned().collect()
}

/// Owned variant of [`active_filter`] that avoids copying trajectories.
pub fn active_filter_owned(trajectories: Vec<Trajectory>, min_distinct: usize, min_visits: usize) -> Vec<Trajectory> {
    trajectories.into_iter().filter(|t| is_active(t, min_distinct, min_visits)).collect()
}

pub fn is_active(t: &Trajectory, min_distinct: usize, min_visits: usize) -> bool {
    t.visits.len() > min_visits && t.distinct_communities() > min_distinct
}

/// Population shares on either side of reference cut points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFractions {
    pub entropy_above_4: f64,
    pub entropy_below_1: f64,
    pub max_frq_above_0_8: f64,
    pub max_frq_above_0_9: f64,
    pub max_frq_below_0_3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomnessSummary {
    pub n_users: usize,
    /// `(value, P(X >= value))`.
    pub entropy_ccdf: Vec<(f64, f64)>,
    pub max_frq_ccdf: Vec<(f64, f64)>,
    pub fractions: ThresholdFractions,
}

pub fn randomness_distribution(users: &[UserRandomness]) -> Result<RandomnessSummary> {
    if users.is_empty() {
        return Err(Error::EmptyInput("no users to summarize".into()));
    }
    let ent: Vec<f64> = users.iter().map(|u| u.entropy).collect();
    let mf: Vec<f64> = users.iter().map(|u| u.max_frq).collect();
    let n = users.len() as f64;
    let frac = |xs: &[f64], pred: &dyn Fn(f64) -> bool| xs.iter().filter(|&&x| pred(x)).count() as f64 / n;
    let fractions = ThresholdFractions {
        entropy_above_4: frac(&ent, &|x| x > 4.0),
        entropy_below_1: frac(&ent, &|x| x < 1.0),
        max_frq_above_0_8: frac(&mf, &|x| x > 0.8),
        max_frq_above_0_9: frac(&mf, &|x| x > 0.9),
        max_frq_below_0_3: frac(&mf, &|x| x < 0.3),
    };
    Ok(RandomnessSummary {
        n_users: users.len(),
        entropy_ccdf: ccdf_of_values(&ent)?,
        max_frq_ccdf: ccdf_of_values(&mf)?,
        fractions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn traj(communities: &[&str]) -> Trajectory {
        let pairs: Vec<(&str, i64)> = communities.iter().enumerate().map(|(i, c)| (*c, i as i64)).collect();
        Trajectory::from_pairs("u", &pairs)
    }

    #[test]
    fn relative_frequencies() {
        let d = visit_distribution(&traj(&["x", "x", "y", "z"])).unwrap();
        assert_eq!(d.prob("x"), Some(0.5));
        assert_eq!(d.prob("y"), Some(0.25));
        assert_eq!(d.prob("z"), Some(0.25));
        assert_eq!(d.n(), 3);
        let single = visit_distribution(&traj(&["x"])).unwrap();
        assert_eq!(single.prob("x"), Some(1.0));
        assert!(visit_distribution(&Trajectory::new("u", vec![])).is_err());
    }

    #[test]
    fn entropy_reference_values() {
        assert_eq!(entropy(&visit_distribution(&traj(&["x", "x"])).unwrap()), 0.0);
        let names: Vec<String> = (0..16).map(|i| format!("c{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let h = entropy(&visit_distribution(&traj(&refs)).unwrap());
        assert!((h - 4.0).abs() < 1e-9);
        let h = entropy(&visit_distribution(&traj(&["x", "x", "y", "z"])).unwrap());
        assert!((h - 1.5).abs() < 1e-9);
    }

    #[test]
    fn max_frq_reference_values() {
        assert_eq!(max_frq(&visit_distribution(&traj(&["x"])).unwrap()), 1.0);
        assert_eq!(max_frq(&visit_distribution(&traj(&["a", "b", "c", "d"])).unwrap()), 0.25);
        let mut v = vec!["a"; 6];
        v.extend(["b"; 3]);
        v.push("c");
        assert_eq!(max_frq(&visit_distribution(&traj(&v)).unwrap()), 0.6);
    }

    fn user_with(distinct: usize, visits: usize) -> Trajectory {
        let names: Vec<String> = (0..distinct).map(|i| format!("c{i}")).collect();
        let pairs: Vec<(&str, i64)> = (0..visits).map(|i| (names[i % distinct].as_str(), i as i64)).collect();
        Trajectory::from_pairs("u", &pairs)
    }

    #[test]
    fn active_thresholds_are_strict() {
        let f = |t: Trajectory| !active_filter(&[t], DEFAULT_MIN_DISTINCT, DEFAULT_MIN_VISITS).is_empty();
        assert!(f(user_with(3, 1001)));
        assert!(!f(user_with(2, 5000)));
        assert!(!f(user_with(10, 1000)));
    }

    #[test]
    fn summary_fractions() {
        let same = vec![UserRandomness { user: "a".into(), entropy: 2.0, max_frq: 0.5 }; 3];
        let s = randomness_distribution(&same).unwrap();
        assert_eq!(s.entropy_ccdf, vec![(2.0, 1.0)]);
        let two = vec![
            UserRandomness { user: "a".into(), entropy: 0.0, max_frq: 1.0 },
            UserRandomness { user: "b".into(), entropy: 4.0, max_frq: 1.0 / 16.0 },
        ];
        let s = randomness_distribution(&two).unwrap();
        assert_eq!(s.fractions.entropy_above_4, 0.0);
        assert_eq!(s.fractions.entropy_below_1, 0.5);
        assert_eq!(s.fractions.max_frq_above_0_9, 0.5);
        assert_eq!(s.fractions.max_frq_below_0_3, 0.5);
        assert!(randomness_distribution(&[]).is_err());
    }

    fn arb_visits() -> impl Strategy<Value = Vec<u8>> {
        prop::collection::vec(0u8..12, 1..200)
    }

    fn to_traj(v: &[u8]) -> Trajectory {
        let names: Vec<String> = v.iter().map(|c| format!("c{c}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        traj(&refs)
    }

    proptest! {
        #[test]
        fn entropy_bounds(v in arb_visits()) {
            let d = visit_distribution(&to_traj(&v)).unwrap();
            let h = entropy(&d);
            let m = max_frq(&d);
            prop_assert!(h >= 0.0);
            prop_assert!(h <= (d.n() as f64).log2() + 1e-12);
            prop_assert!(m >= 1.0 / d.n() as f64 - 1e-15);
            prop_assert!(-m.log2() <= h + 1e-12);
            prop_assert_eq!(m == 1.0, h == 0.0);
            let total: f64 = d.probs().map(|p| p.1).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }

        #[test]
        fn order_and_duplication_invariance(mut v in arb_visits()) {
            let a = user_randomness(&to_traj(&v)).unwrap();
            let doubled: Vec<u8> = v.iter().flat_map(|&c| [c, c]).collect();
            let b = user_randomness(&to_traj(&doubled)).unwrap();
            v.reverse();
            let c = user_randomness(&to_traj(&v)).unwrap();
            prop_assert!((a.entropy - b.entropy).abs() < 1e-12);
            prop_assert_eq!(a.max_frq, b.max_frq);
            prop_assert_eq!(a, c);
        }
    }
}
