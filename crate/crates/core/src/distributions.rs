//! Visit-count histograms, CCDFs and log-log power-law fits.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Trajectory;

/// Non-zero counts keyed by community or user id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CountHistogram {
    pub entries: BTreeMap<Arc<str>, u64>,
    pub total: u64,
}

impl CountHistogram {
    fn from_counts(counts: HashMap<Arc<str>, u64>) -> Self {
        let entries: BTreeMap<_, _> = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        let total = entries.values().sum();
        CountHistogram { entries, total }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds another histogram's counts into this one.
    pub fn merge(&mut self, other: &CountHistogram) {
        for (k, &c) in &other.entries {
            *self.entries.entry(k.clone()).or_default() += c;
        }
        self.total += other.total;
    }
}

/// Total visits received by each community.
pub fn community_visit_counts(trajectories: &[Trajectory]) -> CountHistogram {
    let mut counts: HashMap<Arc<str>, u64> = HashMap::new();
    for t in trajectories {
        for v in &t.visits {
            *counts.entry(v.community.clone()).or_default() += 1;
        }
    }
    CountHistogram::from_counts(counts)
}

/// Total visits made by each user.
pub fn user_visit_counts(trajectories: &[Trajectory]) -> CountHistogram {
    let mut counts: HashMap<Arc<str>, u64> = HashMap::new();
    for t in trajectories {
        *counts.entry(t.user.clone()).or_default() += t.visits.len() as u64;
    }
    CountHistogram::from_counts(counts)
}

/// `(v, P(X >= v))` for every distinct observed count `v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfCurve {
    pub points: Vec<(u64, f64)>,
}

impl CcdfCurve {
    pub fn as_f64_points(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|&(v, p)| (v as f64, p)).collect()
    }
}

/// CCDF of the count of a uniformly drawn key.
pub fn ccdf(hist: &CountHistogram) -> Result<CcdfCurve> {
    let counts: Vec<u64> = hist.entries.values().copied().collect();
    ccdf_of_counts(&counts)
}

/// CCDF over raw positive counts.
pub fn ccdf_of_counts(counts: &[u64]) -> Result<CcdfCurve> {
    if counts.is_empty() {
        return Err(Error::EmptyInput("cannot build a CCDF from an empty histogram".into()));
    }
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    let mut points = Vec::new();
    let mut i = 0;
    while i < n {
        let v = sorted[i];
        // i keys are strictly below v
        points.push((v, (n - i) as f64 / n as f64));
        while i < n && sorted[i] == v {
            i += 1;
        }
    }
    Ok(CcdfCurve { points })
}

/// CCDF over real-valued samples, same `P(X >= v)` convention.
pub fn ccdf_of_values(values: &[f64]) -> Result<Vec<(f64, f64)>> {
    if values.is_empty() {
        return Err(Error::EmptyInput("cannot build a CCDF from no values".into()));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite sample {bad}")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();
    let mut points = Vec::new();
    let mut i = 0;
    while i < n {
        let v = sorted[i];
        points.push((v, (n - i) as f64 / n as f64));
        while i < n && sorted[i] == v {
            i += 1;
        }
    }
    Ok(points)
}

/// Inclusive range of x values a fit is restricted to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitRange {
    pub min: f64,
    pub max: f64,
}

impl FitRange {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min <= max) {
            return Err(Error::invalid(format!("fit range [{min}, {max}] is inverted")));
        }
        Ok(FitRange { min, max })
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min && x <= self.max
    }
}

/// A straight-line fit in log10-log10 space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Smallest and largest x actually used.
    pub fit_range: (f64, f64),
    pub n_points: usize,
}

/// Ordinary least squares line through `(x, y)`. Returns `(slope, intercept,
/// r_squared)`; a perfect fit of constant `y` reports `r_squared = 1`.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    if y.iter().all(|&v| v == y[0]) && x.iter().any(|&v| v != x[0]) {
        return (0.0, y[0], 1.0);
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return (f64::NAN, f64::NAN, 0.0);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    let r2 = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    (slope + 0.0, intercept, r2)
}

/// OLS of `log10(y)` on `log10(x)` over the points with positive
/// coordinates inside `range` (all points when `range` is `None`).
pub fn fit_loglog(points: &[(f64, f64)], range: Option<FitRange>) -> Result<PowerLawFit> {
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &(x, y) in points {
        if x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite() && range.is_none_or(|r| r.contains(x)) {
            lx.push(x.log10());
            ly.push(y.log10());
            lo = lo.min(x);
            hi = hi.max(x);
        }
    }
    if lx.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "log-log fit needs at least 3 usable points, found {}",
            lx.len()
        )));
    }
    if lo == hi {
        return Err(Error::InsufficientData("log-log fit needs at least two distinct x values".into()));
    }
    let (slope, intercept, r_squared) = least_squares(&lx, &ly);
    Ok(PowerLawFit { exponent: slope, intercept, r_squared, fit_range: (lo, hi), n_points: lx.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Trajectory;
    use proptest::prelude::*;

    #[test]
    fn community_counts() {
        let one = [Trajectory::from_pairs("u", &[("x", 1), ("x", 2)])];
        let h = community_visit_counts(&one);
        assert_eq!(h.entries.get("x"), Some(&2));
        let two = [Trajectory::from_pairs("u", &[("x", 1)]), Trajectory::from_pairs("v", &[("x", 5)])];
        let h = community_visit_counts(&two);
        assert_eq!(h.entries.get("x"), Some(&2));
        assert_eq!(h.total, 2);
    }

    #[test]
    fn user_counts() {
        let t = [Trajectory::from_pairs("u", &[("a", 1), ("b", 2), ("a", 3), ("c", 4), ("d", 5)])];
        let h = user_visit_counts(&t);
        assert_eq!(h.entries.get("u"), Some(&5));
        assert!(user_visit_counts(&[]).is_empty());
    }

    #[test]
    fn ccdf_small() {
        let c = ccdf_of_counts(&[1, 2, 3]).unwrap();
        assert_eq!(c.points, vec![(1, 1.0), (2, 2.0 / 3.0), (3, 1.0 / 3.0)]);
        let c = ccdf_of_counts(&[7, 7, 7]).unwrap();
        assert_eq!(c.points, vec![(7, 1.0)]);
        assert!(ccdf(&CountHistogram::default()).is_err());
    }

    #[test]
    fn exact_power_law_fit() {
        let pts: Vec<(f64, f64)> = (1..=50).map(|x| (x as f64, (x as f64).powf(-2.0))).collect();
        let fit = fit_loglog(&pts, None).unwrap();
        assert!((fit.exponent + 2.0).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(fit.n_points, 50);
    }

    #[test]
    fn flat_fit_has_zero_exponent() {
        let pts: Vec<(f64, f64)> = (1..=10).map(|x| (x as f64, 0.3)).collect();
        let fit = fit_loglog(&pts, None).unwrap();
        assert_eq!(fit.exponent, 0.0);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn fit_range_restricts_points() {
        let mut pts: Vec<(f64, f64)> = (1..=20).map(|x| (x as f64, (x as f64).powf(-1.5))).collect();
        pts[0].1 = 1e-6; // off-law head point
        let fit = fit_loglog(&pts, Some(FitRange::new(2.0, 20.0).unwrap())).unwrap();
        assert!((fit.exponent + 1.5).abs() < 1e-9);
        assert_eq!(fit.fit_range, (2.0, 20.0));
        assert!(fit_loglog(&pts, Some(FitRange::new(2.0, 3.0).unwrap())).is_err());
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(fit_loglog(&[(1.0, 1.0), (2.0, 0.5)], None), Err(Error::InsufficientData(_))));
        assert!(fit_loglog(&[(1.0, 1.0), (2.0, 0.0), (3.0, 0.2)], None).is_err());
    }

    /// Direct enumeration: for each distinct value, count keys at or above it.
    fn brute_ccdf(counts: &[u64]) -> Vec<(u64, f64)> {
        let mut distinct: Vec<u64> = counts.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        distinct
            .into_iter()
            .map(|v| (v, counts.iter().filter(|&&c| c >= v).count() as f64 / counts.len() as f64))
            .collect()
    }

    proptest! {
        #[test]
        fn ccdf_matches_enumeration(counts in prop::collection::vec(1u64..200, 1..300)) {
            let c = ccdf_of_counts(&counts).unwrap();
            prop_assert_eq!(&c.points, &brute_ccdf(&counts));
            prop_assert_eq!(c.points[0].1, 1.0);
            for w in c.points.windows(2) {
                prop_assert!(w[0].0 < w[1].0);
                prop_assert!(w[0].1 >= w[1].1);
            }
        }

        #[test]
        fn loglog_recovers_exact_exponent(s in -3.0f64..1.0, c in 0.1f64..10.0, n in 3usize..60) {
            let pts: Vec<(f64, f64)> = (1..=n).map(|x| (x as f64, c * (x as f64).powf(s))).collect();
            let fit = fit_loglog(&pts, None).unwrap();
            prop_assert!((fit.exponent - s).abs() < 1e-9);
            prop_assert!((fit.r_squared - 1.0).abs() < 1e-9);
        }
    }
}
