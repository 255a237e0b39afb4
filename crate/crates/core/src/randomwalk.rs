//! Random-walk characteristics of visit histories: the exploration curve
//! `S(t) ~ t^mu` and the rank-frequency curve `f_k ~ k^-zeta`.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{fit_loglog, FitRange, PowerLawFit};
use crate::error::{Error, Result};
use crate::ingest::Trajectory;
use crate::SECONDS_PER_HOUR;

/// Mean number of distinct communities visited by the end of each hour of a
/// user's own activity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplorationCurve {
    /// `(t, S(t))` for `t = 1..=horizon`.
    pub points: Vec<(u64, f64)>,
    pub n_users: usize,
}

/// Hours a trajectory touches, counting the partial hour of its last visit.
pub fn observed_hours(t: &Trajectory) -> u64 {
    match (t.first_ts(), t.last_ts()) {
        (Some(a), Some(b)) => ((b - a) / SECONDS_PER_HOUR) as u64 + 1,
        _ => 0,
    }
}

/// Per-user `s(t)` for `t = 1..=horizon`, hours counted from the first visit.
pub fn distinct_by_hour(t: &Trajectory, horizon: usize) -> Vec<u32> {
    let mut s = vec![0u32; horizon];
    let Some(start) = t.first_ts() else {
        return s;
    };
    let mut seen: HashSet<&str> = HashSet::new();
    let mut filled = 0;
    for v in &t.visits {
        let hour = ((v.ts - start) / SECONDS_PER_HOUR) as usize;
        if hour >= horizon {
            break;
        }
        while filled < hour {
            s[filled] = seen.len() as u32;
            filled += 1;
        }
        seen.insert(&v.community);
    }
    while filled < horizon {
        s[filled] = seen.len() as u32;
        filled += 1;
    }
    s
}

/// Averages `s(t)` over the users whose activity spans the whole horizon.
/// Shorter users are excluded rather than padded.
pub fn exploration_curve(trajectories: &[Trajectory], horizon_hours: u64) -> Result<ExplorationCurve> {
    if horizon_hours < 1 {
        return Err(Error::invalid("horizon_hours must be at least 1"));
    }
    let horizon = horizon_hours as usize;
    // Integer sums are exact, so the parallel reduction order does not matter.
    let (sums, n_users) = trajectories
        .par_iter()
        .filter(|t| observed_hours(t) >= horizon_hours)
        .fold(
            || (vec![0u64; horizon], 0usize),
            |(mut acc, n), t| {
                for (a, s) in acc.iter_mut().zip(distinct_by_hour(t, horizon)) {
                    *a += s as u64;
                }
                (acc, n + 1)
            },
        )
        .reduce(
            || (vec![0u64; horizon], 0usize),
            |(mut a, n), (b, m)| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                (a, n + m)
            },
        );
    if n_users == 0 {
        return Err(Error::InsufficientData(format!("no user spans {horizon_hours} hours")));
    }
    let points = sums
        .into_iter()
        .enumerate()
        .map(|(i, s)| (i as u64 + 1, s as f64 / n_users as f64))
        .collect();
    Ok(ExplorationCurve { points, n_users })
}

/// Fits `S(t) ~ t^mu`; the returned exponent is `mu`.
pub fn fit_mu(curve: &ExplorationCurve, range: Option<FitRange>) -> Result<PowerLawFit> {
    let pts: Vec<(f64, f64)> = curve.points.iter().map(|&(t, s)| (t as f64, s)).collect();
    fit_loglog(&pts, range)
}

/// Which users contribute to a rank-frequency curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZipfSelection {
    /// Users with exactly `S` distinct communities.
    Exact,
    /// Users with `S..=max` distinct communities; their top `S` ranks are
    /// renormalized to sum to one.
    Range { max: usize },
}

/// Mean relative visit frequency of each user's k-th most visited community.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankFrequencyCurve {
    pub s_value: usize,
    /// `(k, f_k)` for `k = 1..=S`.
    pub points: Vec<(usize, f64)>,
    pub n_users: usize,
}

/// Per-user relative frequencies sorted by rank (most visited first). Ties
/// are broken by community id, which leaves the frequencies unchanged.
pub fn rank_frequencies(t: &Trajectory) -> Vec<f64> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for v in &t.visits {
        *counts.entry(&v.community).or_default() += 1;
    }
    let mut ranked: Vec<(&str, u64)> = counts.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let total = t.visits.len() as f64;
    ranked.into_iter().map(|(_, c)| c as f64 / total).collect()
}

pub fn zipf_curve(trajectories: &[Trajectory], s: usize, selection: ZipfSelection) -> Result<RankFrequencyCurve> {
    if s < 2 {
        return Err(Error::invalid("S must be at least 2"));
    }
    if let ZipfSelection::Range { max } = selection {
        if max < s {
            return Err(Error::invalid(format!("range max {max} is below S = {s}")));
        }
    }
    let per_user: Vec<Vec<f64>> = trajectories
        .par_iter()
        .filter_map(|t| {
            let freqs = rank_frequencies(t);
            let keep = match selection {
                ZipfSelection::Exact => freqs.len() == s,
                ZipfSelection::Range { max } => freqs.len() >= s && freqs.len() <= max,
            };
            if !keep {
                return None;
            }
            if freqs.len() == s {
                return Some(freqs);
            }
            let top = &freqs[..s];
            let norm: f64 = top.iter().sum();
            Some(top.iter().map(|f| f / norm).collect())
        })
        .collect();
    if per_user.is_empty() {
        return Err(Error::InsufficientData(format!("no user visited exactly {s} distinct communities")));
    }
    let mut sums = vec![0.0; s];
    for freqs in &per_user {
        for (acc, f) in sums.iter_mut().zip(freqs) {
            *acc += f;
        }
    }
    let n = per_user.len() as f64;
    let points = sums.into_iter().enumerate().map(|(i, f)| (i + 1, f / n)).collect();
    Ok(RankFrequencyCurve { s_value: s, points, n_users: per_user.len() })
}

/// Fits `f_k ~ k^-zeta`; the returned exponent is `zeta` (the negated
/// log-log slope), so Zipf-like curves give positive values.
pub fn fit_zeta(curve: &RankFrequencyCurve, range: Option<FitRange>) -> Result<PowerLawFit> {
    let pts: Vec<(f64, f64)> = curve.points.iter().map(|&(k, f)| (k as f64, f)).collect();
    let mut fit = fit_loglog(&pts, range)?;
    fit.exponent = -fit.exponent + 0.0;
    Ok(fit)
}
