//! Seeded synthetic populations with known ground truth.
//!
//! Every generator derives one RNG per user from the base seed and the
//! user's index, so output does not depend on thread scheduling.

use std::collections::HashSet;
use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Trajectory, Visit};
use crate::patterns::PatternLabel;

/// 2010-01-01T00:00:00Z, the default start of generated timelines.
pub const DEFAULT_START_TS: i64 = 1_262_304_000;

fn user_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn names(prefix: &str, n: usize) -> Vec<Arc<str>> {
    (0..n).map(|i| Arc::from(format!("{prefix}{i}"))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Arrival {
    /// Fixed spacing of `inter_event_seconds`.
    #[default]
    Regular,
    /// Exponential gaps with mean `inter_event_seconds` (at least 1 s).
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EprParams {
    pub rho: f64,
    pub gamma: f64,
    pub n_steps: usize,
    pub inter_event_seconds: i64,
    pub arrival: Arrival,
    pub start_ts: i64,
    pub seed: u64,
}

impl Default for EprParams {
    fn default() -> Self {
        EprParams {
            rho: 0.6,
            gamma: 1.5,
            n_steps: 2000,
            inter_event_seconds: 3600,
            arrival: Arrival::Regular,
            start_ts: DEFAULT_START_TS,
            seed: 0,
        }
    }
}

impl EprParams {
    fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::invalid(format!("rho {} must lie in (0, 1]", self.rho)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::invalid(format!("gamma {} must be non-negative", self.gamma)));
        }
        if self.n_steps < 1 || self.inter_event_seconds < 1 {
            return Err(Error::invalid("n_steps and inter_event_seconds must be positive"));
        }
        Ok(())
    }
}

/// Exploration and preferential return.
///
/// The first visit always opens a new community. Afterwards, with
/// probability `rho * S^-gamma` (S = communities seen so far) the walker
/// explores a new one; otherwise it repeats a uniformly chosen earlier visit,
/// which selects community `i` with probability proportional to its count.
pub fn simulate_epr(params: &EprParams, n_users: usize) -> Result<Vec<Trajectory>> {
    params.validate()?;
    Ok((0..n_users).into_par_iter().map(|u| epr_user(params, u)).collect())
}

fn epr_user(p: &EprParams, index: usize) -> Trajectory {
    let mut rng = user_rng(p.seed, index);
    let mut communities: Vec<Arc<str>> = Vec::new();
    let mut history: Vec<u32> = Vec::with_capacity(p.n_steps);
    let mut visits = Vec::with_capacity(p.n_steps);
    let mut ts = p.start_ts;
    for step in 0..p.n_steps {
        let s = communities.len();
        let explore = s == 0 || rng.random::<f64>() < p.rho * (s as f64).powf(-p.gamma);
        let c = if explore {
            communities.push(Arc::from(format!("c{s}")));
            s as u32
        } else {
            history[rng.random_range(0..history.len())]
        };
        history.push(c);
        if step > 0 {
            ts += match p.arrival {
                Arrival::Regular => p.inter_event_seconds,
                Arrival::Poisson => {
                    let u: f64 = rng.random();
                    ((-(1.0 - u).ln() * p.inter_event_seconds as f64).round() as i64).max(1)
                }
            };
        }
        visits.push(Visit { community: communities[c as usize].clone(), ts });
    }
    Trajectory::new(format!("epr_u{index}"), visits)
}

/// Users over exactly `s` communities with rank-`k` probability
/// proportional to `k^-zeta`. The first `s` visits cover every community
/// once; the remaining visits are independent Zipf draws.
pub fn simulate_zipf_users(
    s: usize,
    zeta: f64,
    visits_per_user: usize,
    n_users: usize,
    seed: u64,
) -> Result<Vec<Trajectory>> {
    if s < 2 {
        return Err(Error::invalid("S must be at least 2"));
    }
    if !(zeta >= 0.0 && zeta.is_finite()) {
        return Err(Error::invalid(format!("zeta {zeta} must be non-negative")));
    }
    if visits_per_user < s {
        return Err(Error::invalid(format!("{visits_per_user} visits cannot cover {s} communities")));
    }
    let weights: Vec<f64> = (1..=s).map(|k| (k as f64).powf(-zeta)).collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::invalid(e.to_string()))?;
    let communities = names("z", s);
    Ok((0..n_users)
        .into_par_iter()
        .map(|u| {
            let mut rng = user_rng(seed, u);
            let visits = (0..visits_per_user)
                .map(|i| {
                    let k = if i < s { i } else { dist.sample(&mut rng) };
                    Visit { community: communities[k].clone(), ts: DEFAULT_START_TS + 60 * i as i64 }
                })
                .collect();
            Trajectory::new(format!("zipf_u{u}"), visits)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicParams {
    pub n_users: usize,
    pub period_hours: u32,
    /// Session start offsets are uniform in `[-jitter, +jitter]`.
    pub jitter_seconds: i64,
    /// Posts per user.
    pub n_visits: usize,
    /// Probability of holding a session in a given period; below 1 this
    /// produces returns after several periods.
    pub attendance: f64,
    /// Posts per session, spaced 1 to 10 minutes apart.
    pub session_posts: usize,
    pub start_ts: i64,
    pub seed: u64,
}

impl Default for PeriodicParams {
    fn default() -> Self {
        PeriodicParams {
            n_users: 1000,
            period_hours: 24,
            jitter_seconds: 1800,
            n_visits: 120,
            attendance: 0.5,
            session_posts: 3,
            start_ts: DEFAULT_START_TS,
            seed: 0,
        }
    }
}

/// Users who post to one home community in sessions that recur every
/// `period_hours`, each session start displaced by uniform jitter.
pub fn simulate_periodic_returners(params: &PeriodicParams) -> Result<Vec<Trajectory>> {
    let p = *params;
    if p.period_hours < 1 {
        return Err(Error::invalid("period must be at least one hour"));
    }
    if p.jitter_seconds < 0 {
        return Err(Error::invalid("jitter must be non-negative"));
    }
    if !(p.attendance > 0.0 && p.attendance <= 1.0) {
        return Err(Error::invalid(format!("attendance {} must lie in (0, 1]", p.attendance)));
    }
    if p.session_posts < 1 {
        return Err(Error::invalid("sessions need at least one post"));
    }
    let period = p.period_hours as i64 * 3600;
    Ok((0..p.n_users)
        .into_par_iter()
        .map(|u| {
            let mut rng = user_rng(p.seed, u);
            let home: Arc<str> = Arc::from(format!("home{u}"));
            let mut visits = Vec::with_capacity(p.n_visits);
            let mut slot: i64 = 0;
            while visits.len() < p.n_visits {
                if rng.random::<f64>() < p.attendance {
                    let jitter = if p.jitter_seconds > 0 {
                        rng.random_range(-p.jitter_seconds..=p.jitter_seconds)
                    } else {
                        0
                    };
                    let mut ts = p.start_ts + slot * period + jitter;
                    for i in 0..p.session_posts.min(p.n_visits - visits.len()) {
                        if i > 0 {
                            ts += rng.random_range(60..=600);
                        }
                        visits.push(Visit { community: home.clone(), ts });
                    }
                }
                slot += 1;
            }
            Trajectory::new(format!("periodic_p{}_u{u}", p.period_hours), visits)
        })
        .collect())
}

/// One cohort of users sharing a mobility pattern.
///
/// Within stage `i` of `num_stages`, a visit opens a new community with
/// probability `explore` (interpolated linearly from start to end);
/// otherwise it goes to the user's home community with probability `focus`
/// and to a uniformly chosen previously visited community else.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CohortSpec {
    pub pattern: PatternLabel,
    pub n_users: usize,
    pub explore_start: f64,
    pub explore_end: f64,
    pub focus_start: f64,
    pub focus_end: f64,
    pub seed: u64,
}

impl CohortSpec {
    /// Default trends for each pattern.
    pub fn for_pattern(pattern: PatternLabel, n_users: usize, seed: u64) -> Self {
        let (explore_start, explore_end, focus_start, focus_end) = match pattern {
            PatternLabel::ExploratoryI => (0.02, 0.5, 0.8, 0.1),
            PatternLabel::ExploratoryII => (0.5, 0.02, 0.1, 0.8),
            PatternLabel::Concentrated => (0.005, 0.005, 0.97, 0.97),
        };
        CohortSpec { pattern, n_users, explore_start, explore_end, focus_start, focus_end, seed }
    }

    fn validate(&self) -> Result<()> {
        for v in [self.explore_start, self.explore_end, self.focus_start, self.focus_end] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!("cohort trend value {v} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CohortOptions {
    pub visits_per_user: usize,
    pub num_stages: usize,
    /// Communities in the shared pool.
    pub general_pool: usize,
    /// Communities in each pattern's own pool.
    pub specific_pool: usize,
    /// Chance that an exploration step draws from the shared pool.
    pub general_share: f64,
    pub start_ts: i64,
    pub spacing_seconds: i64,
}

impl Default for CohortOptions {
    fn default() -> Self {
        CohortOptions {
            visits_per_user: 1200,
            num_stages: 20,
            general_pool: 1000,
            specific_pool: 1000,
            general_share: 0.4,
            start_ts: DEFAULT_START_TS,
            spacing_seconds: 3600,
        }
    }
}

/// Generated users and their cohort labels, in the same order.
#[derive(Debug, Clone)]
pub struct CohortPopulation {
    pub trajectories: Vec<Trajectory>,
    pub labels: Vec<(String, PatternLabel)>,
}

pub fn simulate_pattern_cohorts(specs: &[CohortSpec], opts: &CohortOptions) -> Result<CohortPopulation> {
    if specs.is_empty() {
        return Err(Error::invalid("no cohorts specified"));
    }
    if opts.num_stages < 1 || opts.visits_per_user < 20 * opts.num_stages {
        return Err(Error::invalid(format!(
            "{} visits per user is below 20 per stage for {} stages",
            opts.visits_per_user, opts.num_stages
        )));
    }
    if opts.specific_pool < 1 || !(0.0..=1.0).contains(&opts.general_share) {
        return Err(Error::invalid("pool sizes or general share out of range"));
    }
    if opts.spacing_seconds < 1 {
        return Err(Error::invalid("spacing must be positive"));
    }
    specs.iter().try_for_each(CohortSpec::validate)?;

    let general = names("gen", opts.general_pool);
    let specific: Vec<Vec<Arc<str>>> = PatternLabel::ALL
        .iter()
        .map(|l| names(&format!("{}_", l.as_str().to_ascii_lowercase()), opts.specific_pool))
        .collect();
    let mut jobs = Vec::new();
    for spec in specs {
        for i in 0..spec.n_users {
            jobs.push((spec, i, jobs.len()));
        }
    }
    let width = jobs.len().max(1).to_string().len();
    let users: Vec<Trajectory> = jobs
        .par_iter()
        .map(|&(spec, i, global)| {
            let pools = Pools { general: &general, specific: &specific[spec.pattern.index()], share: opts.general_share };
            cohort_user(spec, opts, &pools, user_rng(spec.seed, i), format!("user{global:0width$}"))
        })
        .collect::<Result<_>>()?;
    let labels = users.iter().zip(&jobs).map(|(t, (spec, _, _))| (t.user.to_string(), spec.pattern)).collect();
    Ok(CohortPopulation { trajectories: users, labels })
}

struct Pools<'a> {
    general: &'a [Arc<str>],
    specific: &'a [Arc<str>],
    share: f64,
}

impl Pools<'_> {
    fn draw_new(&self, rng: &mut ChaCha8Rng, seen: &HashSet<Arc<str>>) -> Option<Arc<str>> {
        let first = if !self.general.is_empty() && rng.random::<f64>() < self.share {
            [self.general, self.specific]
        } else {
            [self.specific, self.general]
        };
        for pool in first {
            if pool.is_empty() {
                continue;
            }
            for _ in 0..32 {
                let c = &pool[rng.random_range(0..pool.len())];
                if !seen.contains(c) {
                    return Some(c.clone());
                }
            }
            let start = rng.random_range(0..pool.len());
            if let Some(c) = (0..pool.len()).map(|k| &pool[(start + k) % pool.len()]).find(|c| !seen.contains(*c)) {
                return Some(c.clone());
            }
        }
        None
    }
}

fn cohort_user(
    spec: &CohortSpec,
    opts: &CohortOptions,
    pools: &Pools<'_>,
    mut rng: ChaCha8Rng,
    user: String,
) -> Result<Trajectory> {
    let n = opts.visits_per_user;
    let stages = opts.num_stages;
    let home = pools.specific[rng.random_range(0..pools.specific.len())].clone();
    let mut seen: HashSet<Arc<str>> = HashSet::from([home.clone()]);
    let mut visited: Vec<Arc<str>> = vec![home.clone()];
    let mut visits = Vec::with_capacity(n);
    for v in 0..n {
        let stage = v * stages / n;
        let frac = if stages > 1 { stage as f64 / (stages - 1) as f64 } else { 0.0 };
        let explore = spec.explore_start + (spec.explore_end - spec.explore_start) * frac;
        let focus = spec.focus_start + (spec.focus_end - spec.focus_start) * frac;
        let community = if v == 0 {
            home.clone()
        } else if rng.random::<f64>() < explore {
            let c = pools.draw_new(&mut rng, &seen).ok_or_else(|| {
                Error::Infeasible(format!("community pools exhausted while generating {user}"))
            })?;
            seen.insert(c.clone());
            visited.push(c.clone());
            c
        } else if rng.random::<f64>() < focus {
            home.clone()
        } else {
            visited[rng.random_range(0..visited.len())].clone()
        };
        visits.push(Visit { community, ts: opts.start_ts + opts.spacing_seconds * v as i64 });
    }
    Ok(Trajectory::new(user, visits))
}

/// The three default cohorts with `n_users` each.
pub fn default_cohorts(n_users: usize, seed: u64) -> Vec<CohortSpec> {
    PatternLabel::ALL
        .iter()
        .enumerate()
        .map(|(i, &l)| CohortSpec::for_pattern(l, n_users, seed.wrapping_add(i as u64)))
        .collect()
}
