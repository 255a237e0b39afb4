//! Predicting a user's mobility pattern from the communities they visit.
//!
//! Features are TF-IDF weighted visit counts over the communities that have
//! enough distinct visitors; the classifier is a multinomial logistic
//! regression (see [`logistic`]).

pub mod eval;
pub mod logistic;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Trajectory;

pub use eval::{evaluate, evaluate_predictions, ClassMetrics, EvalReport, MetricAverages};
pub use logistic::{top_coefficients, train_classifier, ClassifierModel, Ranked, TrainOptions};

pub const DEFAULT_MIN_USERS: usize = 50;
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;

/// Human-readable statement of the weighting, stored alongside results.
pub const TFIDF_FORMULA: &str = "weight(u,c) = count(u,c) * ln(N / df(c)); N = number of users, df(c) = users with count(u,c) > 0";

/// `(column, value)` pairs sorted by column.
pub type SparseRow = Vec<(usize, f64)>;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSpace {
    /// Lexicographically ordered.
    pub communities: Vec<Arc<str>>,
    pub index: HashMap<Arc<str>, usize>,
    /// Distinct visitors of each community, aligned with `communities`.
    pub user_size: Vec<usize>,
    pub min_users: usize,
}

impl FeatureSpace {
    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    pub fn column(&self, community: &str) -> Option<usize> {
        self.index.get(community).copied()
    }

    pub fn names(&self) -> Vec<String> {
        self.communities.iter().map(|c| c.to_string()).collect()
    }
}

/// Communities with at least `min_users` distinct visitors.
pub fn build_feature_space(trajectories: &[Trajectory], min_users: usize) -> Result<FeatureSpace> {
    if min_users < 1 {
        return Err(Error::invalid("min_users must be at least 1"));
    }
    let visitors: BTreeMap<Arc<str>, usize> = trajectories
        .par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<Arc<str>, usize>, t| {
            let distinct: HashSet<&Arc<str>> = t.visits.iter().map(|v| &v.community).collect();
            for c in distinct {
                *acc.entry(c.clone()).or_default() += 1;
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (c, n) in b {
                *a.entry(c).or_default() += n;
            }
            a
        });
    let (communities, user_size): (Vec<Arc<str>>, Vec<usize>) =
        visitors.into_iter().filter(|&(_, n)| n >= min_users).unzip();
    if communities.is_empty() {
        return Err(Error::InsufficientData(format!("no community has at least {min_users} distinct visitors")));
    }
    let index = communities.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    Ok(FeatureSpace { communities, index, user_size, min_users })
}

/// Raw visit counts of one user over the feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct UserCounts {
    pub user: Arc<str>,
    /// `(column, count)` sorted by column; zero counts omitted.
    pub counts: Vec<(usize, u64)>,
}

pub fn count_features(trajectories: &[Trajectory], space: &FeatureSpace) -> Vec<UserCounts> {
    trajectories
        .par_iter()
        .map(|t| {
            let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
            for v in &t.visits {
                if let Some(j) = space.column(&v.community) {
                    *counts.entry(j).or_default() += 1;
                }
            }
            UserCounts { user: t.user.clone(), counts: counts.into_iter().collect() }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedFeatures {
    pub users: Vec<Arc<str>>,
    pub rows: Vec<SparseRow>,
    /// Users whose weights were all zero.
    pub dropped: Vec<Arc<str>>,
    pub idf: Vec<f64>,
    pub n_documents: usize,
    pub formula: &'static str,
}

pub fn tfidf_weight(counts: &[UserCounts], space: &FeatureSpace) -> Result<WeightedFeatures> {
    if counts.is_empty() {
        return Err(Error::EmptyInput("no users to weight".into()));
    }
    let mut df = vec![0usize; space.len()];
    for u in counts {
        for &(j, c) in &u.counts {
            if j >= space.len() {
                return Err(Error::invalid(format!("column {j} outside feature space of {}", space.len())));
            }
            if c > 0 {
                df[j] += 1;
            }
        }
    }
    if let Some(j) = df.iter().position(|&d| d == 0) {
        return Err(Error::invalid(format!(
            "community {} is in the feature space but no user visited it",
            space.communities[j]
        )));
    }
    let n = counts.len();
    let idf: Vec<f64> = df.iter().map(|&d| (n as f64 / d as f64).ln()).collect();
    let mut users = Vec::new();
    let mut rows = Vec::new();
    let mut dropped = Vec::new();
    for u in counts {
        let row: SparseRow =
            u.counts.iter().map(|&(j, c)| (j, c as f64 * idf[j])).filter(|&(_, w)| w > 0.0).collect();
        if row.is_empty() {
            dropped.push(u.user.clone());
        } else {
            users.push(u.user.clone());
            rows.push(row);
        }
    }
    Ok(WeightedFeatures { users, rows, dropped, idf, n_documents: n, formula: TFIDF_FORMULA })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    /// Indices into the input, ascending.
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Seeded shuffle, then the first `floor(fraction * n)` rows train. With
/// `stratified`, the same rule is applied within each class.
pub fn split_train_test(
    labels: &[usize],
    n_classes: usize,
    train_fraction: f64,
    seed: u64,
    stratified: bool,
) -> Result<Split> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::invalid(format!("train fraction {train_fraction} must lie in (0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    let groups: Vec<Vec<usize>> = if stratified {
        let mut g = vec![Vec::new(); n_classes];
        for (i, &l) in labels.iter().enumerate() {
            g.get_mut(l).ok_or_else(|| Error::invalid(format!("label {l} out of range")))?.push(i);
        }
        g
    } else {
        vec![(0..labels.len()).collect()]
    };
    for mut idx in groups {
        idx.shuffle(&mut rng);
        let cut = (train_fraction * idx.len() as f64).floor() as usize;
        train.extend_from_slice(&idx[..cut]);
        test.extend_from_slice(&idx[cut..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    let mut present = vec![false; n_classes];
    for &i in &train {
        if let Some(p) = present.get_mut(labels[i]) {
            *p = true;
        }
    }
    let warnings = present
        .iter()
        .enumerate()
        .filter(|(_, &p)| !p)
        .map(|(c, _)| format!("class {c} is absent from the training set"))
        .collect();
    Ok(Split { train, test, warnings })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationOptions {
    pub min_users: usize,
    pub train_fraction: f64,
    pub stratified: bool,
    pub seed: u64,
    pub train: TrainOptions,
}

impl Default for ClassificationOptions {
    fn default() -> Self {
        ClassificationOptions {
            min_users: DEFAULT_MIN_USERS,
            train_fraction: DEFAULT_TRAIN_FRACTION,
            stratified: false,
            seed: 0,
            train: TrainOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClassificationResult {
    pub space: FeatureSpace,
    pub features: WeightedFeatures,
    /// Labelled users that had no trajectory or were dropped by weighting.
    pub excluded_users: Vec<String>,
    pub split: Split,
    pub model: ClassifierModel,
    pub report: EvalReport,
}

/// Full pipeline: feature space, weighting, split, training, evaluation.
///
/// `labels` maps user id to class index in `classes`; only labelled users
/// take part, and the feature space is built from them alone.
pub fn classify(
    trajectories: &[Trajectory],
    labels: &HashMap<String, usize>,
    classes: &[String],
    opts: &ClassificationOptions,
) -> Result<ClassificationResult> {
    let labelled: Vec<Trajectory> =
        trajectories.iter().filter(|t| labels.contains_key(&*t.user)).cloned().collect();
    if labelled.is_empty() {
        return Err(Error::EmptyInput("no labelled users with trajectories".into()));
    }
    let space = build_feature_space(&labelled, opts.min_users)?;
    let features = tfidf_weight(&count_features(&labelled, &space), &space)?;
    let present: HashSet<&str> = labelled.iter().map(|t| &*t.user).collect();
    let mut excluded_users: Vec<String> =
        labels.keys().filter(|u| !present.contains(u.as_str())).cloned().collect();
    excluded_users.extend(features.dropped.iter().map(|u| u.to_string()));
    excluded_users.sort();

    let y: Vec<usize> = features.users.iter().map(|u| labels[&**u]).collect();
    let split = split_train_test(&y, classes.len(), opts.train_fraction, opts.seed, opts.stratified)?;
    if split.test.is_empty() {
        return Err(Error::InsufficientData("test split is empty".into()));
    }
    let pick = |idx: &[usize]| -> (Vec<SparseRow>, Vec<usize>) {
        idx.iter().map(|&i| (features.rows[i].clone(), y[i])).unzip()
    };
    let (train_x, train_y) = pick(&split.train);
    let (test_x, test_y) = pick(&split.test);
    let train_opts = TrainOptions { seed: opts.seed, ..opts.train };
    let model = train_classifier(&train_x, &train_y, classes, &space.names(), &train_opts)?;
    let mut report = evaluate(&model, &test_x, &test_y)?;
    report.warnings.splice(0..0, split.warnings.iter().cloned());
    if !model.converged {
        report.warnings.push(format!("classifier stopped after {} iterations without converging", model.iterations));
    }
    Ok(ClassificationResult { space, features, excluded_users, split, model, report })
}
