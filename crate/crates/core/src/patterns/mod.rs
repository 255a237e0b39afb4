//! Lifespan stages, stage-wise mobility vectors and their decomposition into
//! mobility patterns.
//!
//! A user's visits are split into equal-count stages. Each stage yields its
//! entropy, `max_frq` and the share of visits going to communities never seen
//! in an earlier stage. The concatenation (entropy, max_frq, p_new without
//! stage 1) is the user's mobility vector; stacking them gives a users x
//! features matrix that NMF splits into pattern profiles `H` and user weights
//! `W`.

pub mod nmf;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::least_squares;
use crate::error::{Error, Result};
use crate::ingest::{Trajectory, Visit};
use crate::randomness::{distribution_of, entropy, is_active, max_frq};

pub use nmf::{nmf_factorize, NmfModel, NmfOptions};

pub const DEFAULT_STAGES: usize = 20;

/// Relative tolerance below which two component slopes count as tied.
pub const SLOPE_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PatternLabel {
    /// Concentrated early, exploring late.
    #[serde(rename = "EXPLORATORY_I")]
    ExploratoryI,
    /// Exploring early, concentrated late.
    #[serde(rename = "EXPLORATORY_II")]
    ExploratoryII,
    /// Concentrated throughout.
    #[serde(rename = "CONCENTRATED")]
    Concentrated,
}

impl PatternLabel {
    /// Canonical order, also used to break ties between equal weights.
    pub const ALL: [PatternLabel; 3] = [PatternLabel::ExploratoryI, PatternLabel::ExploratoryII, PatternLabel::Concentrated];

    pub fn as_str(self) -> &'static str {
        match self {
            PatternLabel::ExploratoryI => "EXPLORATORY_I",
            PatternLabel::ExploratoryII => "EXPLORATORY_II",
            PatternLabel::Concentrated => "CONCENTRATED",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for PatternLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PatternLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PatternLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown pattern label {s:?}")))
    }
}

/// Users who stopped posting before `cutoff_ts` and pass the active filter.
pub fn select_departed_users(
    trajectories: &[Trajectory],
    cutoff_ts: i64,
    min_distinct: usize,
    min_visits: usize,
) -> Vec<Trajectory> {
    trajectories
        .iter()
        .filter(|t| t.last_ts().is_some_and(|ts| ts < cutoff_ts) && is_active(t, min_distinct, min_visits))
        .cloned()
        .collect()
}

/// Splits a trajectory into `num_stages` consecutive slices; stage `i`
/// (1-indexed) holds visit indices `floor((i-1)T/n) <= j < floor(iT/n)`.
pub fn segment_stages(t: &Trajectory, num_stages: usize) -> Result<Vec<&[Visit]>> {
    let total = t.visits.len();
    if num_stages < 2 {
        return Err(Error::invalid("need at least 2 stages"));
    }
    if total < num_stages {
        return Err(Error::InsufficientData(format!(
            "user {} has {total} visits, fewer than {num_stages} stages",
            t.user
        )));
    }
    Ok((1..=num_stages)
        .map(|i| {
            let lo = (i - 1) * total / num_stages;
            let hi = i * total / num_stages;
            &t.visits[lo..hi]
        })
        .collect())
}

/// Per-stage mobility measurements of one user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageMetrics {
    pub user: String,
    pub stage_entropy: Vec<f64>,
    pub stage_max_frq: Vec<f64>,
    /// Stages 2..=n; stage 1 is always entirely new and is left out.
    pub p_new: Vec<f64>,
}

impl StageMetrics {
    pub fn num_stages(&self) -> usize {
        self.stage_entropy.len()
    }

    /// The mobility vector: entropy, then max_frq, then p_new.
    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(3 * self.num_stages() - 1);
        v.extend_from_slice(&self.stage_entropy);
        v.extend_from_slice(&self.stage_max_frq);
        v.extend_from_slice(&self.p_new);
        v
    }
}

pub fn stage_metrics(user: &str, stages: &[&[Visit]]) -> Result<StageMetrics> {
    if stages.len() < 2 {
        return Err(Error::invalid("need at least 2 stages"));
    }
    let user_id: Arc<str> = user.into();
    let mut stage_entropy = Vec::with_capacity(stages.len());
    let mut stage_max_frq = Vec::with_capacity(stages.len());
    let mut p_new = Vec::with_capacity(stages.len() - 1);
    let mut seen: HashSet<&str> = HashSet::new();
    for (i, stage) in stages.iter().enumerate() {
        if stage.is_empty() {
            return Err(Error::InsufficientData(format!("user {user}: stage {} is empty", i + 1)));
        }
        let d = distribution_of(user_id.clone(), stage)?;
        stage_entropy.push(entropy(&d));
        stage_max_frq.push(max_frq(&d));
        if i > 0 {
            let fresh = stage.iter().filter(|v| !seen.contains(&*v.community)).count();
            p_new.push(fresh as f64 / stage.len() as f64);
        }
        seen.extend(stage.iter().map(|v| &*v.community));
    }
    Ok(StageMetrics { user: user.to_owned(), stage_entropy, stage_max_frq, p_new })
}

/// Segments and measures one trajectory.
pub fn trajectory_metrics(t: &Trajectory, num_stages: usize) -> Result<StageMetrics> {
    stage_metrics(&t.user, &segment_stages(t, num_stages)?)
}

/// Canonical column names: `ent01..`, `mf01..`, `pn02..`.
pub fn column_names(num_stages: usize) -> Vec<String> {
    let mut cols: Vec<String> = (1..=num_stages).map(|i| format!("ent{i:02}")).collect();
    cols.extend((1..=num_stages).map(|i| format!("mf{i:02}")));
    cols.extend((2..=num_stages).map(|i| format!("pn{i:02}")));
    cols
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scaling {
    #[default]
    Raw,
    /// Every column divided by its maximum (all-zero columns untouched).
    PerFeatureMax,
}

impl FromStr for Scaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Scaling::Raw),
            "per-feature-max" => Ok(Scaling::PerFeatureMax),
            _ => Err(Error::invalid(format!("unknown scaling mode {s:?}"))),
        }
    }
}

/// Users x features matrix with its row and column metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct MobilityMatrix {
    pub data: Array2<f64>,
    pub users: Vec<String>,
    pub columns: Vec<String>,
    pub num_stages: usize,
    /// Divisor applied to each column (all ones for raw mode).
    pub column_scale: Vec<f64>,
}

pub fn build_matrix(metrics: &[StageMetrics], scaling: Scaling) -> Result<MobilityMatrix> {
    let Some(first) = metrics.first() else {
        return Err(Error::EmptyInput("no users to stack".into()));
    };
    let num_stages = first.num_stages();
    let columns = column_names(num_stages);
    let dim = columns.len();
    let mut data = Array2::zeros((metrics.len(), dim));
    for (r, m) in metrics.iter().enumerate() {
        let v = m.to_vector();
        if v.len() != dim {
            return Err(Error::invalid(format!("user {} has {} features, expected {dim}", m.user, v.len())));
        }
        for (c, x) in v.into_iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite { user: m.user.clone(), column: columns[c].clone() });
            }
            data[[r, c]] = x;
        }
    }
    let mut column_scale = vec![1.0; dim];
    if scaling == Scaling::PerFeatureMax {
        for (c, mut col) in data.columns_mut().into_iter().enumerate() {
            let max = col.iter().cloned().fold(0.0, f64::max);
            if max > 0.0 {
                col.mapv_inplace(|x| x / max);
                column_scale[c] = max;
            }
        }
    }
    Ok(MobilityMatrix {
        data,
        users: metrics.iter().map(|m| m.user.clone()).collect(),
        columns,
        num_stages,
        column_scale,
    })
}

/// Trend summary of one NMF component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentProfile {
    pub entropy_slope: f64,
    pub p_new_slope: f64,
    pub mean_max_frq: f64,
}

fn stage_slope(values: &[f64], first_stage: usize) -> f64 {
    let x: Vec<f64> = (0..values.len()).map(|i| (first_stage + i) as f64).collect();
    least_squares(&x, values).0
}

/// Slopes over stage index of each component's entropy and p_new blocks,
/// and the mean of its max_frq block.
pub fn component_profiles(h: &Array2<f64>, num_stages: usize) -> Result<Vec<ComponentProfile>> {
    let n = num_stages;
    if h.ncols() != 3 * n - 1 {
        return Err(Error::invalid(format!("H has {} columns, expected {}", h.ncols(), 3 * n - 1)));
    }
    Ok(h.rows()
        .into_iter()
        .map(|row| {
            let row = row.to_vec();
            ComponentProfile {
                entropy_slope: stage_slope(&row[..n], 1),
                p_new_slope: stage_slope(&row[2 * n..], 2),
                mean_max_frq: row[n..2 * n].iter().sum::<f64>() / n as f64,
            }
        })
        .collect())
}

/// Names the three components: rising entropy is Exploratory I, falling
/// entropy is Exploratory II, the remaining one is Concentrated.
pub fn label_components(h: &Array2<f64>, num_stages: usize) -> Result<Vec<PatternLabel>> {
    if h.nrows() != 3 {
        return Err(Error::invalid(format!("automatic labeling needs k = 3, got {}", h.nrows())));
    }
    let profiles = component_profiles(h, num_stages)?;
    let slopes: Vec<f64> = profiles.iter().map(|p| p.entropy_slope).collect();
    if slopes.iter().any(|s| !s.is_finite()) {
        return Err(Error::AmbiguousLabels("non-finite entropy slope".into()));
    }
    let scale = slopes.iter().fold(1.0f64, |m, s| m.max(s.abs()));
    for i in 0..3 {
        for j in i + 1..3 {
            if (slopes[i] - slopes[j]).abs() <= SLOPE_TIE_TOLERANCE * scale {
                return Err(Error::AmbiguousLabels(format!(
                    "components {i} and {j} have entropy slopes {} and {}",
                    slopes[i], slopes[j]
                )));
            }
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| slopes[a].total_cmp(&slopes[b]));
    let mut labels = [PatternLabel::Concentrated; 3];
    labels[order[2]] = PatternLabel::ExploratoryI;
    labels[order[0]] = PatternLabel::ExploratoryII;
    Ok(labels.to_vec())
}

/// Each row's label is that of its heaviest component; ties go to the label
/// that comes first in [`PatternLabel::ALL`].
pub fn assign_patterns(w: &Array2<f64>, component_labels: &[PatternLabel]) -> Result<Vec<PatternLabel>> {
    if w.ncols() != component_labels.len() {
        return Err(Error::invalid(format!(
            "W has {} components but {} labels were given",
            w.ncols(),
            component_labels.len()
        )));
    }
    let mut by_label: Vec<usize> = (0..component_labels.len()).collect();
    by_label.sort_by_key(|&c| component_labels[c]);
    w.rows()
        .into_iter()
        .enumerate()
        .map(|(r, row)| {
            let mut best: Option<(usize, f64)> = None;
            for &c in &by_label {
                let v = row[c];
                if v > 0.0 && best.is_none_or(|(_, b)| v > b) {
                    best = Some((c, v));
                }
            }
            best.map(|(c, _)| component_labels[c]).ok_or(Error::ZeroWeights { row: r })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PatternOptions {
    pub num_stages: usize,
    pub scaling: Scaling,
    pub nmf: NmfOptions,
}

impl Default for PatternOptions {
    fn default() -> Self {
        PatternOptions { num_stages: DEFAULT_STAGES, scaling: Scaling::Raw, nmf: NmfOptions::default() }
    }
}

/// Everything the pattern pipeline produces.
#[derive(Debug, Clone)]
pub struct PatternAnalysis {
    pub matrix: MobilityMatrix,
    pub model: NmfModel,
    pub profiles: Vec<ComponentProfile>,
    /// Present when `k = 3`.
    pub component_labels: Option<Vec<PatternLabel>>,
    /// Per matrix row, present when components are labeled.
    pub assignments: Option<Vec<PatternLabel>>,
}

/// Stage metrics, matrix, NMF, labeling and assignment in one pass. Users
/// are expected to be pre-selected (departed and active).
pub fn analyze_patterns(trajectories: &[Trajectory], opts: &PatternOptions) -> Result<PatternAnalysis> {
    let metrics: Vec<StageMetrics> = trajectories
        .par_iter()
        .map(|t| trajectory_metrics(t, opts.num_stages))
        .collect::<Result<_>>()?;
    let matrix = build_matrix(&metrics, opts.scaling)?;
    let model = nmf_factorize(&matrix.data, &opts.nmf)?;
    let profiles = component_profiles(&model.h, opts.num_stages)?;
    let (component_labels, assignments) = if opts.nmf.k == 3 {
        let labels = label_components(&model.h, opts.num_stages)?;
        let assigned = assign_patterns(&model.w, &labels)?;
        (Some(labels), Some(assigned))
    } else {
        (None, None)
    };
    Ok(PatternAnalysis { matrix, model, profiles, component_labels, assignments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    fn traj_of(names: &[String]) -> Trajectory {
        let visits = names.iter().enumerate().map(|(i, c)| Visit { community: c.as_str().into(), ts: i as i64 }).collect();
        Trajectory::new("u", visits)
    }

    fn n_visits(n: usize, name: impl Fn(usize) -> String) -> Trajectory {
        traj_of(&(0..n).map(name).collect::<Vec<_>>())
    }

    #[test]
    fn departed_selection() {
        let active = n_visits(1001, |i| format!("c{}", i % 3));
        let mut late = active.clone();
        late.visits.last_mut().unwrap().ts = 5000;
        let sel = select_departed_users(&[active.clone(), late], 2000, 2, 1000);
        assert_eq!(sel, vec![active]);
        assert!(select_departed_users(&[], 0, 2, 1000).is_empty());
    }

    #[test]
    fn even_stage_sizes() {
        let t = n_visits(20, |i| format!("c{i}"));
        assert!(segment_stages(&t, 20).unwrap().iter().all(|s| s.len() == 1));
        let t = n_visits(100, |i| format!("c{i}"));
        assert!(segment_stages(&t, 20).unwrap().iter().all(|s| s.len() == 5));
        let t = n_visits(19, |i| format!("c{i}"));
        assert!(matches!(segment_stages(&t, 20), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn uneven_stage_sizes_follow_floor_boundaries() {
        // floor(i * 23 / 20) for i = 0..=20
        let bounds = [0, 1, 2, 3, 4, 5, 6, 8, 9, 10, 11, 12, 13, 14, 16, 17, 18, 19, 20, 21, 23];
        let expected: Vec<usize> = bounds.windows(2).map(|w| w[1] - w[0]).collect();
        let t = n_visits(23, |i| format!("c{i}"));
        let sizes: Vec<usize> = segment_stages(&t, 20).unwrap().iter().map(|s| s.len()).collect();
        assert_eq!(sizes, expected);
        assert_eq!(sizes.iter().sum::<usize>(), 23);
    }

    #[test]
    fn concentrated_limit() {
        let t = n_visits(60, |_| "x".into());
        let m = trajectory_metrics(&t, 20).unwrap();
        assert!(m.stage_entropy.iter().all(|&e| e == 0.0));
        assert!(m.stage_max_frq.iter().all(|&v| v == 1.0));
        assert_eq!(m.p_new, vec![0.0; 19]);
        assert_eq!(m.to_vector().len(), 59);
    }

    #[test]
    fn never_revisiting_user_is_always_new() {
        let t = n_visits(40, |i| format!("c{i}"));
        let m = trajectory_metrics(&t, 20).unwrap();
        assert_eq!(m.p_new, vec![1.0; 19]);
    }

    #[test]
    fn p_new_counts_visits_to_unseen_communities() {
        let s1 = [Visit { community: "a".into(), ts: 0 }];
        let s2 = [
            Visit { community: "a".into(), ts: 1 },
            Visit { community: "a".into(), ts: 2 },
            Visit { community: "b".into(), ts: 3 },
        ];
        let m = stage_metrics("u", &[&s1, &s2]).unwrap();
        assert_eq!(m.p_new, vec![1.0 / 3.0]);
        assert!(stage_metrics("u", &[&s1, &[]]).is_err());
    }

    fn metrics(user: &str, e: f64, mf: f64, pn: f64) -> StageMetrics {
        StageMetrics { user: user.into(), stage_entropy: vec![e; 20], stage_max_frq: vec![mf; 20], p_new: vec![pn; 19] }
    }

    #[test]
    fn matrix_rows_and_scaling() {
        let m = metrics("a", 1.5, 0.4, 0.2);
        let rows = vec![m.clone(), m.clone(), m.clone()];
        let mm = build_matrix(&rows, Scaling::Raw).unwrap();
        assert_eq!(mm.data.dim(), (3, 59));
        assert_eq!(mm.data.row(0), mm.data.row(2));
        assert_eq!(mm.data.row(1).to_vec(), m.to_vector());
        assert_eq!(mm.columns[0], "ent01");
        assert_eq!(mm.columns[20], "mf01");
        assert_eq!(mm.columns[40], "pn02");
        assert_eq!(mm.columns[58], "pn20");

        let rows = vec![metrics("a", 1.0, 0.5, 0.0), metrics("b", 3.0, 0.25, 0.0)];
        let mm = build_matrix(&rows, Scaling::PerFeatureMax).unwrap();
        for (c, col) in mm.data.columns().into_iter().enumerate() {
            let max = col.iter().cloned().fold(0.0, f64::max);
            if c < 40 {
                assert_eq!(max, 1.0);
            } else {
                assert_eq!(max, 0.0);
            }
        }

        let mut bad = metrics("z", 1.0, 0.5, 0.0);
        bad.stage_max_frq[3] = f64::NAN;
        match build_matrix(&[bad], Scaling::Raw) {
            Err(Error::NonFinite { user, column }) => {
                assert_eq!(user, "z");
                assert_eq!(column, "mf04");
            }
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    fn trend_row(ent: impl Fn(f64) -> f64, mf: impl Fn(f64) -> f64, pn: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut row: Vec<f64> = (1..=20).map(|i| ent(i as f64)).collect();
        row.extend((1..=20).map(|i| mf(i as f64)));
        row.extend((2..=20).map(|i| pn(i as f64)));
        row
    }

    fn synthetic_h() -> Array2<f64> {
        let rising = trend_row(|i| 0.5 + 0.2 * i, |i| 0.9 - 0.03 * i, |i| 0.02 * i);
        let falling = trend_row(|i| 4.5 - 0.2 * i, |i| 0.2 + 0.03 * i, |i| 0.5 - 0.02 * i);
        let flat = trend_row(|_| 0.3, |_| 0.95, |_| 0.01);
        let mut h = Array2::zeros((3, 59));
        for (r, row) in [rising, falling, flat].into_iter().enumerate() {
            for (c, v) in row.into_iter().enumerate() {
                h[[r, c]] = v;
            }
        }
        h
    }

    #[test]
    fn labels_follow_entropy_trend() {
        let h = synthetic_h();
        let labels = label_components(&h, 20).unwrap();
        assert_eq!(labels, vec![PatternLabel::ExploratoryI, PatternLabel::ExploratoryII, PatternLabel::Concentrated]);
        let p = component_profiles(&h, 20).unwrap();
        assert!(p[2].mean_max_frq > p[0].mean_max_frq && p[2].mean_max_frq > p[1].mean_max_frq);
        assert!(p[0].p_new_slope > 0.0 && p[1].p_new_slope < 0.0);
    }

    #[test]
    fn labels_are_permutation_equivariant() {
        let h = synthetic_h();
        let base = label_components(&h, 20).unwrap();
        for perm in [[1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0]] {
            let mut hp = Array2::zeros((3, 59));
            for (r, &src) in perm.iter().enumerate() {
                hp.row_mut(r).assign(&h.row(src));
            }
            let labels = label_components(&hp, 20).unwrap();
            for (r, &src) in perm.iter().enumerate() {
                assert_eq!(labels[r], base[src]);
            }
        }
    }

    #[test]
    fn tied_slopes_are_rejected() {
        let mut h = synthetic_h();
        let row0 = h.row(0).to_owned();
        h.row_mut(2).assign(&row0);
        assert!(matches!(label_components(&h, 20), Err(Error::AmbiguousLabels(_))));
        let h4 = Array2::<f64>::zeros((4, 59));
        assert!(label_components(&h4, 20).is_err());
    }

    #[test]
    fn argmax_assignment() {
        let labels = [PatternLabel::ExploratoryI, PatternLabel::ExploratoryII, PatternLabel::Concentrated];
        let w = array![[0.9, 0.05, 0.05], [9.0, 0.5, 0.5], [0.1, 0.1, 0.3]];
        let got = assign_patterns(&w, &labels).unwrap();
        assert_eq!(got, vec![PatternLabel::ExploratoryI, PatternLabel::ExploratoryI, PatternLabel::Concentrated]);
        // tie between components labeled CONCENTRATED and EXPLORATORY_II
        let relabeled = [PatternLabel::Concentrated, PatternLabel::ExploratoryII, PatternLabel::ExploratoryI];
        let w = array![[0.5, 0.5, 0.1]];
        assert_eq!(assign_patterns(&w, &relabeled).unwrap(), vec![PatternLabel::ExploratoryII]);
        let w = array![[0.0, 0.0, 0.0]];
        assert!(matches!(assign_patterns(&w, &labels), Err(Error::ZeroWeights { row: 0 })));
    }

    #[test]
    fn label_strings_round_trip() {
        for l in PatternLabel::ALL {
            assert_eq!(l.as_str().parse::<PatternLabel>().unwrap(), l);
        }
        assert!("OTHER".parse::<PatternLabel>().is_err());
    }

    proptest! {
        #[test]
        fn stages_partition_the_trajectory(len in 20usize..400, stages in 2usize..21) {
            let t = n_visits(len, |i| format!("c{}", i % 7));
            let parts = segment_stages(&t, stages).unwrap();
            prop_assert_eq!(parts.len(), stages);
            let joined: Vec<Visit> = parts.iter().flat_map(|s| s.iter().cloned()).collect();
            prop_assert_eq!(joined, t.visits.clone());
            let m = trajectory_metrics(&t, stages).unwrap();
            prop_assert!(m.p_new.iter().all(|&p| (0.0..=1.0).contains(&p)));
        }

        #[test]
        fn assignment_invariant_to_row_scaling(rows in prop::collection::vec((0.01f64..5.0, 0.01f64..5.0, 0.01f64..5.0, 0.1f64..100.0), 1..30)) {
            let labels = [PatternLabel::ExploratoryI, PatternLabel::ExploratoryII, PatternLabel::Concentrated];
            let w = Array2::from_shape_fn((rows.len(), 3), |(r, c)| [rows[r].0, rows[r].1, rows[r].2][c]);
            let scaled = Array2::from_shape_fn((rows.len(), 3), |(r, c)| w[[r, c]] * rows[r].3);
            prop_assert_eq!(assign_patterns(&w, &labels).unwrap(), assign_patterns(&scaled, &labels).unwrap());
        }
    }
}
