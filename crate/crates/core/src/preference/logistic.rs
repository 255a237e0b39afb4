//! Multinomial logistic regression with an L2 penalty, fitted by full-batch
//! L-BFGS with Armijo backtracking.
//!
//! The objective is the mean cross-entropy plus `l2 / 2 * ||W||^2` (biases
//! are not penalized). Using the mean makes the fit invariant to repeating
//! the training set.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SparseRow;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub l2: f64,
    pub max_iter: usize,
    /// Stop once the gradient's Euclidean norm drops below this.
    pub tol: f64,
    /// Recorded in the model; the optimizer itself is deterministic.
    pub seed: u64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions { l2: 1.0, max_iter: 1000, tol: 1e-6, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub classes: Vec<String>,
    pub features: Vec<String>,
    /// `weights[class][feature]`.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub l2: f64,
    pub seed: u64,
    pub iterations: usize,
    pub converged: bool,
    pub grad_norm: f64,
    pub loss_history: Vec<f64>,
}

impl ClassifierModel {
    pub fn logits(&self, row: &SparseRow) -> Vec<f64> {
        let mut z = self.bias.clone();
        for (k, zk) in z.iter_mut().enumerate() {
            let w = &self.weights[k];
            *zk += row.iter().map(|&(j, x)| w[j] * x).sum::<f64>();
        }
        z
    }

    /// Class index with the largest logit (lowest index on ties).
    pub fn predict(&self, row: &SparseRow) -> usize {
        argmax(&self.logits(row))
    }

    pub fn predict_all(&self, rows: &[SparseRow]) -> Vec<usize> {
        rows.par_iter().map(|r| self.predict(r)).collect()
    }

    pub fn weight_norm(&self) -> f64 {
        self.weights.iter().flatten().map(|w| w * w).sum::<f64>().sqrt()
    }
}

fn argmax(z: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in z.iter().enumerate() {
        if v > z[best] {
            best = i;
        }
    }
    best
}

struct Problem<'a> {
    rows: &'a [SparseRow],
    labels: &'a [usize],
    k: usize,
    dim: usize,
    l2: f64,
}

impl Problem<'_> {
    fn n_params(&self) -> usize {
        self.k * (self.dim + 1)
    }

    /// Loss and gradient at `theta` (weights class-major, then biases).
    fn eval(&self, theta: &[f64], grad: &mut [f64]) -> f64 {
        let (k, dim) = (self.k, self.dim);
        let n = self.rows.len() as f64;
        grad.iter_mut().for_each(|g| *g = 0.0);
        let bias_at = k * dim;
        let mut loss = 0.0;
        let mut z = vec![0.0; k];
        for (row, &y) in self.rows.iter().zip(self.labels) {
            for (c, zc) in z.iter_mut().enumerate() {
                let w = &theta[c * dim..(c + 1) * dim];
                *zc = theta[bias_at + c] + row.iter().map(|&(j, x)| w[j] * x).sum::<f64>();
            }
            let zmax = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = zmax + z.iter().map(|v| (v - zmax).exp()).sum::<f64>().ln();
            loss += lse - z[y];
            for c in 0..k {
                let resid = ((z[c] - lse).exp() - if c == y { 1.0 } else { 0.0 }) / n;
                if resid == 0.0 {
                    continue;
                }
                let g = &mut grad[c * dim..(c + 1) * dim];
                for &(j, x) in row {
                    g[j] += resid * x;
                }
                grad[bias_at + c] += resid;
            }
        }
        let mut penalty = 0.0;
        for (g, &w) in grad[..bias_at].iter_mut().zip(&theta[..bias_at]) {
            *g += self.l2 * w;
            penalty += w * w;
        }
        loss / n + 0.5 * self.l2 * penalty
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const HISTORY: usize = 10;
const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

pub fn train_classifier(
    rows: &[SparseRow],
    labels: &[usize],
    classes: &[String],
    features: &[String],
    opts: &TrainOptions,
) -> Result<ClassifierModel> {
    if rows.len() != labels.len() {
        return Err(Error::invalid(format!("{} rows but {} labels", rows.len(), labels.len())));
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("no training rows".into()));
    }
    let k = classes.len();
    if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
        return Err(Error::invalid(format!("label {bad} out of range for {k} classes")));
    }
    let mut present = vec![false; k];
    labels.iter().for_each(|&l| present[l] = true);
    if present.iter().filter(|&&p| p).count() < 2 {
        return Err(Error::InsufficientData("training needs at least two classes present".into()));
    }
    let dim = features.len();
    if let Some(bad) = rows.iter().flatten().find(|&&(j, x)| j >= dim || !x.is_finite()) {
        return Err(Error::invalid(format!("feature entry {bad:?} is out of range or non-finite")));
    }
    if !(opts.l2 >= 0.0) {
        return Err(Error::invalid("l2 strength must be non-negative"));
    }

    let problem = Problem { rows, labels, k, dim, l2: opts.l2 };
    let np = problem.n_params();
    let mut theta = vec![0.0; np];
    let mut grad = vec![0.0; np];
    let mut loss = problem.eval(&theta, &mut grad);
    let mut history = vec![loss];
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut grad_norm = dot(&grad, &grad).sqrt();
    let mut converged = grad_norm < opts.tol;
    let mut iterations = 0;
    let mut trial = vec![0.0; np];
    let mut trial_grad = vec![0.0; np];

    while !converged && iterations < opts.max_iter {
        // Two-loop recursion for the quasi-Newton direction.
        let mut d: Vec<f64> = grad.iter().map(|g| -g).collect();
        let mut alphas = Vec::with_capacity(pairs.len());
        for (s, y, rho) in pairs.iter().rev() {
            let a = rho * dot(s, &d);
            d.iter_mut().zip(y).for_each(|(di, yi)| *di -= a * yi);
            alphas.push(a);
        }
        if let Some((s, y, _)) = pairs.back() {
            let gamma = dot(s, y) / dot(y, y);
            d.iter_mut().for_each(|di| *di *= gamma);
        } else {
            d.iter_mut().for_each(|di| *di /= grad_norm.max(1.0));
        }
        for ((s, y, rho), a) in pairs.iter().zip(alphas.into_iter().rev()) {
            let b = rho * dot(y, &d);
            d.iter_mut().zip(s).for_each(|(di, si)| *di += (a - b) * si);
        }
        let mut slope = dot(&grad, &d);
        if !(slope < 0.0) {
            // Not a descent direction; fall back to steepest descent.
            pairs.clear();
            d = grad.iter().map(|g| -g / grad_norm.max(1.0)).collect();
            slope = dot(&grad, &d);
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            trial.iter_mut().zip(&theta).zip(&d).for_each(|((t, th), di)| *t = th + step * di);
            let f = problem.eval(&trial, &mut trial_grad);
            if f.is_finite() && f <= loss + ARMIJO_C1 * step * slope {
                accepted = Some(f);
                break;
            }
            step *= 0.5;
        }
        let Some(new_loss) = accepted else { break };
        iterations += 1;

        let s: Vec<f64> = trial.iter().zip(&theta).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = trial_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() && sy > 0.0 {
            if pairs.len() == HISTORY {
                pairs.pop_front();
            }
            pairs.push_back((s, y, 1.0 / sy));
        }
        std::mem::swap(&mut theta, &mut trial);
        std::mem::swap(&mut grad, &mut trial_grad);
        loss = new_loss;
        history.push(loss);
        grad_norm = dot(&grad, &grad).sqrt();
        converged = grad_norm < opts.tol;
    }

    let weights = (0..k).map(|c| theta[c * dim..(c + 1) * dim].to_vec()).collect();
    let bias = theta[k * dim..].to_vec();
    Ok(ClassifierModel {
        classes: classes.to_vec(),
        features: features.to_vec(),
        weights,
        bias,
        l2: opts.l2,
        seed: opts.seed,
        iterations,
        converged,
        grad_norm,
        loss_history: history,
    })
}

/// Feature names with their coefficients, in rank order.
pub type Ranked = Vec<(String, f64)>;

/// Highest and lowest coefficients of one class: `(top positive, top
/// negative)`, each at most `n` long, ties broken by feature name.
pub fn top_coefficients(
    model: &ClassifierModel,
    class: usize,
    n: usize,
) -> Result<(Ranked, Ranked)> {
    let w = model
        .weights
        .get(class)
        .ok_or_else(|| Error::invalid(format!("class index {class} out of range")))?;
    let mut idx: Vec<usize> = (0..w.len()).collect();
    idx.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then_with(|| model.features[a].cmp(&model.features[b])));
    let positive = idx.iter().take(n).map(|&j| (model.features[j].clone(), w[j])).collect();
    idx.sort_by(|&a, &b| w[a].total_cmp(&w[b]).then_with(|| model.features[a].cmp(&model.features[b])));
    let negative = idx.iter().take(n).map(|&j| (model.features[j].clone(), w[j])).collect();
    Ok((positive, negative))
}
