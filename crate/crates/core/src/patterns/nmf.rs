//! Non-negative matrix factorization with Frobenius-norm multiplicative
//! updates.

use ndarray::{Array2, Zip};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Guards the multiplicative-update denominators against division by zero.
pub const EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NmfOptions {
    pub k: usize,
    pub max_iter: usize,
    /// Stop once the relative error improves by less than this fraction.
    pub tol: f64,
    pub seed: u64,
}

impl Default for NmfOptions {
    fn default() -> Self {
        NmfOptions { k: 3, max_iter: 500, tol: 1e-5, seed: 0 }
    }
}

/// `X ~ W H` with `W` (rows x k) and `H` (k x columns) non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct NmfModel {
    pub w: Array2<f64>,
    pub h: Array2<f64>,
    /// `||X - WH||_F` at the final iterate.
    pub frobenius_error: f64,
    /// `||X - WH||_F / ||X||_F`, starting with the random initialization.
    pub error_history: Vec<f64>,
    pub iterations: usize,
    /// Whether the tolerance (rather than `max_iter`) ended the run.
    pub converged: bool,
    pub seed: u64,
}

impl NmfModel {
    pub fn relative_error(&self) -> f64 {
        *self.error_history.last().expect("history holds at least the initial error")
    }

    pub fn reconstruct(&self) -> Array2<f64> {
        self.w.dot(&self.h)
    }
}

fn frobenius_residual(x: &Array2<f64>, w: &Array2<f64>, h: &Array2<f64>) -> f64 {
    let wh = w.dot(h);
    Zip::from(x).and(&wh).fold(0.0, |acc, &a, &b| acc + (a - b) * (a - b)).sqrt()
}

/// Checks that every entry is finite and non-negative.
pub fn check_nonnegative(x: &Array2<f64>) -> Result<()> {
    for ((row, col), &value) in x.indexed_iter() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::NegativeEntry { row, col, value });
        }
    }
    Ok(())
}

pub fn nmf_factorize(x: &Array2<f64>, opts: &NmfOptions) -> Result<NmfModel> {
    let (n, m) = x.dim();
    if opts.k < 1 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if opts.max_iter < 1 {
        return Err(Error::invalid("max_iter must be at least 1"));
    }
    if !(opts.tol >= 0.0) {
        return Err(Error::invalid("tol must be non-negative"));
    }
    if n < opts.k || m == 0 {
        return Err(Error::InsufficientData(format!("{n} x {m} matrix cannot be factorized with k = {}", opts.k)));
    }
    check_nonnegative(x)?;
    let norm_x = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm_x == 0.0 {
        return Err(Error::InsufficientData("matrix is identically zero".into()));
    }

    // Uniform entries scaled so that WH starts at the data's mean level.
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let scale = (x.mean().unwrap_or(0.0) / opts.k as f64).sqrt();
    let mut w = Array2::from_shape_simple_fn((n, opts.k), || rng.random::<f64>() * scale);
    let mut h = Array2::from_shape_simple_fn((opts.k, m), || rng.random::<f64>() * scale);

    let mut history = vec![frobenius_residual(x, &w, &h) / norm_x];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        let wt_x = w.t().dot(x);
        let wt_w_h = w.t().dot(&w).dot(&h);
        Zip::from(&mut h).and(&wt_x).and(&wt_w_h).for_each(|hv, &num, &den| {
            *hv *= num / (den + EPSILON);
        });

        let x_ht = x.dot(&h.t());
        let w_h_ht = w.dot(&h.dot(&h.t()));
        Zip::from(&mut w).and(&x_ht).and(&w_h_ht).for_each(|wv, &num, &den| {
            *wv *= num / (den + EPSILON);
        });

        iterations += 1;
        let prev = *history.last().unwrap();
        let err = frobenius_residual(x, &w, &h) / norm_x;
        history.push(err);
        if prev == 0.0 || (prev - err) / prev < opts.tol {
            converged = true;
            break;
        }
    }
    let frobenius_error = history.last().unwrap() * norm_x;
    Ok(NmfModel { w, h, frobenius_error, error_history: history, iterations, converged, seed: opts.seed })
}
