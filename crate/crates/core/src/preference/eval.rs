use serde::{Deserialize, Serialize};

use super::{ClassifierModel, SparseRow};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Test rows whose true class is this one.
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricAverages {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classes: Vec<String>,
    pub per_class: Vec<ClassMetrics>,
    pub macro_avg: MetricAverages,
    /// Averages weighted by support.
    pub weighted_avg: MetricAverages,
    pub accuracy: f64,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<u64>>,
    pub n_test: usize,
    pub warnings: Vec<String>,
}

impl EvalReport {
    pub fn class(&self, name: &str) -> Option<&ClassMetrics> {
        self.per_class.iter().find(|m| m.class == name)
    }
}

pub fn evaluate(model: &ClassifierModel, rows: &[SparseRow], labels: &[usize]) -> Result<EvalReport> {
    if rows.len() != labels.len() {
        return Err(Error::invalid(format!("{} rows but {} labels", rows.len(), labels.len())));
    }
    evaluate_predictions(&model.predict_all(rows), labels, &model.classes)
}

/// Precision of a class that is never predicted is reported as 0, with a
/// warning; the same applies to recall of a class absent from `truth`.
pub fn evaluate_predictions(predicted: &[usize], truth: &[usize], classes: &[String]) -> Result<EvalReport> {
    if predicted.len() != truth.len() {
        return Err(Error::invalid("prediction and truth lengths differ"));
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput("test set is empty".into()));
    }
    let k = classes.len();
    let mut confusion = vec![vec![0u64; k]; k];
    for (&p, &t) in predicted.iter().zip(truth) {
        if p >= k || t >= k {
            return Err(Error::invalid(format!("class index out of range for {k} classes")));
        }
        confusion[t][p] += 1;
    }
    let mut warnings = Vec::new();
    let mut per_class = Vec::with_capacity(k);
    for c in 0..k {
        let tp = confusion[c][c] as f64;
        let predicted_c: u64 = (0..k).map(|r| confusion[r][c]).sum();
        let support: u64 = confusion[c].iter().sum();
        let precision = if predicted_c == 0 {
            warnings.push(format!("class {} is never predicted; precision set to 0", classes[c]));
            0.0
        } else {
            tp / predicted_c as f64
        };
        let recall = if support == 0 {
            warnings.push(format!("class {} has no test rows; recall set to 0", classes[c]));
            0.0
        } else {
            tp / support as f64
        };
        let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
        per_class.push(ClassMetrics { class: classes[c].clone(), precision, recall, f1, support });
    }
    let n = truth.len() as f64;
    let avg = |f: &dyn Fn(&ClassMetrics) -> f64, weighted: bool| -> f64 {
        if weighted {
            per_class.iter().map(|m| f(m) * m.support as f64).sum::<f64>() / n
        } else {
            per_class.iter().map(f).sum::<f64>() / k as f64
        }
    };
    let averages = |weighted| MetricAverages {
        precision: avg(&|m| m.precision, weighted),
        recall: avg(&|m| m.recall, weighted),
        f1: avg(&|m| m.f1, weighted),
    };
    let macro_avg = averages(false);
    let weighted_avg = averages(true);
    let accuracy = (0..k).map(|c| confusion[c][c]).sum::<u64>() as f64 / n;
    Ok(EvalReport {
        classes: classes.to_vec(),
        per_class,
        macro_avg,
        weighted_avg,
        accuracy,
        confusion,
        n_test: truth.len(),
        warnings,
    })
}
