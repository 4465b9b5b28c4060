use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::ratio;

/// Classification metrics with AD (label 1) as the positive class. A ratio
/// with a zero denominator is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryMetrics {
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub specificity: Option<f64>,
    pub f1: Option<f64>,
    pub confusion: Confusion,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub r#fn: usize,
}

pub fn confusion(truth: &[u8], pred: &[u8]) -> Confusion {
    let mut c = Confusion::default();
    for (&t, &p) in truth.iter().zip(pred) {
        match (t, p) {
            (1, 1) => c.tp += 1,
            (0, 1) => c.fp += 1,
            (1, _) => c.r#fn += 1,
            _ => c.tn += 1,
        }
    }
    c
}

pub fn binary_metrics(truth: &[u8], pred: &[u8]) -> Result<BinaryMetrics> {
    if truth.is_empty() || truth.len() != pred.len() {
        return Err(Error::data(format!(
            "binary metrics need equal nonempty vectors, got {} and {}",
            truth.len(),
            pred.len()
        )));
    }
    if let Some(v) = truth.iter().chain(pred).find(|&&v| v > 1) {
        return Err(Error::data(format!("label {v} is not binary")));
    }
    let c = confusion(truth, pred);
    let f = |v: usize| v as f64;
    let precision = ratio(f(c.tp), f(c.tp + c.fp));
    let recall = ratio(f(c.tp), f(c.tp + c.r#fn));
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) => ratio(2.0 * p * r, p + r),
        _ => None,
    };
    Ok(BinaryMetrics {
        accuracy: f(c.tp + c.tn) / truth.len() as f64,
        precision,
        recall,
        specificity: ratio(f(c.tn), f(c.tn + c.fp)),
        f1,
        confusion: c,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionMetrics {
    pub rmse: f64,
    pub mae: f64,
}

pub fn regression_metrics(truth: &[f64], pred: &[f64]) -> Result<RegressionMetrics> {
    if truth.is_empty() || truth.len() != pred.len() {
        return Err(Error::data(format!(
            "regression metrics need equal nonempty vectors, got {} and {}",
            truth.len(),
            pred.len()
        )));
    }
    let n = truth.len() as f64;
    let (mut se, mut ae) = (0.0, 0.0);
    for (t, p) in truth.iter().zip(pred) {
        se += (t - p) * (t - p);
        ae += (t - p).abs();
    }
    Ok(RegressionMetrics {
        rmse: (se / n).sqrt(),
        mae: ae / n,
    })
}

/// Element-wise mode of an odd number of aligned label vectors.
pub fn majority_vote(sets: &[Vec<u8>]) -> Result<Vec<u8>> {
    if sets.is_empty() || sets.len() % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "majority vote needs an odd number of prediction sets, got {}",
            sets.len()
        )));
    }
    let n = sets[0].len();
    if sets.iter().any(|s| s.len() != n) {
        return Err(Error::data("prediction sets have different lengths"));
    }
    Ok((0..n)
        .map(|i| {
            let ones = sets.iter().filter(|s| s[i] == 1).count();
            u8::from(2 * ones > sets.len())
        })
        .collect())
}
