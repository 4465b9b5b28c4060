use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gaussian naive Bayes with fixed class priors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    /// `[class][feature]`
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
    pub priors: [f64; 2],
    pub epsilon: f64,
}

fn class_stats(x: &[Vec<f64>], y: &[u8], class: u8) -> (Vec<f64>, Vec<f64>) {
    let rows: Vec<&Vec<f64>> = x.iter().zip(y).filter(|(_, &c)| c == class).map(|(r, _)| r).collect();
    let n = rows.len() as f64;
    let d = x[0].len();
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let var = (0..d)
        .map(|j| rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n)
        .collect();
    (mean, var)
}

impl GaussianNb {
    /// `var_smoothing` is relative to the largest feature variance over
    /// all training rows.
    pub fn fit(x: &[Vec<f64>], y: &[u8], var_smoothing: f64, priors: [f64; 2]) -> Result<Self> {
        if !y.contains(&0) || !y.contains(&1) {
            return Err(Error::data("naive Bayes needs both classes present"));
        }
        let (all_mean, _) = class_stats(x, &vec![0; x.len()], 0);
        let n = x.len() as f64;
        let max_var = (0..all_mean.len())
            .map(|j| x.iter().map(|r| (r[j] - all_mean[j]).powi(2)).sum::<f64>() / n)
            .fold(0.0, f64::max);
        // all-constant data: any positive epsilon gives equal likelihoods
        let epsilon = if max_var > 0.0 { var_smoothing * max_var } else { 1.0 };
        let (m0, mut v0) = class_stats(x, y, 0);
        let (m1, mut v1) = class_stats(x, y, 1);
        v0.iter_mut().chain(v1.iter_mut()).for_each(|v| *v += epsilon);
        Ok(GaussianNb {
            means: [m0, m1],
            variances: [v0, v1],
            priors,
            epsilon,
        })
    }

    pub fn joint_log_likelihood(&self, row: &[f64]) -> [f64; 2] {
        std::array::from_fn(|c| {
            let mut s = self.priors[c].ln();
            for ((x, m), v) in row.iter().zip(&self.means[c]).zip(&self.variances[c]) {
                s -= 0.5 * (2.0 * std::f64::consts::PI * v).ln() + 0.5 * (x - m).powi(2) / v;
            }
            s
        })
    }

    /// Posterior class probabilities `[P(non-AD), P(AD)]`.
    pub fn predict_proba(&self, row: &[f64]) -> [f64; 2] {
        let j = self.joint_log_likelihood(row);
        let m = j[0].max(j[1]);
        let e = [(j[0] - m).exp(), (j[1] - m).exp()];
        let z = e[0] + e[1];
        [e[0] / z, e[1] / z]
    }

    pub fn predict(&self, row: &[f64]) -> u8 {
        let j = self.joint_log_likelihood(row);
        u8::from(j[1] > j[0])
    }
}
