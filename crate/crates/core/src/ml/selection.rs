use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One-way ANOVA F statistic of each column against binary labels.
///
/// A column with no within-class spread scores `+inf` when the class
/// means differ and 0 when they do not.
pub fn anova_f_classif(x: &[Vec<f64>], y: &[u8]) -> Result<Vec<f64>> {
    let n = x.len();
    let n1 = y.iter().filter(|&&c| c == 1).count();
    let n0 = n - n1;
    if n0 == 0 || n1 == 0 {
        return Err(Error::data("ANOVA F needs both classes present"));
    }
    let d = x[0].len();
    let mut scores = Vec::with_capacity(d);
    for j in 0..d {
        let (mut s0, mut s1) = (0.0, 0.0);
        for (row, &c) in x.iter().zip(y) {
            if c == 1 {
                s1 += row[j];
            } else {
                s0 += row[j];
            }
        }
        let (m0, m1) = (s0 / n0 as f64, s1 / n1 as f64);
        let m = (s0 + s1) / n as f64;
        let between = n0 as f64 * (m0 - m).powi(2) + n1 as f64 * (m1 - m).powi(2);
        let within: f64 = x
            .iter()
            .zip(y)
            .map(|(row, &c)| (row[j] - if c == 1 { m1 } else { m0 }).powi(2))
            .sum();
        scores.push(f_ratio(between, within, n - 2, m0 == m1));
    }
    Ok(scores)
}

fn f_ratio(between: f64, within: f64, df: usize, same_means: bool) -> f64 {
    if same_means || between == 0.0 {
        0.0
    } else if within == 0.0 {
        f64::INFINITY
    } else {
        between / (within / df as f64)
    }
}

/// F statistic from each column's Pearson correlation with a continuous
/// target: `r^2 / (1 - r^2) * (n - 2)`.
pub fn f_regression_scores(x: &[Vec<f64>], target: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if n < 3 {
        return Err(Error::data("regression F needs at least 3 samples"));
    }
    let d = x[0].len();
    let ty = target.iter().sum::<f64>() / n as f64;
    let syy: f64 = target.iter().map(|t| (t - ty).powi(2)).sum();
    let mut scores = Vec::with_capacity(d);
    for j in 0..d {
        let mx = x.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for (row, t) in x.iter().zip(target) {
            let dx = row[j] - mx;
            sxy += dx * (t - ty);
            sxx += dx * dx;
        }
        if sxx == 0.0 || syy == 0.0 {
            scores.push(0.0);
            continue;
        }
        let r2 = (sxy * sxy / (sxx * syy)).min(1.0);
        scores.push(if r2 >= 1.0 { f64::INFINITY } else { r2 / (1.0 - r2) * (n - 2) as f64 });
    }
    Ok(scores)
}

/// Indices of the `k` highest scores, best first; ties go to the lower
/// index and NaN ranks last.
pub fn select_top_k(scores: &[f64], k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > scores.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} is outside 1..={} features",
            scores.len()
        )));
    }
    let key = |s: f64| if s.is_nan() { f64::NEG_INFINITY } else { s };
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| key(scores[b]).total_cmp(&key(scores[a])).then(a.cmp(&b)));
    idx.truncate(k);
    Ok(idx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorState {
    pub scores: Vec<f64>,
    /// Chosen columns, best first.
    pub chosen: Vec<usize>,
}

impl SelectorState {
    pub fn all(d: usize) -> Self {
        SelectorState {
            scores: Vec::new(),
            chosen: (0..d).collect(),
        }
    }

    pub fn fit(scores: Vec<f64>, k: usize) -> Result<Self> {
        let chosen = select_top_k(&scores, k)?;
        Ok(SelectorState { scores, chosen })
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        self.chosen.iter().map(|&j| row[j]).collect()
    }
}
