use serde::{Deserialize, Serialize};

use super::linalg::{column_means, dot, solve_spd};
use crate::error::{Error, Result};

pub const MMSE_RANGE: (f64, f64) = (0.0, 30.0);

/// Linear model with an unpenalized intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub alpha: f64,
}

impl LinearModel {
    /// Ridge regression on centered data: `(Xc'Xc + alpha I) w = Xc'yc`.
    /// `alpha = 0` is ordinary least squares and needs `n > d` and a
    /// nonsingular `X'X`.
    pub fn fit(x: &[Vec<f64>], y: &[f64], alpha: f64) -> Result<Self> {
        let n = x.len();
        if n == 0 {
            return Err(Error::data("cannot fit a linear model on no rows"));
        }
        if alpha < 0.0 {
            return Err(Error::InvalidArgument(format!("alpha must be non-negative, got {alpha}")));
        }
        let d = x[0].len();
        if alpha == 0.0 && n <= d {
            return Err(Error::data(format!(
                "least squares needs more samples ({n}) than features ({d}); select fewer features or use ridge"
            )));
        }
        let xm = column_means(x);
        let ym = y.iter().sum::<f64>() / n as f64;
        let mut gram = vec![vec![0.0; d]; d];
        let mut rhs = vec![0.0; d];
        for (row, t) in x.iter().zip(y) {
            let c: Vec<f64> = row.iter().zip(&xm).map(|(v, m)| v - m).collect();
            for i in 0..d {
                rhs[i] += c[i] * (t - ym);
                for j in 0..=i {
                    gram[i][j] += c[i] * c[j];
                }
            }
        }
        for i in 0..d {
            for j in 0..i {
                gram[j][i] = gram[i][j];
            }
            gram[i][i] += alpha;
        }
        let weights = solve_spd(&gram, &rhs).map_err(|e| {
            if alpha == 0.0 {
                Error::data(format!("{e}; select fewer features or use ridge"))
            } else {
                e
            }
        })?;
        let intercept = ym - dot(&weights, &xm);
        Ok(LinearModel {
            weights,
            intercept,
            alpha,
        })
    }

    pub fn predict_raw(&self, row: &[f64]) -> f64 {
        self.intercept + dot(&self.weights, row)
    }

    /// Prediction clipped to the MMSE range.
    pub fn predict_clipped(&self, row: &[f64]) -> f64 {
        clip_mmse(self.predict_raw(row))
    }
}

pub fn clip_mmse(v: f64) -> f64 {
    v.clamp(MMSE_RANGE.0, MMSE_RANGE.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clipping() {
        assert_eq!(clip_mmse(34.2), 30.0);
        assert_eq!(clip_mmse(-1.0), 0.0);
        assert_eq!(clip_mmse(17.5), 17.5);
    }

    #[test]
    fn exact_line() {
        let x: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..5).map(|i| 3.0 + 2.0 * i as f64).collect();
        let m = LinearModel::fit(&x, &y, 0.0).unwrap();
        assert!((m.weights[0] - 2.0).abs() < 1e-12 && (m.intercept - 3.0).abs() < 1e-12);
    }

    #[test]
    fn ols_needs_more_rows() {
        let x = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        assert!(LinearModel::fit(&x, &[1.0, 2.0], 0.0).is_err());
        assert!(LinearModel::fit(&x, &[1.0, 2.0], 1.0).is_ok());
    }
}
