//! RBF-kernel support vector classifier trained by SMO with maximal
//! violating pair working-set selection.

use serde::{Deserialize, Serialize};

use super::linalg::squared_distance;
use crate::error::{Error, Result};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmParams {
    pub c: f64,
    pub gamma: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 100.0,
            gamma: 0.001,
            tolerance: 1e-3,
            max_iterations: 1_000_000,
        }
    }
}

pub fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    (-gamma * squared_distance(a, b)).exp()
}

/// Solved dual problem on the training set, kept for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    /// Multipliers in `[0, C]`, one per training row.
    pub alpha: Vec<f64>,
    /// Signed labels in `{-1, +1}`.
    pub y: Vec<f64>,
    /// Gradient of the dual objective, `Q alpha - 1`.
    pub gradient: Vec<f64>,
    pub rho: f64,
    pub iterations: usize,
}

impl DualSolution {
    /// Dual objective `1/2 a'Qa - sum(a)` (minimized).
    pub fn objective(&self) -> f64 {
        // with G = Qa - e: a'Qa = a'(G + e)
        self.alpha
            .iter()
            .zip(&self.gradient)
            .map(|(a, g)| 0.5 * a * (g + 1.0) - a)
            .sum()
    }

    /// Largest KKT violation `max_{up} -yG - min_{low} -yG`; zero or less at
    /// an exact optimum.
    pub fn kkt_gap(&self, c: f64) -> f64 {
        let (up, low) = violation_extremes(&self.alpha, &self.y, &self.gradient, c);
        up.map_or(f64::NEG_INFINITY, |u| u.1) - low.map_or(f64::INFINITY, |l| l.1)
    }
}

fn in_up(a: f64, y: f64, c: f64) -> bool {
    (y > 0.0 && a < c) || (y < 0.0 && a > 0.0)
}

fn in_low(a: f64, y: f64, c: f64) -> bool {
    (y > 0.0 && a > 0.0) || (y < 0.0 && a < c)
}

type Extreme = Option<(usize, f64)>;

fn violation_extremes(alpha: &[f64], y: &[f64], g: &[f64], c: f64) -> (Extreme, Extreme) {
    let mut up: Extreme = None;
    let mut low: Extreme = None;
    for t in 0..alpha.len() {
        let v = -y[t] * g[t];
        if in_up(alpha[t], y[t], c) && up.map_or(true, |(_, b)| v > b) {
            up = Some((t, v));
        }
        if in_low(alpha[t], y[t], c) && low.map_or(true, |(_, b)| v < b) {
            low = Some((t, v));
        }
    }
    (up, low)
}

/// Solve the C-SVC dual for a precomputed kernel matrix.
pub fn solve_dual(kernel: &[Vec<f64>], y: &[f64], params: &SvmParams) -> Result<DualSolution> {
    let n = y.len();
    let c = params.c;
    let q = |i: usize, j: usize| y[i] * y[j] * kernel[i][j];
    let mut alpha = vec![0.0; n];
    let mut g = vec![-1.0; n];
    let mut iterations = 0;
    loop {
        let (up, low) = violation_extremes(&alpha, y, &g, c);
        let (Some((i, gi)), Some((j, gj))) = (up, low) else {
            break;
        };
        if gi - gj < params.tolerance {
            break;
        }
        if iterations >= params.max_iterations {
            return Err(Error::Convergence(format!(
                "SMO stopped after {iterations} iterations with KKT gap {:.3e}",
                gi - gj
            )));
        }
        iterations += 1;
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let (ai, aj) = two_variable_step(i, j, &alpha, y, &g, c, &q);
        alpha[i] = ai;
        alpha[j] = aj;
        let (di, dj) = (ai - old_i, aj - old_j);
        for t in 0..n {
            g[t] += q(t, i) * di + q(t, j) * dj;
        }
    }
    let rho = compute_rho(&alpha, y, &g, c);
    Ok(DualSolution {
        alpha,
        y: y.to_vec(),
        gradient: g,
        rho,
        iterations,
    })
}

/// Analytic minimizer over `(alpha_i, alpha_j)` clipped to the box while
/// keeping `y'alpha` fixed.
fn two_variable_step(
    i: usize,
    j: usize,
    alpha: &[f64],
    y: &[f64],
    g: &[f64],
    c: f64,
    q: &impl Fn(usize, usize) -> f64,
) -> (f64, f64) {
    let (mut ai, mut aj) = (alpha[i], alpha[j]);
    if y[i] != y[j] {
        let mut quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
        if quad <= 0.0 {
            quad = TAU;
        }
        let delta = (-g[i] - g[j]) / quad;
        let diff = ai - aj;
        ai += delta;
        aj += delta;
        if diff > 0.0 {
            if aj < 0.0 {
                aj = 0.0;
                ai = diff;
            }
        } else if ai < 0.0 {
            ai = 0.0;
            aj = -diff;
        }
        if diff > 0.0 {
            if ai > c {
                ai = c;
                aj = c - diff;
            }
        } else if aj > c {
            aj = c;
            ai = c + diff;
        }
    } else {
        let mut quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
        if quad <= 0.0 {
            quad = TAU;
        }
        let delta = (g[i] - g[j]) / quad;
        let sum = ai + aj;
        ai -= delta;
        aj += delta;
        if sum > c {
            if ai > c {
                ai = c;
                aj = sum - c;
            }
        } else if aj < 0.0 {
            aj = 0.0;
            ai = sum;
        }
        if sum > c {
            if aj > c {
                aj = c;
                ai = sum - c;
            }
        } else if ai < 0.0 {
            ai = 0.0;
            aj = sum;
        }
    }
    (ai, aj)
}

fn compute_rho(alpha: &[f64], y: &[f64], g: &[f64], c: f64) -> f64 {
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum, mut free) = (0.0, 0usize);
    for t in 0..alpha.len() {
        let yg = y[t] * g[t];
        let at_upper = alpha[t] >= c;
        let at_lower = alpha[t] <= 0.0;
        if at_upper {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if at_lower {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum += yg;
        }
    }
    if free > 0 {
        sum / free as f64
    } else {
        (ub + lb) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub gamma: f64,
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha_i * y_i` for each support vector.
    pub coefficients: Vec<f64>,
    pub bias: f64,
}

impl SvmModel {
    /// Labels are 0 (negative) and 1 (positive).
    pub fn fit(x: &[Vec<f64>], labels: &[u8], params: &SvmParams) -> Result<Self> {
        Ok(Self::fit_with_dual(x, labels, params)?.0)
    }

    pub fn fit_with_dual(x: &[Vec<f64>], labels: &[u8], params: &SvmParams) -> Result<(Self, DualSolution)> {
        if !(params.c > 0.0 && params.gamma > 0.0) {
            return Err(Error::InvalidArgument("SVM needs C > 0 and gamma > 0".into()));
        }
        if !labels.contains(&0) || !labels.contains(&1) {
            return Err(Error::data("SVM needs both classes present"));
        }
        let y: Vec<f64> = labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
        let kernel = kernel_matrix(x, params.gamma);
        let dual = solve_dual(&kernel, &y, params)?;
        let mut support_vectors = Vec::new();
        let mut coefficients = Vec::new();
        for (t, &a) in dual.alpha.iter().enumerate() {
            if a > 0.0 {
                support_vectors.push(x[t].clone());
                coefficients.push(a * y[t]);
            }
        }
        Ok((
            SvmModel {
                gamma: params.gamma,
                support_vectors,
                coefficients,
                bias: -dual.rho,
            },
            dual,
        ))
    }

    pub fn decision(&self, row: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.coefficients)
            .map(|(sv, c)| c * rbf(sv, row, self.gamma))
            .sum::<f64>()
            + self.bias
    }

    pub fn predict(&self, row: &[f64]) -> u8 {
        u8::from(self.decision(row) > 0.0)
    }
}

pub fn kernel_matrix(x: &[Vec<f64>], gamma: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut k = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v = rbf(&x[i], &x[j], gamma);
            k[i][j] = v;
            k[j][i] = v;
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_points() {
        let x = vec![vec![0.0], vec![0.2], vec![1.0], vec![1.2]];
        let p = SvmParams {
            gamma: 1.0,
            ..Default::default()
        };
        let (m, dual) = SvmModel::fit_with_dual(&x, &[0, 0, 1, 1], &p).unwrap();
        assert!(dual.kkt_gap(p.c) < p.tolerance);
        let s: f64 = dual.alpha.iter().zip(&dual.y).map(|(a, y)| a * y).sum();
        assert!(s.abs() < 1e-9);
        assert_eq!(m.predict(&[0.1]), 0);
        assert_eq!(m.predict(&[1.1]), 1);
    }

    #[test]
    fn iteration_cap_is_convergence_error() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![(i as f64).sin()]).collect();
        let y: Vec<u8> = (0..20).map(|i| (i % 2) as u8).collect();
        let p = SvmParams {
            gamma: 1.0,
            max_iterations: 1,
            ..Default::default()
        };
        assert!(matches!(SvmModel::fit(&x, &y, &p), Err(Error::Convergence(_))));
    }
}
