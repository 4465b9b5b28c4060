//! Exact t-SNE with perplexity calibration, early exaggeration, momentum
//! and per-parameter gains.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::linalg::squared_distance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsneParams {
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub exaggeration: f64,
    pub exaggeration_iterations: usize,
    /// Final iterations run as backtracking gradient descent, over which
    /// the KL divergence never increases.
    pub polish_iterations: usize,
    pub seed: u64,
}

impl Default for TsneParams {
    fn default() -> Self {
        TsneParams {
            perplexity: 30.0,
            iterations: 1000,
            learning_rate: 200.0,
            exaggeration: 12.0,
            exaggeration_iterations: 250,
            polish_iterations: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsneResult {
    pub embedding: Vec<[f64; 2]>,
    /// KL divergence after each iteration (against the unexaggerated P).
    pub kl_history: Vec<f64>,
}

const PERPLEXITY_TOLERANCE: f64 = 1e-5;

/// Row-conditional affinities `p(j|i)` whose perplexity `exp(H)` matches
/// the target, found by bisection on the Gaussian precision.
pub fn conditional_probabilities(dist2: &[Vec<f64>], perplexity: f64) -> Vec<Vec<f64>> {
    let n = dist2.len();
    let target = perplexity.ln();
    let mut p = vec![vec![0.0; n]; n];
    for i in 0..n {
        let (mut lo, mut hi) = (0.0_f64, f64::INFINITY);
        let mut beta = 1.0;
        // distances relative to the nearest neighbour keep exp() in range
        let dmin = (0..n).filter(|&j| j != i).map(|j| dist2[i][j]).fold(f64::INFINITY, f64::min);
        for _ in 0..200 {
            let mut sum = 0.0;
            let mut weighted = 0.0;
            for j in (0..n).filter(|&j| j != i) {
                let d = dist2[i][j] - dmin;
                let w = (-beta * d).exp();
                p[i][j] = w;
                sum += w;
                weighted += w * d;
            }
            let entropy = sum.ln() + beta * weighted / sum;
            p[i].iter_mut().for_each(|v| *v /= sum);
            let diff = entropy - target;
            if (entropy.exp() - perplexity).abs() < PERPLEXITY_TOLERANCE {
                break;
            }
            if diff > 0.0 {
                lo = beta;
                beta = if hi.is_finite() { (beta + hi) / 2.0 } else { beta * 2.0 };
            } else {
                hi = beta;
                beta = (beta + lo) / 2.0;
            }
        }
    }
    p
}

pub fn pairwise_squared(x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..i {
            let v = squared_distance(&x[i], &x[j]);
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

fn kl_and_gradient(p: &[Vec<f64>], y: &[[f64; 2]], scale: f64) -> (f64, Vec<[f64; 2]>) {
    let n = y.len();
    let mut num = vec![vec![0.0; n]; n];
    let mut z = 0.0;
    for i in 0..n {
        for j in 0..i {
            let d = (y[i][0] - y[j][0]).powi(2) + (y[i][1] - y[j][1]).powi(2);
            let q = 1.0 / (1.0 + d);
            num[i][j] = q;
            num[j][i] = q;
            z += 2.0 * q;
        }
    }
    let mut kl = 0.0;
    let mut grad = vec![[0.0; 2]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let q = (num[i][j] / z).max(1e-300);
            let pij = p[i][j];
            if pij > 0.0 {
                kl += pij * (pij / q).ln();
            }
            let m = 4.0 * (scale * pij - q) * num[i][j];
            grad[i][0] += m * (y[i][0] - y[j][0]);
            grad[i][1] += m * (y[i][1] - y[j][1]);
        }
    }
    (kl, grad)
}

const MAX_HALVINGS: usize = 40;

fn check_finite(kl: f64, it: usize) -> Result<()> {
    if kl.is_finite() {
        Ok(())
    } else {
        Err(Error::Convergence(format!("t-SNE divergence became {kl} at iteration {it}")))
    }
}

/// Embed the rows of `x` in two dimensions.
pub fn tsne(x: &[Vec<f64>], params: &TsneParams) -> Result<TsneResult> {
    let n = x.len();
    if !(params.perplexity > 0.0) || (n as f64) < 3.0 * params.perplexity {
        return Err(Error::InvalidArgument(format!(
            "perplexity {} is too large for {n} samples (need n >= 3 x perplexity)",
            params.perplexity
        )));
    }
    let cond = conditional_probabilities(&pairwise_squared(x), params.perplexity);
    let mut p = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                p[i][j] = ((cond[i][j] + cond[j][i]) / (2.0 * n as f64)).max(1e-12);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let normal = Normal::new(0.0, 1e-4).expect("valid normal");
    let mut y: Vec<[f64; 2]> = (0..n).map(|_| [normal.sample(&mut rng), normal.sample(&mut rng)]).collect();
    let mut update = vec![[0.0; 2]; n];
    let mut gains = vec![[1.0_f64; 2]; n];
    let mut kl_history = Vec::with_capacity(params.iterations);
    let polish_start = params.iterations.saturating_sub(params.polish_iterations);
    for it in 0..polish_start {
        let exaggerating = it < params.exaggeration_iterations;
        let scale = if exaggerating { params.exaggeration } else { 1.0 };
        let momentum = if exaggerating { 0.5 } else { 0.8 };
        let (_, grad) = kl_and_gradient(&p, &y, scale);
        for i in 0..n {
            for d in 0..2 {
                let same_sign = (grad[i][d] > 0.0) == (update[i][d] > 0.0);
                gains[i][d] = if same_sign { gains[i][d] * 0.8 } else { gains[i][d] + 0.2 };
                gains[i][d] = gains[i][d].max(0.01);
                update[i][d] = momentum * update[i][d] - params.learning_rate * gains[i][d] * grad[i][d];
                y[i][d] += update[i][d];
            }
        }
        let (kl, _) = kl_and_gradient(&p, &y, 1.0);
        check_finite(kl, it)?;
        kl_history.push(kl);
    }
    let mut step = params.learning_rate;
    for it in polish_start..params.iterations {
        let (kl, grad) = kl_and_gradient(&p, &y, 1.0);
        check_finite(kl, it)?;
        let mut accepted = kl;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<[f64; 2]> = y
                .iter()
                .zip(&grad)
                .map(|(yi, g)| [yi[0] - step * g[0], yi[1] - step * g[1]])
                .collect();
            let (trial_kl, _) = kl_and_gradient(&p, &trial, 1.0);
            if trial_kl <= kl {
                y = trial;
                accepted = trial_kl;
                step *= 1.5;
                break;
            }
            step /= 2.0;
        }
        kl_history.push(accepted);
    }
    Ok(TsneResult {
        embedding: y,
        kl_history,
    })
}

/// Scatter plot of the embedding, AD points red and non-AD blue.
pub fn scatter_svg(points: &[[f64; 2]], labels: &[Option<u8>]) -> String {
    let size = 400.0;
    let margin = 20.0;
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        xmin = xmin.min(p[0]);
        xmax = xmax.max(p[0]);
        ymin = ymin.min(p[1]);
        ymax = ymax.max(p[1]);
    }
    let span = |lo: f64, hi: f64| if hi > lo { hi - lo } else { 1.0 };
    let (sx, sy) = (span(xmin, xmax), span(ymin, ymax));
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{w}\" viewBox=\"0 0 {w} {w}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        w = size + 2.0 * margin
    );
    for (p, l) in points.iter().zip(labels) {
        let cx = margin + (p[0] - xmin) / sx * size;
        let cy = margin + (ymax - p[1]) / sy * size;
        let color = match l {
            Some(1) => "#d62728",
            Some(_) => "#1f77b4",
            None => "#7f7f7f",
        };
        svg.push_str(&format!("<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"4\" fill=\"{color}\"/>\n"));
    }
    svg.push_str("</svg>\n");
    svg
}
