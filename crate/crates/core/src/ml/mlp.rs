//! Fully connected ReLU network with a softmax output, trained full-batch
//! with Adam on mean cross-entropy plus an L2 penalty on weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlpParams {
    pub hidden: Vec<usize>,
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden: vec![10, 10],
            epochs: 200,
            learning_rate: 1e-3,
            l2: 1e-4,
        }
    }
}

/// Parameters live in one flat vector: for each layer, the `out x in`
/// weight matrix (row-major) followed by the `out` biases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub sizes: Vec<usize>,
    pub params: Vec<f64>,
    pub l2: f64,
}

struct Layer {
    w: usize,
    b: usize,
    n_in: usize,
    n_out: usize,
}

impl Mlp {
    /// He-uniform weights, zero biases.
    pub fn new(n_inputs: usize, hidden: &[usize], n_classes: usize, l2: f64, seed: u64) -> Self {
        let mut sizes = vec![n_inputs];
        sizes.extend_from_slice(hidden);
        sizes.push(n_classes);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = Vec::new();
        for w in sizes.windows(2) {
            let bound = (6.0 / w[0] as f64).sqrt();
            params.extend((0..w[0] * w[1]).map(|_| rng.gen_range(-bound..bound)));
            params.extend(std::iter::repeat(0.0).take(w[1]));
        }
        Mlp { sizes, params, l2 }
    }

    fn layers(&self) -> Vec<Layer> {
        let mut out = Vec::new();
        let mut at = 0;
        for w in self.sizes.windows(2) {
            out.push(Layer {
                w: at,
                b: at + w[0] * w[1],
                n_in: w[0],
                n_out: w[1],
            });
            at += w[0] * w[1] + w[1];
        }
        out
    }

    /// Activations of every layer; the last entry holds class probabilities.
    fn forward(&self, row: &[f64]) -> Vec<Vec<f64>> {
        let layers = self.layers();
        let mut acts = vec![row.to_vec()];
        for (li, l) in layers.iter().enumerate() {
            let input = acts.last().expect("input layer");
            let mut z: Vec<f64> = (0..l.n_out)
                .map(|o| {
                    let w = &self.params[l.w + o * l.n_in..l.w + (o + 1) * l.n_in];
                    self.params[l.b + o] + w.iter().zip(input).map(|(a, b)| a * b).sum::<f64>()
                })
                .collect();
            if li + 1 < layers.len() {
                z.iter_mut().for_each(|v| *v = v.max(0.0));
            } else {
                softmax(&mut z);
            }
            acts.push(z);
        }
        acts
    }

    pub fn predict_proba(&self, row: &[f64]) -> Vec<f64> {
        self.forward(row).pop().expect("output layer")
    }

    pub fn predict(&self, row: &[f64]) -> u8 {
        let p = self.predict_proba(row);
        u8::from(p[1] > p[0])
    }

    /// Loss and its gradient with respect to `params`.
    pub fn loss_and_gradient(&self, x: &[Vec<f64>], y: &[u8]) -> (f64, Vec<f64>) {
        let layers = self.layers();
        let n = x.len() as f64;
        let mut grad = vec![0.0; self.params.len()];
        let mut loss = 0.0;
        for (row, &label) in x.iter().zip(y) {
            let acts = self.forward(row);
            let probs = acts.last().expect("output layer");
            loss -= probs[label as usize].max(1e-300).ln();
            // softmax + cross-entropy: dL/dz = p - onehot
            let mut delta: Vec<f64> = probs.clone();
            delta[label as usize] -= 1.0;
            for (li, l) in layers.iter().enumerate().rev() {
                let input = &acts[li];
                for o in 0..l.n_out {
                    grad[l.b + o] += delta[o];
                    for i in 0..l.n_in {
                        grad[l.w + o * l.n_in + i] += delta[o] * input[i];
                    }
                }
                if li == 0 {
                    break;
                }
                delta = (0..l.n_in)
                    .map(|i| {
                        if input[i] <= 0.0 {
                            return 0.0;
                        }
                        (0..l.n_out).map(|o| delta[o] * self.params[l.w + o * l.n_in + i]).sum()
                    })
                    .collect();
            }
        }
        loss /= n;
        grad.iter_mut().for_each(|g| *g /= n);
        let mut penalty = 0.0;
        for l in &layers {
            for k in l.w..l.b {
                penalty += self.params[k] * self.params[k];
                grad[k] += self.l2 * self.params[k] / n;
            }
        }
        loss += 0.5 * self.l2 * penalty / n;
        (loss, grad)
    }

    /// Train with Adam; returns the loss before each epoch.
    pub fn fit(x: &[Vec<f64>], y: &[u8], params: &MlpParams, seed: u64) -> Result<(Self, Vec<f64>)> {
        if x.is_empty() {
            return Err(Error::data("network needs training rows"));
        }
        let mut net = Mlp::new(x[0].len(), &params.hidden, 2, params.l2, seed);
        let (b1, b2, eps): (f64, f64, f64) = (0.9, 0.999, 1e-8);
        let mut m = vec![0.0; net.params.len()];
        let mut v = vec![0.0; net.params.len()];
        let mut history = Vec::with_capacity(params.epochs);
        for t in 1..=params.epochs {
            let (loss, g) = net.loss_and_gradient(x, y);
            if !loss.is_finite() {
                return Err(Error::Convergence(format!("network loss became {loss} at epoch {t}")));
            }
            history.push(loss);
            let lr = params.learning_rate * (1.0 - b2.powi(t as i32)).sqrt() / (1.0 - b1.powi(t as i32));
            for k in 0..net.params.len() {
                m[k] = b1 * m[k] + (1.0 - b1) * g[k];
                v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
                net.params[k] -= lr * m[k] / (v[k].sqrt() + eps);
            }
        }
        Ok((net, history))
    }
}

fn softmax(z: &mut [f64]) {
    let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    z.iter_mut().for_each(|v| *v = (*v - m).exp());
    let s: f64 = z.iter().sum();
    z.iter_mut().for_each(|v| *v /= s);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let net = Mlp::new(3, &[10, 10], 2, 0.0, 1);
        assert_eq!(net.params.len(), 3 * 10 + 10 + 10 * 10 + 10 + 10 * 2 + 2);
        let p = net.predict_proba(&[0.1, 0.2, 0.3]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
