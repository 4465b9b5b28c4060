//! Bagged CART classifiers with Gini splits and per-node feature sampling.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    /// Features tried per node; `None` means `floor(sqrt(d))`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 200,
            min_samples_split: 2,
            min_samples_leaf: 2,
            max_features: None,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        /// Fraction of positive training samples reaching the leaf.
        positive: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Nodes in arena order; node 0 is the root. Rows with
/// `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

impl DecisionTree {
    pub fn positive_fraction(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { positive } => return *positive,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    /// Majority class at the leaf; an exact tie votes negative.
    pub fn predict(&self, row: &[f64]) -> u8 {
        u8::from(self.positive_fraction(row) > 0.5)
    }

    pub fn root_split(&self) -> Option<(usize, f64)> {
        match self.nodes.first()? {
            Node::Split { feature, threshold, .. } => Some((*feature, *threshold)),
            Node::Leaf { .. } => None,
        }
    }
}

fn gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [u8],
    params: &'a ForestParams,
    max_features: usize,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn leaf(&mut self, idx: &[usize]) -> usize {
        let pos = idx.iter().filter(|&&i| self.y[i] == 1).count();
        self.nodes.push(Node::Leaf {
            positive: pos as f64 / idx.len() as f64,
        });
        self.nodes.len() - 1
    }

    fn best_split(&self, idx: &[usize], rng: &mut ChaCha8Rng) -> Option<(usize, f64, f64)> {
        let d = self.x[0].len();
        let n = idx.len();
        let total_pos = idx.iter().filter(|&&i| self.y[i] == 1).count();
        let min_leaf = self.params.min_samples_leaf.max(1);
        let mut best: Option<(usize, f64, f64)> = None;
        let mut order: Vec<usize> = idx.to_vec();
        for feature in sample(rng, d, self.max_features.min(d)).into_iter() {
            order.sort_by(|&a, &b| self.x[a][feature].total_cmp(&self.x[b][feature]));
            let mut left_pos = 0;
            for k in 1..n {
                if self.y[order[k - 1]] == 1 {
                    left_pos += 1;
                }
                let (lo, hi) = (self.x[order[k - 1]][feature], self.x[order[k]][feature]);
                if lo == hi || k < min_leaf || n - k < min_leaf {
                    continue;
                }
                let impurity = (k as f64 * gini(left_pos, k)
                    + (n - k) as f64 * gini(total_pos - left_pos, n - k))
                    / n as f64;
                if best.map_or(true, |b| impurity < b.2) {
                    let mut threshold = lo + (hi - lo) / 2.0;
                    if threshold >= hi {
                        threshold = lo;
                    }
                    best = Some((feature, threshold, impurity));
                }
            }
        }
        best
    }

    fn grow(&mut self, idx: &[usize], rng: &mut ChaCha8Rng) -> usize {
        let pos = idx.iter().filter(|&&i| self.y[i] == 1).count();
        if idx.len() < self.params.min_samples_split || pos == 0 || pos == idx.len() {
            return self.leaf(idx);
        }
        let Some((feature, threshold, _)) = self.best_split(idx, rng) else {
            return self.leaf(idx);
        };
        let at = self.nodes.len();
        self.nodes.push(Node::Leaf { positive: 0.0 });
        let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| self.x[i][feature] <= threshold);
        let left = self.grow(&l, rng);
        let right = self.grow(&r, rng);
        self.nodes[at] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        at
    }
}

/// Fit one tree on the given (possibly repeated) row indices.
pub fn fit_tree(
    x: &[Vec<f64>],
    y: &[u8],
    rows: &[usize],
    params: &ForestParams,
    rng: &mut ChaCha8Rng,
) -> DecisionTree {
    let d = x[0].len();
    let max_features = params
        .max_features
        .unwrap_or_else(|| ((d as f64).sqrt().floor() as usize).max(1));
    let mut b = Builder {
        x,
        y,
        params,
        max_features,
        nodes: Vec::new(),
    };
    b.grow(rows, rng);
    DecisionTree { nodes: b.nodes }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    /// Out-of-bag majority vote per training row; `None` when the row was
    /// drawn by every tree.
    pub oob_predictions: Vec<Option<u8>>,
}

impl RandomForest {
    /// Tree `t` draws from a ChaCha stream keyed by `(seed, t)`, so results
    /// do not depend on thread scheduling.
    pub fn fit(x: &[Vec<f64>], y: &[u8], params: &ForestParams, seed: u64) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::data("random forest needs training rows"));
        }
        if params.n_trees == 0 {
            return Err(Error::InvalidArgument("n_trees must be positive".into()));
        }
        let n = x.len();
        let grown: Vec<(DecisionTree, Vec<bool>)> = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t as u64);
                let rows: Vec<usize> = if params.bootstrap {
                    (0..n).map(|_| rng.gen_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                let mut in_bag = vec![false; n];
                rows.iter().for_each(|&r| in_bag[r] = true);
                (fit_tree(x, y, &rows, params, &mut rng), in_bag)
            })
            .collect();
        let mut votes = vec![(0usize, 0usize); n];
        for (tree, in_bag) in &grown {
            for i in (0..n).filter(|&i| !in_bag[i]) {
                votes[i].0 += tree.predict(&x[i]) as usize;
                votes[i].1 += 1;
            }
        }
        let oob_predictions = votes
            .iter()
            .map(|&(pos, total)| (total > 0).then(|| u8::from(2 * pos > total)))
            .collect();
        Ok(RandomForest {
            trees: grown.into_iter().map(|(t, _)| t).collect(),
            oob_predictions,
        })
    }

    /// Share of trees voting positive.
    pub fn vote_fraction(&self, row: &[f64]) -> f64 {
        let pos = self.trees.iter().filter(|t| t.predict(row) == 1).count();
        pos as f64 / self.trees.len() as f64
    }

    /// Majority vote; an exact tie votes negative.
    pub fn predict(&self, row: &[f64]) -> u8 {
        u8::from(self.vote_fraction(row) > 0.5)
    }

    pub fn oob_accuracy(&self, y: &[u8]) -> Option<f64> {
        let scored: Vec<bool> = self
            .oob_predictions
            .iter()
            .zip(y)
            .filter_map(|(p, &t)| p.map(|p| p == t))
            .collect();
        (!scored.is_empty()).then(|| scored.iter().filter(|&&c| c).count() as f64 / scored.len() as f64)
    }
}
