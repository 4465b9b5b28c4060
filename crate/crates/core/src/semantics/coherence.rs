use super::embedding::EmbeddingSpace;
use crate::util::cosine;

pub const SIMILARITY_THRESHOLDS: [f64; 3] = [0.5, 0.3, 0.0];

/// `(mean, min, max)` of a non-empty list.
pub(crate) fn distance_stats(d: &[f64]) -> Option<(f64, f64, f64)> {
    if d.is_empty() {
        return None;
    }
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    let min = d.iter().copied().fold(f64::INFINITY, f64::min);
    let max = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some((mean, min, max))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceFeatures {
    /// Avg/max/min cosine distance between consecutive utterances, per
    /// space (space-major).
    pub local: Vec<Option<f64>>,
    /// On the primary space: fraction of all pairs with similarity below
    /// 0.5, 0.3 and 0, then avg and min pairwise distance.
    pub pairwise: [Option<f64>; 5],
}

/// Utterances whose vector is absent or zero drop out before pairing.
fn vectors<S: AsRef<str>>(utterances: &[Vec<S>], space: &EmbeddingSpace) -> Vec<Vec<f64>> {
    utterances
        .iter()
        .filter_map(|u| space.mean_vector(u))
        .filter(|v| v.iter().any(|x| *x != 0.0))
        .collect()
}

pub fn coherence_features<S: AsRef<str>>(
    utterances: &[Vec<S>],
    spaces: &[EmbeddingSpace],
    primary: usize,
) -> CoherenceFeatures {
    let mut local = Vec::with_capacity(3 * spaces.len());
    let mut pairwise = [None; 5];
    for (s, space) in spaces.iter().enumerate() {
        let vs = vectors(utterances, space);
        let consecutive: Vec<f64> = vs
            .windows(2)
            .filter_map(|w| cosine(&w[0], &w[1]).map(|c| 1.0 - c))
            .collect();
        match distance_stats(&consecutive) {
            Some((avg, min, max)) => local.extend([Some(avg), Some(max), Some(min)]),
            None => local.extend([None, None, None]),
        }
        if s == primary {
            pairwise = pairwise_block(&vs);
        }
    }
    CoherenceFeatures { local, pairwise }
}

fn pairwise_block(vs: &[Vec<f64>]) -> [Option<f64>; 5] {
    let mut sims = Vec::new();
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            if let Some(c) = cosine(&vs[i], &vs[j]) {
                sims.push(c);
            }
        }
    }
    if sims.is_empty() {
        return [None; 5];
    }
    let n = sims.len() as f64;
    let below = |t: f64| Some(sims.iter().filter(|&&s| s < t).count() as f64 / n);
    let dists: Vec<f64> = sims.iter().map(|s| 1.0 - s).collect();
    let (avg, min, _) = distance_stats(&dists).expect("non-empty");
    [
        below(SIMILARITY_THRESHOLDS[0]),
        below(SIMILARITY_THRESHOLDS[1]),
        below(SIMILARITY_THRESHOLDS[2]),
        Some(avg),
        Some(min),
    ]
}
