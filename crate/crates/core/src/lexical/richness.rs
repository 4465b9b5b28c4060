use std::collections::HashMap;

use crate::error::{Error, Result};

pub const RICHNESS_NAMES: [&str; 6] = ["ttr", "mattr", "brunet", "honore", "msttr", "hapax_prop"];

fn type_counts<'a>(words: &[&'a str]) -> HashMap<&'a str, usize> {
    let mut counts = HashMap::new();
    for w in words {
        *counts.entry(*w).or_insert(0) += 1;
    }
    counts
}

pub fn ttr(words: &[&str]) -> f64 {
    type_counts(words).len() as f64 / words.len() as f64
}

/// Moving-average TTR over windows of `window` tokens, the window shrinking
/// to N when N is shorter.
pub fn mattr(words: &[&str], window: usize) -> f64 {
    let n = words.len();
    let w = window.clamp(1, n);
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for word in &words[..w] {
        *counts.entry(word).or_insert(0) += 1;
    }
    let mut sum = counts.len() as f64 / w as f64;
    for i in w..n {
        let out = words[i - w];
        let c = counts.get_mut(out).expect("outgoing word is counted");
        *c -= 1;
        if *c == 0 {
            counts.remove(out);
        }
        *counts.entry(words[i]).or_insert(0) += 1;
        sum += counts.len() as f64 / w as f64;
    }
    sum / (n - w + 1) as f64
}

/// Mean TTR over consecutive non-overlapping segments of `segment` tokens.
/// A trailing partial segment is dropped unless it is the only one.
pub fn msttr(words: &[&str], segment: usize) -> f64 {
    let segment = segment.max(1);
    if words.len() < segment {
        return ttr(words);
    }
    let chunks: Vec<f64> = words.chunks_exact(segment).map(ttr).collect();
    chunks.iter().sum::<f64>() / chunks.len() as f64
}

/// Brunet's index `N^(V^-0.165)`.
pub fn brunet(n: usize, v: usize) -> f64 {
    (n as f64).powf((v as f64).powf(-0.165))
}

/// Honoré's statistic `100 ln N / (1 - V1/V)`; undefined when every type is
/// a hapax.
pub fn honore(n: usize, v: usize, v1: usize) -> Option<f64> {
    if v1 >= v {
        None
    } else {
        Some(100.0 * (n as f64).ln() / (1.0 - v1 as f64 / v as f64))
    }
}

/// The six richness measures over non-filler words, in `RICHNESS_NAMES` order.
pub fn richness_features(words: &[&str], window: usize) -> Result<[Option<f64>; 6]> {
    if words.is_empty() {
        return Err(Error::Degenerate("no words for lexical richness".into()));
    }
    let counts = type_counts(words);
    let n = words.len();
    let v = counts.len();
    let v1 = counts.values().filter(|&&c| c == 1).count();
    Ok([
        Some(v as f64 / n as f64),
        Some(mattr(words, window)),
        Some(brunet(n, v)),
        honore(n, v, v1),
        Some(msttr(words, window)),
        Some(v1 as f64 / n as f64),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_distinct() {
        let words: Vec<String> = (0..10).map(|i| format!("w{i}")).collect();
        let refs: Vec<&str> = words.iter().map(String::as_str).collect();
        let f = richness_features(&refs, 20).unwrap();
        assert_eq!(f[0], Some(1.0));
        assert_eq!(f[3], None);
    }

    #[test]
    fn honore_hand_value() {
        let r = honore(100, 50, 20).unwrap();
        assert!((r - 767.528).abs() < 0.01, "{r}");
    }

    #[test]
    fn mattr_sliding() {
        // windows of 2 over a b a a: {a,b} {b,a} {a} -> (1 + 1 + 0.5) / 3
        let m = mattr(&["a", "b", "a", "a"], 2);
        assert!((m - 2.5 / 3.0).abs() < 1e-15);
        assert_eq!(mattr(&["a", "b", "a"], 20), ttr(&["a", "b", "a"]));
    }

    #[test]
    fn empty_is_degenerate() {
        assert!(richness_features(&[], 20).is_err());
    }
}
