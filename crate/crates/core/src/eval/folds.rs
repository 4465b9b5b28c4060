use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Protocol {
    Loso,
    KFold(usize),
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Protocol::Loso => f.write_str("loso"),
            Protocol::KFold(k) => write!(f, "kfold:{k}"),
        }
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "loso" {
            return Ok(Protocol::Loso);
        }
        let k = s
            .strip_prefix("kfold")
            .map(|rest| rest.strip_prefix(':').unwrap_or(rest))
            .map(|k| if k.is_empty() { Ok(10) } else { k.parse::<usize>() });
        match k {
            Some(Ok(k)) if k >= 2 => Ok(Protocol::KFold(k)),
            _ => Err(Error::InvalidArgument(format!(
                "unknown protocol {s:?}; expected loso or kfold:K with K >= 2"
            ))),
        }
    }
}

/// One singleton test fold per sample.
pub fn loso_folds(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|i| vec![i]).collect()
}

/// Stratified k-fold test sets. Each class is shuffled with the seed, the
/// classes are concatenated, and samples are dealt round-robin, so every
/// fold receives `floor` or `ceil` of each class's share. Without labels
/// the whole index set is one stratum. Folds are returned sorted, ordered
/// by their smallest member.
pub fn stratified_folds(labels: Option<&[u8]>, n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 || k > n {
        return Err(Error::InvalidArgument(format!("k-fold needs 2 <= k <= n, got k = {k}, n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = Vec::with_capacity(n);
    match labels {
        Some(y) => {
            for class in [0u8, 1] {
                let mut members: Vec<usize> = (0..n).filter(|&i| y[i] == class).collect();
                members.shuffle(&mut rng);
                order.extend(members);
            }
        }
        None => {
            order.extend(0..n);
            order.shuffle(&mut rng);
        }
    }
    let mut folds = vec![Vec::new(); k];
    for (pos, &i) in order.iter().enumerate() {
        folds[pos % k].push(i);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    folds.sort_by_key(|f| f[0]);
    Ok(folds)
}

pub fn protocol_folds(protocol: Protocol, labels: Option<&[u8]>, n: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    match protocol {
        Protocol::Loso => {
            if n < 2 {
                return Err(Error::data("cross-validation needs at least 2 samples"));
            }
            Ok(loso_folds(n))
        }
        Protocol::KFold(k) => stratified_folds(labels, n, k, seed),
    }
}

/// Training indices complementary to `test`.
pub fn complement(test: &[usize], n: usize) -> Vec<usize> {
    let mut held = vec![false; n];
    test.iter().for_each(|&i| held[i] = true);
    (0..n).filter(|&i| !held[i]).collect()
}
