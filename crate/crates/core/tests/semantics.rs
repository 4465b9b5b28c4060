//! Embedding coherence and content units against brute-force oracles.

use std::collections::BTreeSet;

use cogspeech::lexical::SuffixTable;
use cogspeech::semantics::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

fn cos(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

#[test]
fn mean_vector_is_componentwise_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut space = EmbeddingSpace::new("t", 6).unwrap();
    let vs: Vec<Vec<f64>> = (0..3).map(|_| unit_vector(&mut rng, 6)).collect();
    for (w, v) in ["cat", "dog", "emu"].iter().zip(&vs) {
        space.insert(w, v.clone()).unwrap();
    }
    let got = space.mean_vector(&["cat", "unknown", "dog", "emu"]).unwrap();
    for d in 0..6 {
        let want = (vs[0][d] + vs[1][d] + vs[2][d]) / 3.0;
        assert!((got[d] - want).abs() < 1e-15);
    }
    assert_eq!(space.mean_vector(&["cat"]).unwrap(), vs[0]);
    assert_eq!(space.mean_vector(&["nothing"]), None);
}

#[test]
fn coherence_matches_pairwise_oracle() {
    let dims = [3, 4, 5, 6, 7];
    let words = ["w0", "w1", "w2", "w3"];
    for seed in 0..25 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut spaces = Vec::new();
        let mut vectors = Vec::new();
        for (s, &dim) in dims.iter().enumerate() {
            let mut space = EmbeddingSpace::new(format!("s{s}"), dim).unwrap();
            let vs: Vec<Vec<f64>> = (0..4).map(|_| unit_vector(&mut rng, dim)).collect();
            for (w, v) in words.iter().zip(&vs) {
                space.insert(w, v.clone()).unwrap();
            }
            spaces.push(space);
            vectors.push(vs);
        }
        let primary = rng.gen_range(0..5);
        let utts: Vec<Vec<&str>> = words.iter().map(|w| vec![*w]).collect();
        let f = coherence_features(&utts, &spaces, primary);
        assert_eq!(f.local.len() + f.pairwise.len(), 20);

        for s in 0..5 {
            let d: Vec<f64> = (0..3).map(|i| 1.0 - cos(&vectors[s][i], &vectors[s][i + 1])).collect();
            let want = [
                d.iter().sum::<f64>() / 3.0,
                d.iter().copied().fold(f64::MIN, f64::max),
                d.iter().copied().fold(f64::MAX, f64::min),
            ];
            for k in 0..3 {
                assert!((f.local[3 * s + k].unwrap() - want[k]).abs() < 1e-12);
            }
        }
        let vs = &vectors[primary];
        let mut sims = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                if i < j {
                    sims.push(cos(&vs[i], &vs[j]));
                }
            }
        }
        let frac = |t: f64| sims.iter().filter(|&&s| s < t).count() as f64 / 6.0;
        let dists: Vec<f64> = sims.iter().map(|s| 1.0 - s).collect();
        let want = [
            frac(0.5),
            frac(0.3),
            frac(0.0),
            dists.iter().sum::<f64>() / 6.0,
            dists.iter().copied().fold(f64::MAX, f64::min),
        ];
        for k in 0..5 {
            assert!((f.pairwise[k].unwrap() - want[k]).abs() < 1e-12);
        }
        let p = f.pairwise.map(Option::unwrap);
        assert!(p[2] <= p[1] && p[1] <= p[0]);
        assert!(f.local.iter().chain(&f.pairwise[3..]).flatten().all(|d| (0.0..=2.0).contains(d)));
    }
}

#[test]
fn frequencies_match_set_intersection_oracle() {
    let lex = ContentUnitLexicon::builtin();
    let suffixes = SuffixTable::builtin();
    let mut pool: Vec<String> = lex.units().iter().flat_map(|u| u.lemmas.clone()).collect();
    pool.extend(["the", "and", "is", "zebra", "cookies", "jars", "overflowed"].map(String::from));
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let n = rng.gen_range(1..40);
        let words: Vec<&str> = (0..n).map(|_| pool.choose(&mut rng).unwrap().as_str()).collect();
        let f = content_unit_frequencies(&words, &lex);

        // unit -> set of words that mention it; a word belongs to the first matching unit
        let first_unit = |w: &str| {
            let forms: BTreeSet<String> = suffixes.candidates(w).into_iter().collect();
            lex.units().iter().position(|u| u.lemmas.iter().any(|l| forms.contains(l)))
        };
        let mentioned: Vec<usize> = words.iter().filter_map(|w| first_unit(w)).collect();
        let distinct: BTreeSet<usize> = mentioned.iter().copied().collect();
        let total = lex.units().len() as f64;
        assert!((f[0].unwrap() - distinct.len() as f64 / total).abs() < 1e-12);
        assert!((f[5].unwrap() - mentioned.len() as f64 / n as f64).abs() < 1e-12);
        for (c, cat) in CATEGORIES.iter().enumerate() {
            let in_cat: BTreeSet<usize> =
                (0..lex.units().len()).filter(|&u| lex.units()[u].category == *cat).collect();
            let d = distinct.intersection(&in_cat).count() as f64 / in_cat.len() as f64;
            assert!((f[1 + c].unwrap() - d).abs() < 1e-12);
            let m = mentioned.iter().filter(|u| in_cat.contains(u)).count() as f64 / n as f64;
            assert!((f[6 + c].unwrap() - m).abs() < 1e-12);
        }
        assert!(f[..5].iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    }
}
