//! Bracketed trees and syntactic features.

use cogspeech::treebank::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LABELS: [&str; 6] = ["S", "NP", "VP", "PP", "SBAR", "ADJP"];
const TAGS: [&str; 6] = ["DT", "NN", "VBZ", "IN", "PRP", "JJ"];

/// A random tree with exactly `budget` nodes, counting the leaves.
fn random_tree(rng: &mut ChaCha8Rng, budget: usize) -> ParseTree {
    if budget <= 2 {
        let word = format!("w{}", rng.gen_range(0..100));
        return ParseTree::preterminal(TAGS[rng.gen_range(0..TAGS.len())], word);
    }
    let mut rest = budget - 1;
    let mut children = Vec::new();
    while rest > 0 {
        let take = if rest <= 4 { rest } else { rng.gen_range(2..=rest.min(rest - 2).max(2)) };
        let take = if rest - take == 1 { take + 1 } else { take };
        children.push(random_tree(rng, take));
        rest -= take;
    }
    ParseTree::node(LABELS[rng.gen_range(0..LABELS.len())], children)
}

fn depth_oracle(t: &ParseTree) -> usize {
    if t.is_leaf() {
        return 0;
    }
    if t.is_preterminal() {
        return 1;
    }
    let mut best = 0;
    for c in &t.children {
        let d = depth_oracle(c);
        if d > best {
            best = d;
        }
    }
    best + 1
}

#[test]
fn random_trees_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let t = random_tree(&mut rng, 50);
        assert_eq!(t.node_count(), 50);
        let back = parse_bracketed(&t.to_string()).unwrap();
        assert_eq!(back, t);
        assert_eq!(t.depth(), depth_oracle(&t));
    }
}

#[test]
fn simple_tree_shape_and_errors() {
    let t = parse_bracketed("(S (NP (DT the) (NN boy)) (VP (VBZ runs)))").unwrap();
    assert_eq!(t.depth(), 3);
    assert_eq!(t.preterminal_count(), 3);
    assert!(parse_bracketed("(X a").is_err());
}

#[test]
fn production_proportion_by_hand() {
    let reg = ProductionRegistry::builtin();
    let t = parse_bracketed("(S (NP (PRP I)) (VP (VBP run)))").unwrap();
    // three productions: S -> NP VP, NP -> PRP, VP -> VBP; the last is unregistered
    assert_eq!(productions(&t).len(), 3);
    assert!(reg.rule_position(&Production::new("VP", &["VBP"])).is_none());
    let f = syntax_features(&[&t], &reg).unwrap();
    let s = reg.rule_position(&Production::new("S", &["NP", "VP"])).unwrap();
    assert_eq!(f.productions[s], Some(1.0 / 3.0));
    let sum: f64 = f.productions.iter().flatten().sum();
    assert!((sum - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn covered_productions_sum_to_one() {
    let reg = ProductionRegistry::builtin();
    let t = parse_bracketed("(S (NP (PRP he)) (VP (VBZ runs)))").unwrap();
    assert!(productions(&t).iter().all(|p| reg.rule_position(p).is_some()));
    let f = syntax_features(&[&t], &reg).unwrap();
    let sum: f64 = f.productions.iter().flatten().sum();
    assert!((sum - 1.0).abs() < 1e-12);
}

#[test]
fn proportions_sum_to_at_most_one() {
    let reg = ProductionRegistry::builtin();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..30 {
        let trees: Vec<ParseTree> = (0..3).map(|_| random_tree(&mut rng, 30)).collect();
        let refs: Vec<&ParseTree> = trees.iter().collect();
        let f = syntax_features(&refs, &reg).unwrap();
        let prod: f64 = f.productions.iter().flatten().sum();
        assert!(prod <= 1.0 + 1e-12);
        let pos: f64 = f.pos.iter().flatten().sum();
        assert!((pos - 1.0).abs() < 1e-12, "{pos}");
        let uni: f64 = f.universal.iter().flatten().sum();
        assert!((uni - 1.0).abs() < 1e-12);
        assert_eq!(f.to_vec().len(), SyntaxFeatures::LEN);
    }
}

#[test]
fn all_noun_tree_has_no_pronouns() {
    let reg = ProductionRegistry::builtin();
    let t = parse_bracketed("(NP (NN cookie) (NN jar) (NNS stools))").unwrap();
    let f = syntax_features(&[&t], &reg).unwrap();
    assert_eq!(f.pos[reg.tag_position("PRP").unwrap()], Some(0.0));
}

#[test]
fn single_tense_has_no_switches() {
    let reg = ProductionRegistry::builtin();
    let a = parse_bracketed("(S (NP (PRP he)) (VP (VBZ runs)))").unwrap();
    let b = parse_bracketed("(S (NP (PRP she)) (VP (VBP wash) (NP (NNS dishes))))").unwrap();
    let f = syntax_features(&[&a, &b, &a], &reg).unwrap();
    assert_eq!(f.cohesion, Some(0.0));
    let past = parse_bracketed("(S (NP (PRP he)) (VP (VBD fell)))").unwrap();
    let f = syntax_features(&[&a, &past, &a], &reg).unwrap();
    assert_eq!(f.cohesion, Some(2.0 / 3.0));
}

#[test]
fn tree_without_words_is_degenerate() {
    let reg = ProductionRegistry::builtin();
    assert!(syntax_features(&[], &reg).is_err());
}
