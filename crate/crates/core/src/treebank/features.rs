//! Syntax-derived features over the parse trees of one transcript.

use super::registry::{Production, ProductionRegistry};
use super::tree::ParseTree;
use crate::error::{Error, Result};
use crate::util::ratio;

pub const COMPLEXITY_NAMES: [&str; 36] = [
    // L2 syntactic complexity unit counts
    "syn_words",
    "syn_sentences",
    "syn_verb_phrases",
    "syn_clauses",
    "syn_t_units",
    "syn_dependent_clauses",
    "syn_complex_t_units",
    "syn_coordinate_phrases",
    "syn_complex_nominals",
    // L2 syntactic complexity indices
    "syn_mean_sentence_len",
    "syn_mean_t_unit_len",
    "syn_mean_clause_len",
    "syn_clauses_per_sentence",
    "syn_vp_per_t_unit",
    "syn_clauses_per_t_unit",
    "syn_dc_per_clause",
    "syn_dc_per_t_unit",
    "syn_t_units_per_sentence",
    "syn_complex_t_unit_ratio",
    "syn_cp_per_t_unit",
    "syn_cp_per_clause",
    "syn_cn_per_t_unit",
    "syn_cn_per_clause",
    // utterance length and depth
    "syn_max_utt_len",
    "syn_min_utt_len",
    "syn_mean_utt_len",
    "syn_max_depth",
    "syn_mean_depth",
    // normalized counts
    "syn_nodes_per_tree",
    "syn_mean_branching",
    "syn_sbar_per_utt",
    "syn_wh_phrases_per_utt",
    "syn_adjp_per_utt",
    "syn_advp_per_utt",
    "syn_frag_per_utt",
    "syn_coordinators_per_utt",
];

pub const PHRASAL_NAMES: [&str; 13] = [
    "phr_np_prop",
    "phr_np_avg_len",
    "phr_np_rate",
    "phr_vp_prop",
    "phr_vp_avg_len",
    "phr_vp_rate",
    "phr_pp_prop",
    "phr_pp_avg_len",
    "phr_pp_rate",
    "phr_np_vp_ratio",
    "phr_pp_np_ratio",
    "phr_phrases_per_utt",
    "phr_other_prop",
];

pub const COHESION_NAME: &str = "tense_switches_per_utt";

const PUNCT_TAGS: &[&str] = &[".", ",", ":", "``", "''", "-LRB-", "-RRB-", "HYPH", "NFP", "$", "#", "-NONE-", "_SP"];
const FINITE_TAGS: &[&str] = &["VBD", "VBP", "VBZ", "MD"];
const CLAUSE_LABELS: &[&str] = &["S", "SINV", "SQ"];

pub fn is_punct_tag(tag: &str) -> bool {
    PUNCT_TAGS.contains(&tag)
}

/// Strip function tags and indices: `NP-SBJ-1` -> `NP`. Labels that start
/// with `-` (`-NONE-`, `-LRB-`) are left alone.
pub fn base_label(label: &str) -> &str {
    if label.starts_with('-') {
        return label;
    }
    let cut = label.find(['-', '=']).unwrap_or(label.len());
    if cut == 0 {
        label
    } else {
        &label[..cut]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntaxFeatures {
    pub complexity: Vec<Option<f64>>,
    pub productions: Vec<Option<f64>>,
    pub phrasal: Vec<Option<f64>>,
    pub pos: Vec<Option<f64>>,
    pub universal: Vec<Option<f64>>,
    pub cohesion: Option<f64>,
}

impl SyntaxFeatures {
    pub const LEN: usize = 36 + 104 + 13 + 53 + 18 + 1;

    pub fn masked() -> Self {
        SyntaxFeatures {
            complexity: vec![None; 36],
            productions: vec![None; 104],
            phrasal: vec![None; 13],
            pos: vec![None; 53],
            universal: vec![None; 18],
            cohesion: None,
        }
    }

    /// All 225 values in block order: complexity, productions, phrasal,
    /// POS, universal POS, cohesion.
    pub fn to_vec(&self) -> Vec<Option<f64>> {
        let mut v = Vec::with_capacity(Self::LEN);
        v.extend_from_slice(&self.complexity);
        v.extend_from_slice(&self.productions);
        v.extend_from_slice(&self.phrasal);
        v.extend_from_slice(&self.pos);
        v.extend_from_slice(&self.universal);
        v.push(self.cohesion);
        v
    }
}

#[derive(Default)]
struct Counts {
    words: usize,
    verb_phrases: usize,
    clauses: usize,
    t_units: usize,
    dependent: usize,
    complex_t: usize,
    coordinate: usize,
    complex_nominals: usize,
    nodes: usize,
    internal_children: usize,
    internal: usize,
    sbar: usize,
    wh: usize,
    adjp: usize,
    advp: usize,
    frag: usize,
    cc: usize,
    phrasal: usize,
    np: usize,
    vp: usize,
    pp: usize,
    np_len: usize,
    vp_len: usize,
    pp_len: usize,
}

fn word_count(t: &ParseTree) -> usize {
    t.tagged_words().iter().filter(|(tag, _)| !is_punct_tag(tag)).count()
}

fn is_finite_vp(t: &ParseTree) -> bool {
    base_label(&t.label) == "VP"
        && t
            .children
            .iter()
            .any(|c| c.is_preterminal() && FINITE_TAGS.contains(&c.label.as_str()))
}

fn is_clause(t: &ParseTree) -> bool {
    CLAUSE_LABELS.contains(&base_label(&t.label))
        && t.children.iter().any(|c| {
            is_finite_vp(c) || (c.is_preterminal() && FINITE_TAGS.contains(&c.label.as_str()))
        })
}

fn contains_dependent_clause(t: &ParseTree, under_sbar: bool) -> bool {
    t.children.iter().any(|c| {
        let sbar = under_sbar || base_label(&c.label) == "SBAR";
        (sbar && is_clause(c)) || contains_dependent_clause(c, sbar)
    })
}

fn walk(t: &ParseTree, under_sbar: bool, under_clause: bool, c: &mut Counts) {
    if t.is_leaf() {
        return;
    }
    c.nodes += 1;
    if t.is_preterminal() {
        c.nodes += 1; // the leaf
        if t.label == "CC" {
            c.cc += 1;
        }
        return;
    }
    let label = base_label(&t.label);
    c.internal += 1;
    c.internal_children += t.children.len();
    c.phrasal += 1;
    let len = || word_count(t);
    match label {
        "NP" => {
            c.np += 1;
            c.np_len += len();
        }
        "VP" => {
            c.vp += 1;
            c.vp_len += len();
        }
        "PP" => {
            c.pp += 1;
            c.pp_len += len();
        }
        "SBAR" => c.sbar += 1,
        "WHNP" | "WHADVP" | "WHPP" | "WHADJP" => c.wh += 1,
        "ADJP" => c.adjp += 1,
        "ADVP" => c.advp += 1,
        "FRAG" => c.frag += 1,
        _ => {}
    }
    if is_finite_vp(t) {
        c.verb_phrases += 1;
    }
    if matches!(label, "ADJP" | "ADVP" | "NP" | "VP") && t.children.iter().any(|ch| ch.label == "CC") {
        c.coordinate += 1;
    }
    if label == "NP"
        && t.children.iter().any(|ch| {
            matches!(
                base_label(&ch.label),
                "JJ" | "JJR" | "JJS" | "PP" | "SBAR" | "POS" | "ADJP"
            )
        })
    {
        c.complex_nominals += 1;
    }
    let clause = is_clause(t);
    if clause {
        c.clauses += 1;
        if under_sbar {
            c.dependent += 1;
        } else if !under_clause {
            c.t_units += 1;
            if contains_dependent_clause(t, false) {
                c.complex_t += 1;
            }
        }
    }
    let sbar_below = under_sbar || label == "SBAR";
    for ch in &t.children {
        walk(ch, sbar_below, under_clause || clause, c);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tense {
    Past,
    Present,
}

fn tense_of(t: &ParseTree) -> Option<Tense> {
    t.tagged_words().iter().find_map(|(tag, _)| match *tag {
        "VBD" | "VBN" => Some(Tense::Past),
        "VBP" | "VBZ" | "VBG" => Some(Tense::Present),
        _ => None,
    })
}

/// Compute the 225 syntax features from the parsed participant utterances.
/// Utterances without a parse are simply not passed in.
pub fn syntax_features(trees: &[&ParseTree], registry: &ProductionRegistry) -> Result<SyntaxFeatures> {
    if trees.is_empty() {
        return Err(Error::Degenerate("no parse trees".into()));
    }
    let trees: Vec<&ParseTree> = trees.iter().map(|t| t.unwrap_root()).collect();
    let preterminals: usize = trees.iter().map(|t| t.preterminal_count()).sum();
    if preterminals == 0 {
        return Err(Error::Degenerate("parse trees contain no preterminals".into()));
    }
    let n_trees = trees.len() as f64;

    let mut c = Counts::default();
    let mut utt_lens = Vec::with_capacity(trees.len());
    let mut depths = Vec::with_capacity(trees.len());
    for t in &trees {
        let before = c.t_units;
        walk(t, false, false, &mut c);
        if c.t_units == before {
            // fragments count as one T-unit
            c.t_units += 1;
        }
        let w = word_count(t);
        c.words += w;
        utt_lens.push(w as f64);
        depths.push(t.depth() as f64);
    }

    let w = c.words as f64;
    let s = n_trees;
    let vp = c.verb_phrases as f64;
    let cl = c.clauses as f64;
    let tu = c.t_units as f64;
    let dc = c.dependent as f64;
    let ct = c.complex_t as f64;
    let cp = c.coordinate as f64;
    let cn = c.complex_nominals as f64;

    let complexity = vec![
        Some(w),
        Some(s),
        Some(vp),
        Some(cl),
        Some(tu),
        Some(dc),
        Some(ct),
        Some(cp),
        Some(cn),
        ratio(w, s),
        ratio(w, tu),
        ratio(w, cl),
        ratio(cl, s),
        ratio(vp, tu),
        ratio(cl, tu),
        ratio(dc, cl),
        ratio(dc, tu),
        ratio(tu, s),
        ratio(ct, tu),
        ratio(cp, tu),
        ratio(cp, cl),
        ratio(cn, tu),
        ratio(cn, cl),
        utt_lens.iter().copied().reduce(f64::max),
        utt_lens.iter().copied().reduce(f64::min),
        Some(utt_lens.iter().sum::<f64>() / n_trees),
        depths.iter().copied().reduce(f64::max),
        Some(depths.iter().sum::<f64>() / n_trees),
        Some(c.nodes as f64 / n_trees),
        ratio(c.internal_children as f64, c.internal as f64),
        Some(c.sbar as f64 / n_trees),
        Some(c.wh as f64 / n_trees),
        Some(c.adjp as f64 / n_trees),
        Some(c.advp as f64 / n_trees),
        Some(c.frag as f64 / n_trees),
        Some(c.cc as f64 / n_trees),
    ];

    let phrasal_total = c.phrasal as f64;
    let (np, vpn, pp) = (c.np as f64, c.vp as f64, c.pp as f64);
    let phrasal = vec![
        ratio(np, phrasal_total),
        ratio(c.np_len as f64, np),
        ratio(np, w),
        ratio(vpn, phrasal_total),
        ratio(c.vp_len as f64, vpn),
        ratio(vpn, w),
        ratio(pp, phrasal_total),
        ratio(c.pp_len as f64, pp),
        ratio(pp, w),
        ratio(np, vpn),
        ratio(pp, np),
        Some(phrasal_total / n_trees),
        ratio(phrasal_total - np - vpn - pp, phrasal_total),
    ];

    let productions = production_proportions(&trees, registry);

    let mut pos_counts = vec![0usize; registry.pos_tags().len()];
    let mut uni_counts = vec![0usize; registry.universal_tags().len()];
    for t in &trees {
        for (tag, _) in t.tagged_words() {
            if let Some(i) = registry.tag_position(tag) {
                pos_counts[i] += 1;
            }
            if let Some(i) = registry.universal_position(tag) {
                uni_counts[i] += 1;
            }
        }
    }
    let total = preterminals as f64;
    let pos = pos_counts.iter().map(|&k| Some(k as f64 / total)).collect();
    let universal = uni_counts.iter().map(|&k| Some(k as f64 / total)).collect();

    let tenses: Vec<Tense> = trees.iter().filter_map(|t| tense_of(t)).collect();
    let switches = tenses.windows(2).filter(|w| w[0] != w[1]).count();

    Ok(SyntaxFeatures {
        complexity,
        productions,
        phrasal,
        pos,
        universal,
        cohesion: Some(switches as f64 / n_trees),
    })
}

/// Every phrasal production (a node that is neither a leaf nor a
/// preterminal) in left-to-right preorder, with function tags stripped.
pub fn productions(t: &ParseTree) -> Vec<Production> {
    let mut out = Vec::new();
    collect_productions(t, &mut out);
    out
}

fn collect_productions(t: &ParseTree, out: &mut Vec<Production>) {
    if t.is_leaf() || t.is_preterminal() {
        return;
    }
    out.push(Production {
        lhs: base_label(&t.label).to_string(),
        rhs: t.children.iter().map(|c| base_label(&c.label).to_string()).collect(),
    });
    for c in &t.children {
        collect_productions(c, out);
    }
}

fn production_proportions(trees: &[&ParseTree], registry: &ProductionRegistry) -> Vec<Option<f64>> {
    let mut counts = vec![0usize; registry.rules().len()];
    let mut total = 0usize;
    for t in trees {
        for p in productions(t) {
            total += 1;
            if let Some(i) = registry.rule_position(&p) {
                counts[i] += 1;
            }
        }
    }
    counts
        .into_iter()
        .map(|k| if total == 0 { Some(0.0) } else { Some(k as f64 / total as f64) })
        .collect()
}
