use super::resources::{NormLexicon, LEXICAL_NORMS, SENTIMENT_NORMS};
use super::tags::{is_noun, is_verb};

pub const SCOPES: [&str; 3] = ["all", "noun", "verb"];

/// A word with its preterminal tag when a parse is available.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaggedWord<'a> {
    pub word: &'a str,
    pub tag: Option<&'a str>,
}

impl<'a> TaggedWord<'a> {
    pub fn new(word: &'a str, tag: Option<&'a str>) -> Self {
        TaggedWord { word, tag }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormFeatures {
    /// 4 norms x 3 scopes, norm-major.
    pub lexical: Vec<Option<f64>>,
    /// 3 norms x 3 scopes, norm-major.
    pub sentiment: Vec<Option<f64>>,
    /// Words found in the lexicon for any norm.
    pub coverage: usize,
}

fn scope_means(words: &[TaggedWord<'_>], lex: &NormLexicon, norm: &str) -> [Option<f64>; 3] {
    let mut sums = [0.0; 3];
    let mut counts = [0usize; 3];
    for w in words {
        let Some(v) = lex.get(w.word, norm) else { continue };
        let in_scope = [true, w.tag.is_some_and(is_noun), w.tag.is_some_and(is_verb)];
        for s in 0..3 {
            if in_scope[s] {
                sums[s] += v;
                counts[s] += 1;
            }
        }
    }
    std::array::from_fn(|s| (counts[s] > 0).then(|| sums[s] / counts[s] as f64))
}

/// Mean norm values over all words, nouns and verbs. A scope with no
/// lexicon hit is missing.
pub fn norm_features(words: &[TaggedWord<'_>], lex: &NormLexicon) -> NormFeatures {
    let lexical = LEXICAL_NORMS.iter().flat_map(|n| scope_means(words, lex, n)).collect();
    let sentiment = SENTIMENT_NORMS.iter().flat_map(|n| scope_means(words, lex, n)).collect();
    let coverage = words
        .iter()
        .filter(|w| LEXICAL_NORMS.iter().chain(&SENTIMENT_NORMS).any(|n| lex.get(w.word, n).is_some()))
        .count();
    NormFeatures {
        lexical,
        sentiment,
        coverage,
    }
}
