//! Penn Treebank tag classes.

pub fn is_noun(tag: &str) -> bool {
    matches!(tag, "NN" | "NNS" | "NNP" | "NNPS")
}

pub fn is_verb(tag: &str) -> bool {
    matches!(tag, "VB" | "VBD" | "VBG" | "VBN" | "VBP" | "VBZ")
}

pub fn is_pronoun(tag: &str) -> bool {
    matches!(tag, "PRP" | "PRP$" | "WP" | "WP$")
}

pub fn is_inflected_verb(tag: &str) -> bool {
    matches!(tag, "VBD" | "VBG" | "VBN" | "VBZ")
}

/// Tags counted as propositions for idea density: verbs, adjectives,
/// adverbs, prepositions and conjunctions.
pub fn is_proposition(tag: &str) -> bool {
    is_verb(tag) || matches!(tag, "JJ" | "JJR" | "JJS" | "RB" | "RBR" | "RBS" | "IN" | "CC")
}
