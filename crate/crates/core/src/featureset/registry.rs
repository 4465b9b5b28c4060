use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::acoustics::{mfcc_names, DURATION_NAMES, F0_NAMES, PAUSE_NAMES, ZCR_NAMES};
use crate::error::{Error, Result};
use crate::lexical::{
    INVALID_WORDS_NAME, LEXICAL_NORMS, NOUN_RATIO_NAMES, RATE_NAMES, RICHNESS_NAMES, SCOPES, SENTIMENT_NORMS,
    WORD_CATEGORY_NAMES, WORD_LENGTH_NAME,
};
use crate::semantics::FREQUENCY_NAMES;
use crate::speechgraph::GRAPH_NAMES;
use crate::treebank::{ProductionRegistry, COHESION_NAME, COMPLEXITY_NAMES, PHRASAL_NAMES};

pub const FEATURE_COUNT: usize = 509;
pub const EMBEDDING_SPACES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Lexicosyntactic,
    Acoustic,
    Semantic,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::Lexicosyntactic => "lexicosyntactic",
            Group::Acoustic => "acoustic",
            Group::Semantic => "semantic",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A contiguous run of features computed together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub name: &'static str,
    pub group: Group,
    pub module: &'static str,
    pub len: usize,
    pub definition: &'static str,
}

use Group::{Acoustic, Lexicosyntactic, Semantic};

const fn block(name: &'static str, group: Group, module: &'static str, len: usize, definition: &'static str) -> Block {
    Block {
        name,
        group,
        module,
        len,
        definition,
    }
}

/// Feature layout, in vector order.
pub const BLOCKS: [Block; 24] = [
    block("complexity", Lexicosyntactic, "treebank", 36, "L2SCA counts and indices, utterance length and depth, normalized node counts"),
    block("productions", Lexicosyntactic, "treebank", 104, "count of the production over all phrasal productions"),
    block("phrasal", Lexicosyntactic, "treebank", 13, "NP/VP/PP proportion, mean length and rate, plus combined ratios"),
    block("lexical_norms", Lexicosyntactic, "lexical", 12, "mean norm value over all words, nouns, verbs"),
    block("richness", Lexicosyntactic, "lexical", 6, "TTR, MATTR, Brunet, Honore, MSTTR, hapax proportion"),
    block("word_category", Lexicosyntactic, "lexical", 5, "proportion of words in the category"),
    block("noun_ratio", Lexicosyntactic, "lexical", 3, "noun, verb and pronoun ratios"),
    block("word_length", Lexicosyntactic, "lexical", 1, "mean letters per word"),
    block("universal_pos", Lexicosyntactic, "treebank", 18, "proportion of preterminals mapping to the universal tag"),
    block("pos", Lexicosyntactic, "treebank", 53, "proportion of preterminals with the tag"),
    block("local_coherence", Lexicosyntactic, "semantics", 15, "cosine distance between consecutive utterance vectors"),
    block("utterance_distance", Lexicosyntactic, "semantics", 5, "pairwise utterance similarity on the primary space"),
    block("speech_graph", Lexicosyntactic, "speechgraph", 13, "word adjacency graph structure"),
    block("cohesion", Lexicosyntactic, "treebank", 1, "verb tense switches per utterance"),
    block("rate", Lexicosyntactic, "lexical", 2, "words and syllables per second of audio"),
    block("invalid_words", Lexicosyntactic, "lexical", 1, "proportion of words outside the dictionary"),
    block("sentiment", Lexicosyntactic, "lexical", 9, "mean valence, arousal, dominance over all words, nouns, verbs"),
    block("pause", Acoustic, "acoustics", 9, "pause durations and counts, fillers"),
    block("f0", Acoustic, "acoustics", 4, "fundamental frequency over voiced frames"),
    block("duration", Acoustic, "acoustics", 2, "total and spoken seconds"),
    block("zcr", Acoustic, "acoustics", 4, "moments of the per-frame zero-crossing rate"),
    block("mfcc", Acoustic, "acoustics", 168, "moments of MFCC 1-14 and their deltas"),
    block("content_unit_frequency", Semantic, "semantics", 10, "picture content units mentioned"),
    block("global_coherence", Semantic, "semantics", 15, "cosine distance from utterances to the content-unit centroid"),
];

/// Blocks that need audio.
pub fn needs_audio(block: &Block) -> bool {
    block.group == Acoustic || block.name == "rate"
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureDescriptor {
    pub name: String,
    pub group: Group,
    pub block: String,
    pub module: String,
}

#[derive(Debug, Clone)]
pub struct FeatureRegistry {
    features: Vec<FeatureDescriptor>,
    hash: String,
}

/// Feature-name form of a POS tag: punctuation tags get spelled-out names.
pub fn tag_feature_name(tag: &str) -> String {
    let named = match tag {
        "," => "COMMA",
        "." => "PERIOD",
        ":" => "COLON",
        "``" => "LQUOTE",
        "''" => "RQUOTE",
        "$" => "DOLLAR",
        "#" => "HASH",
        "-LRB-" => "LRB",
        "-RRB-" => "RRB",
        "-NONE-" => "NONE",
        other => return other.replace('$', "S"),
    };
    named.to_string()
}

impl FeatureRegistry {
    /// Layout for the given production registry and the five embedding
    /// space names (which appear in coherence feature names).
    pub fn new(productions: &ProductionRegistry, spaces: &[String]) -> Result<Self> {
        if spaces.len() != EMBEDDING_SPACES {
            return Err(Error::Config(format!(
                "the feature layout needs exactly {EMBEDDING_SPACES} embedding spaces, {} configured",
                spaces.len()
            )));
        }
        let mut names: Vec<Vec<String>> = Vec::with_capacity(BLOCKS.len());
        let own = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let scoped = |norms: &[&str], prefix: &str| {
            norms
                .iter()
                .flat_map(|n| SCOPES.iter().map(move |s| format!("{prefix}_{n}_{s}")))
                .collect::<Vec<_>>()
        };
        let per_space = |prefix: &str, stats: [&str; 3]| {
            spaces
                .iter()
                .flat_map(|sp| stats.iter().map(move |st| format!("{prefix}_{sp}_{st}_dist")))
                .collect::<Vec<_>>()
        };
        names.push(own(&COMPLEXITY_NAMES));
        names.push(productions.rules().iter().map(|r| format!("prod_{}", r.feature_name())).collect());
        names.push(own(&PHRASAL_NAMES));
        names.push(scoped(&LEXICAL_NORMS, "norm"));
        names.push(own(&RICHNESS_NAMES));
        names.push(own(&WORD_CATEGORY_NAMES));
        names.push(own(&NOUN_RATIO_NAMES));
        names.push(vec![WORD_LENGTH_NAME.to_string()]);
        names.push(productions.universal_tags().iter().map(|t| format!("upos_{t}")).collect());
        names.push(productions.pos_tags().iter().map(|t| format!("pos_{}", tag_feature_name(t))).collect());
        names.push(per_space("coh", ["avg", "max", "min"]));
        names.push(own(&[
            "utt_pairs_sim_below_0.5",
            "utt_pairs_sim_below_0.3",
            "utt_pairs_sim_below_0",
            "utt_pairs_avg_dist",
            "utt_pairs_min_dist",
        ]));
        names.push(own(&GRAPH_NAMES));
        names.push(vec![COHESION_NAME.to_string()]);
        names.push(own(&RATE_NAMES));
        names.push(vec![INVALID_WORDS_NAME.to_string()]);
        names.push(scoped(&SENTIMENT_NORMS, "sent"));
        names.push(own(&PAUSE_NAMES));
        names.push(own(&F0_NAMES));
        names.push(own(&DURATION_NAMES));
        names.push(own(&ZCR_NAMES));
        names.push(mfcc_names(14));
        names.push(own(&FREQUENCY_NAMES));
        names.push(per_space("gcoh", ["avg", "min", "max"]));

        let mut features = Vec::with_capacity(FEATURE_COUNT);
        for (b, block_names) in BLOCKS.iter().zip(names) {
            assert_eq!(block_names.len(), b.len, "block {} size", b.name);
            features.extend(block_names.into_iter().map(|name| FeatureDescriptor {
                name,
                group: b.group,
                block: b.name.to_string(),
                module: b.module.to_string(),
            }));
        }
        let mut seen = std::collections::HashSet::new();
        for f in &features {
            if !seen.insert(&f.name) {
                return Err(Error::Config(format!("duplicate feature name {:?}", f.name)));
            }
        }
        debug_assert_eq!(features.len(), FEATURE_COUNT);
        let hash = registry_hash(&features);
        Ok(FeatureRegistry { features, hash })
    }

    pub fn features(&self) -> &[FeatureDescriptor] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.features.iter().map(|f| f.name.as_str()).collect()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    /// Hex SHA-256 of the ordered names, groups and blocks.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn group_counts(&self) -> [(Group, usize); 3] {
        let count = |g| self.features.iter().filter(|f| f.group == g).count();
        [(Lexicosyntactic, count(Lexicosyntactic)), (Acoustic, count(Acoustic)), (Semantic, count(Semantic))]
    }

    /// Index range of a block.
    pub fn block_range(&self, name: &str) -> Option<std::ops::Range<usize>> {
        let mut start = 0;
        for b in &BLOCKS {
            if b.name == name {
                return Some(start..start + b.len);
            }
            start += b.len;
        }
        None
    }

    /// Tab-separated listing: index, name, group, block, module, definition.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("# feature registry {}\nindex\tname\tgroup\tblock\tmodule\tdefinition\n", self.hash);
        for (i, f) in self.features.iter().enumerate() {
            let def = BLOCKS.iter().find(|b| b.name == f.block).map_or("", |b| b.definition);
            out.push_str(&format!("{i}\t{}\t{}\t{}\t{}\t{def}\n", f.name, f.group, f.block, f.module));
        }
        out
    }
}

fn registry_hash(features: &[FeatureDescriptor]) -> String {
    let mut h = Sha256::new();
    for f in features {
        h.update(f.name.as_bytes());
        h.update(b"\t");
        h.update(f.group.as_str().as_bytes());
        h.update(b"\t");
        h.update(f.block.as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
