//! Word-level features: richness, norms, word categories, noun ratios,
//! word length, invalid words and speaking rate.

mod categories;
mod norms;
mod resources;
mod richness;
pub mod tags;

pub use categories::{
    category_and_ratio_features, syllables, CategoryFeatures, CategoryInput, INVALID_WORDS_NAME, NOUN_RATIO_NAMES,
    RATE_NAMES, WORD_CATEGORY_NAMES, WORD_LENGTH_NAME,
};
pub use norms::{norm_features, NormFeatures, TaggedWord, SCOPES};
pub use resources::{NormLexicon, SuffixTable, WordLists, WordSet, LEXICAL_NORMS, SENTIMENT_NORMS};
pub(crate) use resources::{content_lines, read_resource};
pub use richness::{brunet, honore, mattr, msttr, richness_features, ttr, RICHNESS_NAMES};
