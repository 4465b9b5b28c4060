//! Embedding-based coherence and picture content-unit features.

mod coherence;
mod content_units;
mod embedding;

pub use coherence::{coherence_features, CoherenceFeatures, SIMILARITY_THRESHOLDS};
pub use content_units::{
    content_unit_frequencies, global_coherence, Category, ContentUnit, ContentUnitLexicon, CATEGORIES,
    FREQUENCY_NAMES,
};
pub use embedding::EmbeddingSpace;

/// Default embedding space names and dimensions, in feature order.
pub const DEFAULT_SPACES: [(&str, usize); 5] =
    [("glove50", 50), ("glove100", 100), ("glove200", 200), ("w2v300", 300), ("ft300", 300)];

/// Index into [`DEFAULT_SPACES`] of the space used for pairwise distances.
pub const DEFAULT_PRIMARY_SPACE: usize = 3;
