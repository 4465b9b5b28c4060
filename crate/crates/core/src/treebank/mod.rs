//! Constituency trees: reading, the production/tag registry, and the
//! syntax feature block.

mod features;
mod registry;
mod tree;

pub use features::{
    base_label, is_punct_tag, productions, syntax_features, SyntaxFeatures, COHESION_NAME, COMPLEXITY_NAMES,
    PHRASAL_NAMES,
};
pub use registry::{Production, ProductionRegistry, POS_TAG_COUNT, PRODUCTION_COUNT, UNIVERSAL_TAG_COUNT};
pub use tree::{parse_bracketed, parse_trees_file, ParseTree};
