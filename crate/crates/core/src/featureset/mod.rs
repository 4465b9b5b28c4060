//! The 509-feature layout, per-sample extraction, imputation and the
//! matrix file format.

mod extract;
mod impute;
mod matrix;
mod registry;

pub use extract::{extract_all, AudioScope, FeatureVector, Provenance, Sample};
pub use impute::Imputer;
pub use matrix::{write_atomic, Dataset};
pub use registry::{
    needs_audio, tag_feature_name, Block, FeatureDescriptor, FeatureRegistry, Group, BLOCKS, EMBEDDING_SPACES,
    FEATURE_COUNT,
};
