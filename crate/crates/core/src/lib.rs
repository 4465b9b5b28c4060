//! Speech and language feature extraction for dementia detection from
//! picture-description recordings, with the classical models and
//! evaluation protocols used on them. The guide under `book/` walks through
//! the pipeline; its code blocks run as doc-tests.

pub mod acoustics;
pub mod chat;
pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod featureset;
pub mod fixtures;
pub mod lexical;
pub mod ml;
pub mod resources;
pub mod semantics;
pub mod speechgraph;
pub mod treebank;
pub mod util;

pub use error::{Error, Result};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/corpus.md")]
    struct Corpus;
    #[doc = include_str!("../../../book/src/features.md")]
    struct Features;
    #[doc = include_str!("../../../book/src/models.md")]
    struct Models;
    #[doc = include_str!("../../../book/src/analysis.md")]
    struct Analysis;
    #[doc = include_str!("../../../book/src/configuration.md")]
    struct Configuration;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
