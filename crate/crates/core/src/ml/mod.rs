//! Feature selection, classifiers and regressors.

pub mod forest;
pub mod linalg;
pub mod linear;
pub mod mlp;
pub mod nb;
mod pipeline;
pub mod selection;
mod spec;
pub mod standardize;
pub mod svm;

pub use forest::{DecisionTree, ForestParams, Node, RandomForest};
pub use linear::{clip_mmse, LinearModel, MMSE_RANGE};
pub use mlp::{Mlp, MlpParams};
pub use nb::GaussianNb;
pub use pipeline::{FittedModel, Model, Targets, MODEL_FORMAT_VERSION};
pub use selection::{anova_f_classif, f_regression_scores, select_top_k, SelectorState};
pub use spec::{ModelKind, ModelSpec, MODEL_KINDS};
pub use standardize::Standardizer;
pub use svm::{kernel_matrix, rbf, solve_dual, DualSolution, SvmModel, SvmParams};
