//! Cross-validation, metrics, hypothesis tests and t-SNE.

mod cv;
mod folds;
mod metrics;
pub mod special;
mod stats;
mod tsne;

pub use cv::{
    cross_validate, grid_search, grid_specs, CvReport, FoldPrediction, GridResult, MetricValues, RunResult, Task,
    GRID_ALPHA, GRID_K, MEAN_RUN, METRIC_NAMES,
};
pub use folds::{complement, loso_folds, protocol_folds, stratified_folds, Protocol};
pub use metrics::{binary_metrics, confusion, majority_vote, regression_metrics, BinaryMetrics, Confusion, RegressionMetrics};
pub use stats::{
    average_ranks, bonferroni_threshold, feature_differentiation, kruskal_wallis, pearson, spearman, welch_t_test,
    Correlation, FeatureStat, KruskalWallis, StatsReport, TTest,
};
pub use tsne::{conditional_probabilities, pairwise_squared, scatter_svg, tsne, TsneParams, TsneResult};

use crate::error::Result;
use crate::featureset::Dataset;
use crate::ml::{FittedModel, ModelSpec};

/// Linear weights (in original feature columns) averaged over
/// leave-one-out refits of a regression spec.
pub fn loso_mean_weights(data: &Dataset, spec: &ModelSpec) -> Result<Vec<f64>> {
    let n = data.len();
    let mut total = vec![0.0; data.n_features()];
    for i in 0..n {
        let model = FittedModel::fit(data, &complement(&[i], n), spec, 0)?;
        let w = model
            .linear_weights()
            .ok_or_else(|| crate::Error::InvalidArgument(format!("{} has no linear weights", spec.kind)))?;
        total.iter_mut().zip(w).for_each(|(t, v)| *t += v);
    }
    total.iter_mut().for_each(|t| *t /= n as f64);
    Ok(total)
}

/// t-SNE input: median-imputed, z-scored columns (all of them, or the
/// listed ones in the given order).
pub fn tsne_input(data: &Dataset, columns: Option<&[usize]>) -> Vec<Vec<f64>> {
    let filled = crate::featureset::Imputer::fit(&data.rows, data.n_features()).transform(&data.rows);
    let picked: Vec<Vec<f64>> = match columns {
        Some(cols) => filled.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect(),
        None => filled,
    };
    let s = crate::ml::Standardizer::fit(&picked);
    picked.iter().map(|r| s.apply(r)).collect()
}
