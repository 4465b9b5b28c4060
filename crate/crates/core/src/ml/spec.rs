use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::forest::ForestParams;
use super::mlp::MlpParams;
use super::svm::SvmParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    #[serde(alias = "svm_rbf")]
    Svm,
    Nn,
    Rf,
    Nb,
    Ols,
    Ridge,
}

pub const MODEL_KINDS: [ModelKind; 6] = [
    ModelKind::Svm,
    ModelKind::Nn,
    ModelKind::Rf,
    ModelKind::Nb,
    ModelKind::Ols,
    ModelKind::Ridge,
];

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Svm => "svm",
            ModelKind::Nn => "nn",
            ModelKind::Rf => "rf",
            ModelKind::Nb => "nb",
            ModelKind::Ols => "ols",
            ModelKind::Ridge => "ridge",
        }
    }

    pub fn is_regression(self) -> bool {
        matches!(self, ModelKind::Ols | ModelKind::Ridge)
    }

    /// Whether standardization (when enabled) applies to this model.
    /// Trees and naive Bayes are insensitive to feature scale.
    pub fn is_scale_sensitive(self) -> bool {
        !matches!(self, ModelKind::Rf | ModelKind::Nb)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "svm" | "svm_rbf" => Ok(ModelKind::Svm),
            "nn" | "mlp" => Ok(ModelKind::Nn),
            "rf" => Ok(ModelKind::Rf),
            "nb" => Ok(ModelKind::Nb),
            "ols" => Ok(ModelKind::Ols),
            "ridge" => Ok(ModelKind::Ridge),
            _ => Err(Error::InvalidArgument(format!(
                "unknown model {s:?}; expected one of svm, nn, rf, nb, ols, ridge"
            ))),
        }
    }
}

/// Model choice plus every hyperparameter, with published defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Features kept by univariate selection; `None` keeps all.
    pub k_features: Option<usize>,
    /// Z-score features before SVM, network and linear fits.
    pub standardize: bool,
    /// Ridge penalty.
    pub alpha: f64,
    pub nb_var_smoothing: f64,
    pub svm: SvmParams,
    pub forest: ForestParams,
    pub mlp: MlpParams,
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec {
            kind: ModelKind::Svm,
            k_features: None,
            standardize: true,
            alpha: 10.0,
            nb_var_smoothing: 1e-10,
            svm: SvmParams::default(),
            forest: ForestParams::default(),
            mlp: MlpParams::default(),
        }
    }
}

impl ModelSpec {
    pub fn new(kind: ModelKind) -> Self {
        ModelSpec {
            kind,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.k_features == Some(0) {
            return bad("model.k_features must be at least 1");
        }
        if !(self.alpha >= 0.0) {
            return bad("model.alpha must be non-negative");
        }
        if !(self.nb_var_smoothing >= 0.0) {
            return bad("model.nb_var_smoothing must be non-negative");
        }
        if !(self.svm.c > 0.0 && self.svm.gamma > 0.0 && self.svm.tolerance > 0.0) {
            return bad("model.svm: c, gamma and tolerance must be positive");
        }
        if self.svm.max_iterations == 0 {
            return bad("model.svm.max_iterations must be positive");
        }
        if self.forest.n_trees == 0 || self.forest.max_features == Some(0) {
            return bad("model.forest: n_trees and max_features must be positive");
        }
        if self.mlp.epochs == 0 || self.mlp.hidden.iter().any(|&h| h == 0) {
            return bad("model.mlp: epochs and layer widths must be positive");
        }
        if !(self.mlp.learning_rate > 0.0 && self.mlp.l2 >= 0.0) {
            return bad("model.mlp: learning_rate must be positive and l2 non-negative");
        }
        Ok(())
    }

    /// Short label such as `svm k=10` or `ridge k=all alpha=10`.
    pub fn describe(&self) -> String {
        let k = self.k_features.map_or("all".to_string(), |k| k.to_string());
        match self.kind {
            ModelKind::Ridge => format!("ridge k={k} alpha={}", self.alpha),
            kind => format!("{kind} k={k}"),
        }
    }
}
