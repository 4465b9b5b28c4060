//! Per-fold model pipeline: impute, select, standardize, fit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::forest::RandomForest;
use super::linear::LinearModel;
use super::mlp::Mlp;
use super::nb::GaussianNb;
use super::selection::{anova_f_classif, f_regression_scores, SelectorState};
use super::spec::{ModelKind, ModelSpec};
use super::standardize::Standardizer;
use super::svm::SvmModel;
use crate::error::{Error, Result};
use crate::featureset::{write_atomic, Dataset, Imputer};

/// Bumped whenever the serialized model layout changes.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Model {
    Svm(SvmModel),
    Nn(Mlp),
    Rf(RandomForest),
    Nb(GaussianNb),
    Linear(LinearModel),
}

#[derive(Debug, Clone, Copy)]
pub enum Targets<'a> {
    Labels(&'a [u8]),
    Mmse(&'a [f64]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub format_version: u32,
    pub spec: ModelSpec,
    pub seed: u64,
    pub registry_hash: String,
    pub feature_names: Vec<String>,
    pub imputer: Imputer,
    pub selector: SelectorState,
    pub standardizer: Option<Standardizer>,
    pub model: Model,
}

impl FittedModel {
    /// Fit on the rows of `data` listed in `train`. The target is the label
    /// for classifiers and MMSE for regressors.
    pub fn fit(data: &Dataset, train: &[usize], spec: &ModelSpec, seed: u64) -> Result<Self> {
        let part = data.subset(train);
        let (labels, mmse);
        let targets = if spec.kind.is_regression() {
            mmse = part.mmse_targets()?;
            Targets::Mmse(&mmse)
        } else {
            labels = part.binary_labels()?;
            Targets::Labels(&labels)
        };
        Self::fit_rows(&part.rows, targets, spec, seed, &data.names, &data.registry_hash)
    }

    pub fn fit_rows(
        rows: &[Vec<Option<f64>>],
        targets: Targets<'_>,
        spec: &ModelSpec,
        seed: u64,
        names: &[String],
        registry_hash: &str,
    ) -> Result<Self> {
        spec.validate()?;
        if rows.is_empty() {
            return Err(Error::data("no training rows"));
        }
        let d = names.len();
        let imputer = Imputer::fit(rows, d);
        let x = imputer.transform(rows);
        let selector = match spec.k_features {
            None => SelectorState::all(d),
            Some(k) => {
                let scores = match targets {
                    Targets::Labels(y) => anova_f_classif(&x, y)?,
                    Targets::Mmse(y) => f_regression_scores(&x, y)?,
                };
                SelectorState::fit(scores, k)?
            }
        };
        let x: Vec<Vec<f64>> = x.iter().map(|r| selector.apply(r)).collect();
        let standardizer = (spec.standardize && spec.kind.is_scale_sensitive()).then(|| Standardizer::fit(&x));
        let x: Vec<Vec<f64>> = match &standardizer {
            Some(s) => x.iter().map(|r| s.apply(r)).collect(),
            None => x,
        };
        let model = match (spec.kind, targets) {
            (ModelKind::Svm, Targets::Labels(y)) => Model::Svm(SvmModel::fit(&x, y, &spec.svm)?),
            (ModelKind::Nn, Targets::Labels(y)) => Model::Nn(Mlp::fit(&x, y, &spec.mlp, seed)?.0),
            (ModelKind::Rf, Targets::Labels(y)) => Model::Rf(RandomForest::fit(&x, y, &spec.forest, seed)?),
            (ModelKind::Nb, Targets::Labels(y)) => {
                Model::Nb(GaussianNb::fit(&x, y, spec.nb_var_smoothing, [0.5, 0.5])?)
            }
            (ModelKind::Ols, Targets::Mmse(y)) => Model::Linear(LinearModel::fit(&x, y, 0.0)?),
            (ModelKind::Ridge, Targets::Mmse(y)) => Model::Linear(LinearModel::fit(&x, y, spec.alpha)?),
            (kind, _) => {
                return Err(Error::InvalidArgument(format!(
                    "model {kind} does not match the supplied target type"
                )))
            }
        };
        Ok(FittedModel {
            format_version: MODEL_FORMAT_VERSION,
            spec: spec.clone(),
            seed,
            registry_hash: registry_hash.to_string(),
            feature_names: names.to_vec(),
            imputer,
            selector,
            standardizer,
            model,
        })
    }

    /// Imputed, selected and standardized model input for one row.
    pub fn transform(&self, row: &[Option<f64>]) -> Vec<f64> {
        let x = self.selector.apply(&self.imputer.transform_row(row));
        match &self.standardizer {
            Some(s) => s.apply(&x),
            None => x,
        }
    }

    /// Class label (0 or 1) for classifiers, clipped MMSE for regressors.
    pub fn predict_row(&self, row: &[Option<f64>]) -> f64 {
        let x = self.transform(row);
        match &self.model {
            Model::Svm(m) => m.predict(&x) as f64,
            Model::Nn(m) => m.predict(&x) as f64,
            Model::Rf(m) => m.predict(&x) as f64,
            Model::Nb(m) => m.predict(&x) as f64,
            Model::Linear(m) => m.predict_clipped(&x),
        }
    }

    pub fn predict(&self, rows: &[Vec<Option<f64>>]) -> Vec<f64> {
        rows.iter().map(|r| self.predict_row(r)).collect()
    }

    pub fn is_regression(&self) -> bool {
        self.spec.kind.is_regression()
    }

    pub fn check_registry(&self, data: &Dataset) -> Result<()> {
        if data.registry_hash != self.registry_hash || data.names != self.feature_names {
            return Err(Error::RegistryMismatch {
                expected: self.registry_hash.clone(),
                found: data.registry_hash.clone(),
            });
        }
        Ok(())
    }

    /// Linear weights mapped back to original feature columns (unselected
    /// columns get 0).
    pub fn linear_weights(&self) -> Option<Vec<f64>> {
        let Model::Linear(m) = &self.model else {
            return None;
        };
        let mut w = vec![0.0; self.feature_names.len()];
        for (&col, &v) in self.selector.chosen.iter().zip(&m.weights) {
            w[col] = v;
        }
        Some(w)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: FittedModel = serde_json::from_str(text)?;
        if m.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::data(format!(
                "model file format {} is not supported (expected {MODEL_FORMAT_VERSION})",
                m.format_version
            )));
        }
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = self.to_json();
        write_atomic(path, |f| {
            use std::io::Write;
            f.write_all(text.as_bytes())?;
            Ok(())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::resource(path, e.to_string()))?;
        Self::from_json(&text)
    }
}
