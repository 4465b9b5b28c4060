//! Pipeline configuration read from TOML. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::acoustics::AcousticConfig;
use crate::error::{Error, Result};
use crate::ml::ModelSpec;
use crate::semantics::DEFAULT_SPACES;

/// Environment variable naming the fallback resource root.
pub const RESOURCES_ENV: &str = "COGSPEECH_RESOURCES";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingResource {
    pub name: String,
    pub dim: usize,
    pub path: PathBuf,
}

/// Resource files. Unset word lists and registries fall back to the
/// built-in samples; embeddings have no built-in and default to
/// `embeddings/<name>.txt` under the resource root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResourceConfig {
    pub root: Option<PathBuf>,
    pub production_rules: Option<PathBuf>,
    pub pos_tags: Option<PathBuf>,
    pub universal_tags: Option<PathBuf>,
    pub norms: Option<PathBuf>,
    pub dictionary: Option<PathBuf>,
    pub demonstratives: Option<PathBuf>,
    pub function_words: Option<PathBuf>,
    pub light_verbs: Option<PathBuf>,
    pub content_units: Option<PathBuf>,
    pub lemma_suffixes: Option<PathBuf>,
    pub embeddings: Vec<EmbeddingResource>,
}

impl Default for ResourceConfig {
    fn default() -> Self {
        ResourceConfig {
            root: None,
            production_rules: None,
            pos_tags: None,
            universal_tags: None,
            norms: None,
            dictionary: None,
            demonstratives: None,
            function_words: None,
            light_verbs: None,
            content_units: None,
            lemma_suffixes: None,
            embeddings: DEFAULT_SPACES
                .iter()
                .map(|(name, dim)| EmbeddingResource {
                    name: name.to_string(),
                    dim: *dim,
                    path: PathBuf::from(format!("embeddings/{name}.txt")),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtractionConfig {
    pub participant: String,
    pub mattr_window: usize,
    /// Embedding space used for the pairwise utterance-distance features.
    pub primary_space: String,
    /// Join utterances into one token stream for the speech graph.
    pub graph_across_utterances: bool,
    /// Cut the audio to participant time codes when every participant
    /// utterance has one.
    pub restrict_audio_to_participant: bool,
    pub acoustic: AcousticConfig,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            participant: crate::chat::DEFAULT_PARTICIPANT.to_string(),
            mattr_window: 20,
            primary_space: DEFAULT_SPACES[crate::semantics::DEFAULT_PRIMARY_SPACE].0.to_string(),
            graph_across_utterances: true,
            restrict_audio_to_participant: true,
            acoustic: AcousticConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    pub seeds: Vec<u64>,
    pub folds: usize,
    pub significance: f64,
    /// Number of tests in the Bonferroni denominator; the feature count
    /// when unset.
    pub bonferroni_tests: Option<usize>,
    pub tsne_perplexity: f64,
    pub tsne_iterations: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            seeds: vec![0, 1, 2],
            folds: 10,
            significance: 0.05,
            bonferroni_tests: None,
            tsne_perplexity: 30.0,
            tsne_iterations: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub resources: ResourceConfig,
    pub extraction: ExtractionConfig,
    pub model: ModelSpec,
    pub eval: EvalConfig,
    /// Directory relative resource paths resolve against when neither
    /// `resources.root` nor the environment variable is set.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::resource(path, e.to_string()))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.extraction.acoustic.validate()?;
        if self.extraction.mattr_window == 0 {
            return Err(Error::Config("mattr_window must be positive".into()));
        }
        if !self.resources.embeddings.iter().any(|e| e.name == self.extraction.primary_space) {
            return Err(Error::Config(format!(
                "primary_space {:?} is not one of the configured embeddings",
                self.extraction.primary_space
            )));
        }
        if self.eval.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        if !(self.eval.significance > 0.0 && self.eval.significance < 1.0) {
            return Err(Error::Config("significance must lie in (0, 1)".into()));
        }
        self.model.validate()
    }

    /// Root for relative resource paths: `resources.root` (itself relative
    /// to the config file's directory), then the environment variable,
    /// then the config file's directory.
    pub fn resource_root(&self) -> Option<PathBuf> {
        self.resources
            .root
            .as_ref()
            .map(|r| match &self.base_dir {
                Some(base) if r.is_relative() => base.join(r),
                _ => r.clone(),
            })
            .or_else(|| std::env::var_os(RESOURCES_ENV).map(PathBuf::from))
            .or_else(|| self.base_dir.clone())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            return path.to_path_buf();
        }
        match self.resource_root() {
            Some(root) => root.join(path),
            None => path.to_path_buf(),
        }
    }

    pub fn primary_space_index(&self) -> usize {
        self.resources
            .embeddings
            .iter()
            .position(|e| e.name == self.extraction.primary_space)
            .expect("validated")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = PipelineConfig::default();
        cfg.validate().unwrap();
        let back = PipelineConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = PipelineConfig::from_toml("[extraction]\nmatr_window = 10\n").unwrap_err();
        assert!(err.to_string().contains("matr_window"), "{err}");
    }

    #[test]
    fn partial_override() {
        let cfg = PipelineConfig::from_toml("[extraction]\nmattr_window = 10\n[extraction.acoustic.pause]\nsilence_threshold = 0.05\n").unwrap();
        assert_eq!(cfg.extraction.mattr_window, 10);
        assert_eq!(cfg.extraction.acoustic.pause.silence_threshold, 0.05);
        assert_eq!(cfg.extraction.acoustic.pause.long_pause_s, 0.4);
    }
}
