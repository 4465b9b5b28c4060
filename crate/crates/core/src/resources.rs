//! Loading every lexicon, registry and embedding the extractor needs.

use std::path::{Path, PathBuf};

use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::lexical::{NormLexicon, SuffixTable, WordLists, WordSet};
use crate::semantics::{ContentUnitLexicon, EmbeddingSpace};
use crate::treebank::ProductionRegistry;

#[derive(Debug, Clone)]
pub struct Resources {
    pub productions: ProductionRegistry,
    pub lists: WordLists,
    pub norms: NormLexicon,
    pub content_units: ContentUnitLexicon,
    pub spaces: Vec<EmbeddingSpace>,
    /// Index into `spaces` of the pairwise-distance space.
    pub primary_space: usize,
}

impl Resources {
    /// Built-in lexicons and registries with caller-supplied embeddings.
    pub fn with_spaces(spaces: Vec<EmbeddingSpace>, primary_space: usize) -> Result<Self> {
        if primary_space >= spaces.len() {
            return Err(Error::Config(format!(
                "primary space index {primary_space} out of range for {} spaces",
                spaces.len()
            )));
        }
        Ok(Resources {
            productions: ProductionRegistry::builtin(),
            lists: WordLists::builtin(),
            norms: NormLexicon::builtin(),
            content_units: ContentUnitLexicon::builtin(),
            spaces,
            primary_space,
        })
    }

    pub fn space_names(&self) -> Vec<String> {
        self.spaces.iter().map(|s| s.name.clone()).collect()
    }

    pub fn load(cfg: &PipelineConfig) -> Result<Self> {
        let r = &cfg.resources;
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| cfg.resolve(p));
        let read_set = |p: &Option<PathBuf>, builtin: &WordSet| -> Result<WordSet> {
            match path(p) {
                Some(p) => Ok(WordSet::parse(&read(&p)?)),
                None => Ok(builtin.clone()),
            }
        };

        let productions = match (path(&r.production_rules), path(&r.pos_tags), path(&r.universal_tags)) {
            (None, None, None) => ProductionRegistry::builtin(),
            (Some(a), Some(b), Some(c)) => ProductionRegistry::from_files(&a, &b, &c)?,
            _ => {
                return Err(Error::Config(
                    "production_rules, pos_tags and universal_tags must be set together".into(),
                ))
            }
        };
        let suffixes = match path(&r.lemma_suffixes) {
            Some(p) => SuffixTable::load(&p)?,
            None => SuffixTable::builtin(),
        };
        let builtin = WordLists::builtin();
        let lists = WordLists {
            demonstratives: read_set(&r.demonstratives, &builtin.demonstratives)?,
            function_words: read_set(&r.function_words, &builtin.function_words)?,
            light_verbs: read_set(&r.light_verbs, &builtin.light_verbs)?,
            dictionary: read_set(&r.dictionary, &builtin.dictionary)?,
            suffixes: suffixes.clone(),
        };
        if lists.dictionary.is_empty() {
            return Err(Error::Config("dictionary is empty".into()));
        }
        let norms = match path(&r.norms) {
            Some(p) => NormLexicon::load(&p)?,
            None => NormLexicon::builtin(),
        };
        let content_units = match path(&r.content_units) {
            Some(p) => ContentUnitLexicon::load(&p, suffixes)?,
            None => ContentUnitLexicon::parse(include_str!("../data/content_units.tsv"), suffixes)?,
        };
        let spaces = r
            .embeddings
            .iter()
            .map(|e| {
                let p = cfg.resolve(&e.path);
                if !p.exists() {
                    return Err(Error::resource(
                        &p,
                        format!(
                            "embedding file for space {:?} not found; set resources.embeddings in the config, \
                             resources.root, or {}",
                            e.name,
                            crate::config::RESOURCES_ENV
                        ),
                    ));
                }
                EmbeddingSpace::load(&e.name, e.dim, &p)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Resources {
            productions,
            lists,
            norms,
            content_units,
            spaces,
            primary_space: cfg.primary_space_index(),
        })
    }
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| Error::resource(p, e.to_string()))
}
