use std::collections::{HashMap, HashSet};
use std::path::Path;

use crate::error::{Error, Result};

const BUILTIN_DEMONSTRATIVES: &str = include_str!("../../data/demonstratives.txt");
const BUILTIN_FUNCTION_WORDS: &str = include_str!("../../data/function_words.txt");
const BUILTIN_LIGHT_VERBS: &str = include_str!("../../data/light_verbs.txt");
const BUILTIN_DICTIONARY: &str = include_str!("../../data/dictionary_sample.txt");
const BUILTIN_NORMS: &str = include_str!("../../data/norms_sample.tsv");
const BUILTIN_SUFFIXES: &str = include_str!("../../data/lemma_suffixes.tsv");

/// Lexical norms in feature order, followed by the sentiment norms.
pub const LEXICAL_NORMS: [&str; 4] = ["imageability", "age_of_acquisition", "familiarity", "frequency"];
pub const SENTIMENT_NORMS: [&str; 3] = ["valence", "arousal", "dominance"];

pub(crate) fn read_resource(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::resource(path, e.to_string()))
}

/// Non-empty lines that do not start with `#`.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}

/// A lowercase word set.
#[derive(Debug, Clone, Default)]
pub struct WordSet(HashSet<String>);

impl WordSet {
    pub fn parse(text: &str) -> Self {
        WordSet(content_lines(text).map(str::to_lowercase).collect())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: AsRef<str>> FromIterator<S> for WordSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        WordSet(iter.into_iter().map(|s| s.as_ref().to_lowercase()).collect())
    }
}

#[derive(Debug, Clone)]
pub struct WordLists {
    pub demonstratives: WordSet,
    pub function_words: WordSet,
    pub light_verbs: WordSet,
    pub dictionary: WordSet,
    pub suffixes: SuffixTable,
}

impl WordLists {
    pub fn builtin() -> Self {
        WordLists {
            demonstratives: WordSet::parse(BUILTIN_DEMONSTRATIVES),
            function_words: WordSet::parse(BUILTIN_FUNCTION_WORDS),
            light_verbs: WordSet::parse(BUILTIN_LIGHT_VERBS),
            dictionary: WordSet::parse(BUILTIN_DICTIONARY),
            suffixes: SuffixTable::builtin(),
        }
    }

    /// In the dictionary directly or after suffix stripping.
    pub fn is_valid_word(&self, word: &str) -> bool {
        self.suffixes.candidates(word).iter().any(|c| self.dictionary.contains(c))
    }

    pub fn load(
        demonstratives: &Path,
        function_words: &Path,
        light_verbs: &Path,
        dictionary: &Path,
        suffixes: SuffixTable,
    ) -> Result<Self> {
        let lists = WordLists {
            demonstratives: WordSet::parse(&read_resource(demonstratives)?),
            function_words: WordSet::parse(&read_resource(function_words)?),
            light_verbs: WordSet::parse(&read_resource(light_verbs)?),
            dictionary: WordSet::parse(&read_resource(dictionary)?),
            suffixes,
        };
        if lists.dictionary.is_empty() {
            return Err(Error::resource(dictionary, "dictionary is empty"));
        }
        Ok(lists)
    }
}

/// Ordered `suffix -> replacement` rules used as a crude lemmatizer.
#[derive(Debug, Clone, Default)]
pub struct SuffixTable {
    rules: Vec<(String, String)>,
}

impl SuffixTable {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_SUFFIXES).expect("built-in suffix table is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_resource(path)?).map_err(|e| Error::resource(path, e.to_string()))
    }

    /// `suffix<TAB>replacement` lines; `-` stands for the empty replacement.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for line in content_lines(text) {
            let (suffix, repl) = line
                .split_once('\t')
                .ok_or_else(|| Error::data(format!("suffix rule without tab: {line:?}")))?;
            let repl = repl.trim();
            rules.push((suffix.trim().to_lowercase(), if repl == "-" { String::new() } else { repl.to_lowercase() }));
        }
        Ok(SuffixTable { rules })
    }

    /// The lowercase word followed by every stripped form, in rule order.
    /// Stems shorter than two letters are not produced.
    pub fn candidates(&self, word: &str) -> Vec<String> {
        let word = word.to_lowercase();
        let mut out = vec![word.clone()];
        for (suffix, repl) in &self.rules {
            if let Some(stem) = word.strip_suffix(suffix.as_str()) {
                if stem.chars().count() >= 2 {
                    let c = format!("{stem}{repl}");
                    if !out.contains(&c) {
                        out.push(c);
                    }
                }
            }
        }
        out
    }
}

/// Word norms keyed by lowercase word. A word absent for a norm has no
/// value for it; nothing is defaulted.
#[derive(Debug, Clone, Default)]
pub struct NormLexicon {
    values: HashMap<String, HashMap<String, f64>>,
}

impl NormLexicon {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_NORMS).expect("built-in norms are valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_resource(path)?).map_err(|e| Error::resource(path, e.to_string()))
    }

    /// Parse `word<TAB>norm<TAB>value` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lex = NormLexicon::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split('\t');
            let (Some(word), Some(norm), Some(value), None) = (parts.next(), parts.next(), parts.next(), parts.next())
            else {
                return Err(Error::data(format!("norms line {}: expected 3 tab-separated fields", i + 1)));
            };
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::data(format!("norms line {}: bad value {value:?}", i + 1)))?;
            if !value.is_finite() {
                return Err(Error::data(format!("norms line {}: non-finite value", i + 1)));
            }
            lex.insert(word.trim(), norm.trim(), value);
        }
        Ok(lex)
    }

    pub fn insert(&mut self, word: &str, norm: &str, value: f64) {
        self.values
            .entry(word.to_lowercase())
            .or_default()
            .insert(norm.to_string(), value);
    }

    pub fn get(&self, word: &str, norm: &str) -> Option<f64> {
        self.values.get(&word.to_lowercase())?.get(norm).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_insensitive_lookup() {
        let mut lex = NormLexicon::default();
        lex.insert("Cat", "imageability", 6.0);
        assert_eq!(lex.get("CAT", "imageability"), Some(6.0));
        assert_eq!(lex.get("cat", "valence"), None);
        assert_eq!(lex.get("dog", "imageability"), None);
    }

    #[test]
    fn builtin_resources_load() {
        let lists = WordLists::builtin();
        assert!(lists.demonstratives.contains("This"));
        assert!(lists.dictionary.len() > 500);
        assert!(!NormLexicon::builtin().is_empty());
    }

    #[test]
    fn suffix_candidates() {
        let t = SuffixTable::builtin();
        assert!(t.candidates("cookies").contains(&"cookie".to_string()));
        assert!(t.candidates("washing").contains(&"wash".to_string()));
        assert!(t.candidates("taking").contains(&"take".to_string()));
        assert!(t.candidates("running").contains(&"run".to_string()));
        assert!(t.candidates("spilled").contains(&"spill".to_string()));
        assert!(WordLists::builtin().is_valid_word("runs"));
        assert!(!WordLists::builtin().is_valid_word("blorf"));
    }

    #[test]
    fn malformed_norm_line() {
        assert!(NormLexicon::parse("cat\timageability\n").is_err());
        assert!(NormLexicon::parse("cat\timageability\tlots\n").is_err());
    }
}
