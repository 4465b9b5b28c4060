use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::coherence::distance_stats;
use super::embedding::EmbeddingSpace;
use crate::error::{Error, Result};
use crate::lexical::{content_lines, read_resource, SuffixTable};

const BUILTIN_UNITS: &str = include_str!("../../data/content_units.tsv");

pub const CATEGORIES: [Category; 4] = [Category::Subject, Category::Place, Category::Object, Category::Action];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    Subject,
    Place,
    Object,
    Action,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Subject => "subject",
            Category::Place => "place",
            Category::Object => "object",
            Category::Action => "action",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CATEGORIES
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown content-unit category {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContentUnit {
    pub name: String,
    pub category: Category,
    pub lemmas: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ContentUnitLexicon {
    units: Vec<ContentUnit>,
    suffixes: SuffixTable,
}

impl ContentUnitLexicon {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_UNITS, SuffixTable::builtin()).expect("built-in content units are valid")
    }

    pub fn load(path: &Path, suffixes: SuffixTable) -> Result<Self> {
        Self::parse(&read_resource(path)?, suffixes).map_err(|e| Error::resource(path, e.to_string()))
    }

    /// `unit<TAB>category<TAB>lemma1,lemma2,...` lines.
    pub fn parse(text: &str, suffixes: SuffixTable) -> Result<Self> {
        let mut units: Vec<ContentUnit> = Vec::new();
        for line in content_lines(text) {
            let fields: Vec<&str> = line.split('\t').collect();
            let [name, category, lemmas] = fields[..] else {
                return Err(Error::Config(format!("content unit line needs 3 fields: {line:?}")));
            };
            let lemmas: Vec<String> = lemmas
                .split(',')
                .map(|l| l.trim().to_lowercase())
                .filter(|l| !l.is_empty())
                .collect();
            if lemmas.is_empty() {
                return Err(Error::Config(format!("content unit {name:?} has no lemmas")));
            }
            if units.iter().any(|u| u.name == name) {
                return Err(Error::Config(format!("duplicate content unit {name:?}")));
            }
            units.push(ContentUnit {
                name: name.to_string(),
                category: category.trim().parse()?,
                lemmas,
            });
        }
        if units.is_empty() {
            return Err(Error::Config("content-unit lexicon is empty".into()));
        }
        Ok(ContentUnitLexicon { units, suffixes })
    }

    pub fn units(&self) -> &[ContentUnit] {
        &self.units
    }

    /// The first unit (in lexicon order) whose lemma set contains the word
    /// or one of its suffix-stripped forms.
    pub fn unit_of(&self, word: &str) -> Option<usize> {
        let candidates = self.suffixes.candidates(word);
        self.units
            .iter()
            .position(|u| candidates.iter().any(|c| u.lemmas.iter().any(|l| l == c)))
    }

    /// Every lemma of every unit, for the picture's centroid vector.
    pub fn all_lemmas(&self) -> Vec<&str> {
        self.units.iter().flat_map(|u| u.lemmas.iter().map(String::as_str)).collect()
    }
}

pub const FREQUENCY_NAMES: [&str; 10] = [
    "cu_distinct_to_total",
    "cu_distinct_subject_to_total",
    "cu_distinct_place_to_total",
    "cu_distinct_object_to_total",
    "cu_distinct_action_to_total",
    "cu_mentions_per_word",
    "cu_subject_mentions_per_word",
    "cu_place_mentions_per_word",
    "cu_object_mentions_per_word",
    "cu_action_mentions_per_word",
];

/// Content-unit frequency block over the participant's words.
///
/// Distinct ratios divide by the number of units in the lexicon (per
/// category for the category ratios); mention rates divide by the word
/// count.
pub fn content_unit_frequencies(words: &[&str], lex: &ContentUnitLexicon) -> [Option<f64>; 10] {
    let mut seen: HashSet<usize> = HashSet::new();
    let mut mentions = [0usize; 4];
    for w in words {
        if let Some(u) = lex.unit_of(w) {
            seen.insert(u);
            mentions[lex.units[u].category.index()] += 1;
        }
    }
    let mut distinct = [0usize; 4];
    let mut totals = [0usize; 4];
    for (i, u) in lex.units.iter().enumerate() {
        totals[u.category.index()] += 1;
        if seen.contains(&i) {
            distinct[u.category.index()] += 1;
        }
    }
    let n = words.len() as f64;
    let per_word = |k: usize| (n > 0.0).then(|| k as f64 / n);
    let mut out = [None; 10];
    out[0] = Some(seen.len() as f64 / lex.units.len() as f64);
    for c in 0..4 {
        out[1 + c] = (totals[c] > 0).then(|| distinct[c] as f64 / totals[c] as f64);
        out[6 + c] = per_word(mentions[c]);
    }
    out[5] = per_word(mentions.iter().sum());
    out
}

/// Avg/min/max cosine distance between each utterance vector and the
/// centroid of all content-unit lemmas, per space (space-major).
pub fn global_coherence<S: AsRef<str>>(
    utterances: &[Vec<S>],
    lex: &ContentUnitLexicon,
    spaces: &[EmbeddingSpace],
) -> Vec<Option<f64>> {
    let lemmas = lex.all_lemmas();
    let mut out = Vec::with_capacity(3 * spaces.len());
    for space in spaces {
        let centroid = space.mean_vector(&lemmas);
        let dists: Vec<f64> = match &centroid {
            Some(c) => utterances
                .iter()
                .filter_map(|u| space.mean_vector(u))
                .filter_map(|v| crate::util::cosine(&v, c).map(|s| 1.0 - s))
                .collect(),
            None => Vec::new(),
        };
        match distance_stats(&dists) {
            Some((avg, min, max)) => out.extend([Some(avg), Some(min), Some(max)]),
            None => out.extend([None, None, None]),
        }
    }
    out
}
