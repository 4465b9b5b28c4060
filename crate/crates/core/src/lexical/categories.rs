use super::norms::TaggedWord;
use super::resources::WordLists;
use super::tags::{is_inflected_verb, is_noun, is_pronoun, is_proposition, is_verb};
use crate::util::ratio;

pub const WORD_CATEGORY_NAMES: [&str; 5] = [
    "prop_demonstratives",
    "prop_function_words",
    "prop_light_verbs",
    "prop_inflected_verbs",
    "prop_propositions",
];
pub const NOUN_RATIO_NAMES: [&str; 3] = ["nouns_to_nouns_verbs", "nouns_to_verbs", "pronouns_to_nouns_pronouns"];
pub const WORD_LENGTH_NAME: &str = "avg_word_length";
pub const INVALID_WORDS_NAME: &str = "prop_invalid_words";
pub const RATE_NAMES: [&str; 2] = ["words_per_second", "syllables_per_second"];

#[derive(Debug, Clone, PartialEq)]
pub struct CategoryFeatures {
    pub word_category: [Option<f64>; 5],
    pub noun_ratios: [Option<f64>; 3],
    pub word_length: Option<f64>,
    pub invalid_words: Option<f64>,
    pub rate: [Option<f64>; 2],
}

impl CategoryFeatures {
    /// The twelve values: categories, noun ratios, word length, invalid
    /// words, rate.
    pub fn to_vec(&self) -> Vec<Option<f64>> {
        let mut v = Vec::with_capacity(12);
        v.extend_from_slice(&self.word_category);
        v.extend_from_slice(&self.noun_ratios);
        v.push(self.word_length);
        v.push(self.invalid_words);
        v.extend_from_slice(&self.rate);
        v
    }
}

/// Vowel-group count, at least one for any word with a letter.
pub fn syllables(word: &str) -> usize {
    let mut groups = 0;
    let mut prev_vowel = false;
    let mut letters = false;
    for c in word.chars() {
        let c = c.to_ascii_lowercase();
        letters |= c.is_alphabetic();
        let v = matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
        if v && !prev_vowel {
            groups += 1;
        }
        prev_vowel = v;
    }
    if letters {
        groups.max(1)
    } else {
        0
    }
}

fn letters(word: &str) -> usize {
    word.chars().filter(|c| c.is_alphabetic()).count()
}

/// Inputs for the category and ratio block.
///
/// `words` are the participant's lexical words; `nonwords` counts
/// unintelligible tokens, which are always invalid. `tagged` carries the
/// tree preterminals when parses exist, and `audio_seconds` the duration
/// the rate features divide by.
#[derive(Debug, Clone, Copy)]
pub struct CategoryInput<'a> {
    pub words: &'a [&'a str],
    pub nonwords: usize,
    pub tagged: Option<&'a [TaggedWord<'a>]>,
    pub audio_seconds: Option<f64>,
}

pub fn category_and_ratio_features(input: CategoryInput<'_>, lists: &WordLists) -> CategoryFeatures {
    let words = input.words;
    let n = words.len() as f64;
    let count = |set: &super::WordSet| words.iter().filter(|w| set.contains(w)).count() as f64;

    let (inflected, propositions, noun_ratios) = match input.tagged {
        Some(tagged) => {
            let tags: Vec<&str> = tagged.iter().filter_map(|t| t.tag).collect();
            let nt = tags.len() as f64;
            let k = |f: fn(&str) -> bool| tags.iter().filter(|t| f(t)).count() as f64;
            let (nouns, verbs, pronouns) = (k(is_noun), k(is_verb), k(is_pronoun));
            (
                ratio(k(is_inflected_verb), nt),
                ratio(k(is_proposition), nt),
                [
                    ratio(nouns, nouns + verbs),
                    ratio(nouns, verbs),
                    ratio(pronouns, nouns + pronouns),
                ],
            )
        }
        None => (None, None, [None; 3]),
    };

    let invalid = words.iter().filter(|w| !lists.is_valid_word(w)).count() + input.nonwords;
    let seconds = input.audio_seconds.filter(|s| *s > 0.0);
    let syl: usize = words.iter().map(|w| syllables(w)).sum();

    CategoryFeatures {
        word_category: [
            ratio(count(&lists.demonstratives), n),
            ratio(count(&lists.function_words), n),
            ratio(count(&lists.light_verbs), n),
            inflected,
            propositions,
        ],
        noun_ratios,
        word_length: ratio(words.iter().map(|w| letters(w)).sum::<usize>() as f64, n),
        invalid_words: ratio(invalid as f64, n + input.nonwords as f64),
        rate: [
            seconds.map(|s| n / s),
            seconds.map(|s| syl as f64 / s),
        ],
    }
}
