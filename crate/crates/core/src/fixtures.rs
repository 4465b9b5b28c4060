//! Deterministic synthetic inputs: a small picture-description corpus
//! (CHAT, parse trees, WAV audio, embeddings, labels, config) and
//! feature matrices with known structure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use sha2::{Digest, Sha256};

use crate::acoustics::{write_wav, AudioSignal};
use crate::chat::Label;
use crate::error::Result;
use crate::featureset::{Dataset, FeatureRegistry};
use crate::semantics::{ContentUnitLexicon, DEFAULT_SPACES};
use crate::treebank::{ParseTree, ProductionRegistry};

pub const FIXTURE_SAMPLE_RATE: u32 = 16_000;
pub const CONFIG_FILE: &str = "cogspeech.toml";
pub const LABELS_FILE: &str = "labels.csv";

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn pt(tag: &str, word: &str) -> ParseTree {
    ParseTree::preterminal(tag, word)
}

fn node(label: &str, children: Vec<ParseTree>) -> ParseTree {
    ParseTree::node(label, children)
}

/// A sentence as its words plus a parse (without the final period).
struct Clause {
    words: Vec<String>,
    tree: ParseTree,
}

fn words_of(tree: &ParseTree) -> Vec<String> {
    tree.tagged_words().into_iter().map(|(_, w)| w.to_string()).collect()
}

fn clause(tree: ParseTree) -> Clause {
    Clause {
        words: words_of(&tree),
        tree,
    }
}

const PEOPLE: [&str; 5] = ["boy", "girl", "mother", "woman", "lady"];
const PRONOUNS: [&str; 3] = ["she", "he", "it"];
const OBJECT_PRONOUNS: [(&str, &str); 2] = [("it", "NN"), ("them", "NNS")];
const TRANSITIVE: [(&str, &[(&str, &str)]); 4] = [
    ("taking", &[("cookie", "NN"), ("jar", "NN"), ("cookies", "NNS")]),
    ("reaching", &[("cookie", "NN"), ("jar", "NN")]),
    ("washing", &[("dishes", "NNS"), ("plate", "NN"), ("dish", "NN")]),
    ("drying", &[("plate", "NN"), ("dishes", "NNS")]),
];
const INTRANSITIVE: [(&str, &[&str]); 3] = [
    ("falling", &["boy", "stool"]),
    ("overflowing", &["water", "sink"]),
    ("standing", &["mother", "boy", "girl"]),
];
const PLACES: [&str; 5] = ["kitchen", "floor", "window", "sink", "counter"];
const THINGS: [&str; 6] = ["window", "curtain", "cupboard", "plate", "stool", "jar"];

struct Style {
    pronoun_p: f64,
    filler_p: f64,
    retrace_p: f64,
    unintelligible_p: f64,
    extra_pause_p: f64,
    utterances: (usize, usize),
    word_s: f64,
    /// Share of each picture word list one sample draws from.
    scene_fraction: f64,
    /// Chance of repeating the previous sentence.
    repeat_p: f64,
}

const CONTROL: Style = Style {
    pronoun_p: 0.3,
    filler_p: 0.1,
    retrace_p: 0.05,
    unintelligible_p: 0.0,
    extra_pause_p: 0.1,
    utterances: (10, 14),
    word_s: 0.26,
    scene_fraction: 0.4,
    repeat_p: 0.0,
};

const IMPAIRED: Style = Style {
    pronoun_p: 0.7,
    filler_p: 0.5,
    retrace_p: 0.3,
    unintelligible_p: 0.2,
    extra_pause_p: 0.5,
    utterances: (6, 9),
    word_s: 0.36,
    scene_fraction: 0.25,
    repeat_p: 0.08,
};

/// The part of the picture one speaker talks about: a non-empty random
/// subset of every word list.
struct Scene {
    people: Vec<&'static str>,
    transitive: Vec<(&'static str, &'static [(&'static str, &'static str)])>,
    intransitive: Vec<(&'static str, &'static [&'static str])>,
    places: Vec<&'static str>,
    things: Vec<&'static str>,
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, items: &[T], fraction: f64) -> Vec<T> {
    let k = ((items.len() as f64 * fraction).round() as usize).clamp(1, items.len());
    items.choose_multiple(rng, k).copied().collect()
}

impl Scene {
    fn draw(rng: &mut ChaCha8Rng, style: &Style) -> Scene {
        let f = style.scene_fraction;
        Scene {
            people: pick(rng, &PEOPLE, f),
            transitive: pick(rng, &TRANSITIVE, f),
            intransitive: pick(rng, &INTRANSITIVE, f),
            places: pick(rng, &PLACES, f),
            things: pick(rng, &THINGS, f),
        }
    }
}

fn pronoun(rng: &mut ChaCha8Rng, choices: &[&str]) -> ParseTree {
    node("NP", vec![pt("PRP", choices.choose(rng).expect("nonempty"))])
}

fn subject(rng: &mut ChaCha8Rng, style: &Style, scene: &Scene) -> ParseTree {
    if rng.gen_bool(style.pronoun_p) {
        pronoun(rng, &PRONOUNS)
    } else {
        node("NP", vec![pt("DT", "the"), pt("NN", scene.people.choose(rng).expect("nonempty"))])
    }
}

fn det_np(det: &str, noun: &str, tag: &str) -> ParseTree {
    node("NP", vec![pt("DT", det), pt(tag, noun)])
}

fn simple_clause(rng: &mut ChaCha8Rng, style: &Style, scene: &Scene) -> Clause {
    match rng.gen_range(0..6) {
        0 | 1 => {
            let (verb, objects) = *scene.transitive.choose(rng).expect("nonempty");
            let (obj, tag) = objects.choose(rng).expect("nonempty");
            let det = if *tag == "NNS" { "the" } else { "a" };
            let object = if rng.gen_bool(style.pronoun_p / 2.0) {
                let (p, _) = OBJECT_PRONOUNS.iter().find(|(_, t)| t == tag).expect("tag has a pronoun");
                pronoun(rng, &[p])
            } else {
                det_np(det, obj, tag)
            };
            clause(node(
                "S",
                vec![
                    subject(rng, style, scene),
                    node("VP", vec![pt("VBZ", "is"), node("VP", vec![pt("VBG", verb), object])]),
                ],
            ))
        }
        2 => {
            let (verb, subjects) = *scene.intransitive.choose(rng).expect("nonempty");
            let subj = if rng.gen_bool(style.pronoun_p) {
                pronoun(rng, &PRONOUNS)
            } else {
                det_np("the", subjects.choose(rng).expect("nonempty"), "NN")
            };
            clause(node(
                "S",
                vec![subj, node("VP", vec![pt("VBZ", "is"), node("VP", vec![pt("VBG", verb)])])],
            ))
        }
        3 => {
            let thing = scene.things.choose(rng).expect("nonempty");
            let place = scene.places.choose(rng).expect("nonempty");
            clause(node(
                "S",
                vec![
                    node("NP", vec![pt("EX", "there")]),
                    node(
                        "VP",
                        vec![
                            pt("VBZ", "is"),
                            node(
                                "NP",
                                vec![
                                    det_np("a", thing, "NN"),
                                    node("PP", vec![pt("IN", "in"), det_np("the", place, "NN")]),
                                ],
                            ),
                        ],
                    ),
                ],
            ))
        }
        4 => clause(node(
            "S",
            vec![
                subject(rng, style, scene),
                node("VP", vec![pt("VBZ", "wants"), det_np("a", "cookie", "NN")]),
            ],
        )),
        _ => clause(node(
            "S",
            vec![
                det_np("the", "water", "NN"),
                node("VP", vec![pt("VBZ", "is"), node("PP", vec![pt("IN", "on"), det_np("the", "floor", "NN")])]),
            ],
        )),
    }
}

fn sentence(rng: &mut ChaCha8Rng, style: &Style, scene: &Scene) -> Clause {
    let body = match rng.gen_range(0..5) {
        0 => {
            let (a, b) = (simple_clause(rng, style, scene), simple_clause(rng, style, scene));
            clause(node("S", vec![a.tree, pt("CC", "and"), b.tree]))
        }
        1 => {
            let inner = simple_clause(rng, style, scene);
            clause(node(
                "S",
                vec![
                    node("NP", vec![pt("PRP", "i")]),
                    node("VP", vec![pt("VBP", "see"), node("SBAR", vec![pt("IN", "that"), inner.tree])]),
                ],
            ))
        }
        _ => simple_clause(rng, style, scene),
    };
    let mut children = body.tree.children;
    children.push(pt(".", "."));
    clause(node("S", children))
}

/// Every word the grammar can emit.
pub fn fixture_vocabulary() -> Vec<String> {
    let mut v: Vec<&str> = vec![
        "the", "a", "is", "wants", "cookie", "there", "in", "on", "water", "floor", "and", "i", "see", "that",
    ];
    v.extend(PEOPLE);
    v.extend(PRONOUNS);
    v.extend(OBJECT_PRONOUNS.iter().map(|p| p.0));
    v.extend(PLACES);
    v.extend(THINGS);
    for (verb, objs) in TRANSITIVE {
        v.push(verb);
        v.extend(objs.iter().map(|o| o.0));
    }
    for (verb, subjects) in INTRANSITIVE {
        v.push(verb);
        v.extend(subjects.iter().copied());
    }
    let mut out: Vec<String> = v.into_iter().map(str::to_string).collect();
    out.sort();
    out.dedup();
    out
}

/// One generated sample, before it is written to disk.
pub struct SyntheticSample {
    pub id: String,
    pub label: Label,
    pub mmse: u8,
    pub chat: String,
    pub trees: String,
    pub audio: AudioSignal,
}

struct AudioBuilder {
    samples: Vec<f64>,
    noise: Normal<f64>,
    f0: f64,
}

impl AudioBuilder {
    fn now_ms(&self) -> u64 {
        (self.samples.len() as u64 * 1000) / FIXTURE_SAMPLE_RATE as u64
    }

    fn silence(&mut self, seconds: f64, rng: &mut ChaCha8Rng) {
        let n = (seconds * FIXTURE_SAMPLE_RATE as f64) as usize;
        for _ in 0..n {
            self.samples.push(self.noise.sample(rng));
        }
    }

    /// A voiced stretch: five decaying harmonics with 10 ms ramps.
    fn voiced(&mut self, seconds: f64, rng: &mut ChaCha8Rng) {
        let rate = FIXTURE_SAMPLE_RATE as f64;
        let n = (seconds * rate) as usize;
        let ramp = (0.01 * rate) as usize;
        let f0 = self.f0 * rng.gen_range(0.95..1.05);
        for i in 0..n {
            let t = i as f64 / rate;
            let env = (i.min(n - 1 - i) as f64 / ramp as f64).min(1.0);
            let s: f64 = (1..=5)
                .map(|h| (2.0 * std::f64::consts::PI * f0 * h as f64 * t).sin() / h as f64)
                .sum();
            self.samples.push(0.3 * env * s + self.noise.sample(rng));
        }
    }
}

/// Generate one sample. Impaired samples use more pronouns, fillers,
/// retracings and pauses, fewer utterances and slower speech.
pub fn synthetic_sample(index: usize, label: Label, seed: u64) -> SyntheticSample {
    let mut rng = rng_for(seed, index as u64);
    let style = if label == Label::Ad { &IMPAIRED } else { &CONTROL };
    let id = format!("S{:03}", index + 1);
    let mmse = match label {
        Label::Ad => rng.gen_range(12..=24),
        Label::NonAd => rng.gen_range(26..=30),
    };
    let mut audio = AudioBuilder {
        samples: Vec::new(),
        noise: Normal::new(0.0, 1e-4).expect("valid normal"),
        f0: rng.gen_range(110.0..210.0),
    };
    let mut chat = String::new();
    writeln!(chat, "@UTF8\n@Begin\n@Languages:\teng\n@Participants:\tPAR Participant, INV Investigator").unwrap();
    writeln!(chat, "@Media:\t{id}, audio").unwrap();
    audio.silence(0.3, &mut rng);
    let inv_start = audio.now_ms();
    audio.voiced(1.0, &mut rng);
    let inv_end = audio.now_ms();
    writeln!(chat, "*INV:\ttell me everything you see going on in this picture . \u{15}{inv_start}_{inv_end}\u{15}").unwrap();
    audio.silence(0.5, &mut rng);

    let mut trees = String::new();
    let scene = Scene::draw(&mut rng, style);
    let n_utts = rng.gen_range(style.utterances.0..=style.utterances.1);
    let mut previous: Option<Clause> = None;
    for u in 0..n_utts {
        let s = match previous.take() {
            Some(p) if rng.gen_bool(style.repeat_p) => p,
            _ => sentence(&mut rng, style, &scene),
        };
        let mut tokens: Vec<String> = Vec::new();
        let words: Vec<&String> = s.words.iter().filter(|w| *w != ".").collect();
        for (k, w) in words.iter().enumerate() {
            if k == 0 && rng.gen_bool(style.retrace_p) {
                tokens.push(format!("<{w}> [/]"));
            }
            if rng.gen_bool(style.filler_p / words.len() as f64 * 2.0) {
                tokens.push(if rng.gen_bool(0.5) { "&uh" } else { "&um" }.to_string());
            }
            tokens.push(w.to_string());
        }
        if rng.gen_bool(style.unintelligible_p) {
            tokens.push("xxx".to_string());
        }
        let start = audio.now_ms();
        // every first utterance carries one long internal pause
        let pause_at = if u == 0 || rng.gen_bool(style.extra_pause_p) {
            Some(rng.gen_range(1..tokens.len().max(2)))
        } else {
            None
        };
        for k in 0..tokens.len() {
            if Some(k) == pause_at {
                let d = rng.gen_range(0.5..0.9);
                audio.silence(d, &mut rng);
            }
            audio.voiced(style.word_s * rng.gen_range(0.8..1.2), &mut rng);
            audio.silence(0.05, &mut rng);
        }
        let end = audio.now_ms();
        writeln!(chat, "*PAR:\t{} . \u{15}{start}_{end}\u{15}", tokens.join(" ")).unwrap();
        writeln!(trees, "{}", node("ROOT", vec![s.tree.clone()])).unwrap();
        previous = Some(s);
        audio.silence(rng.gen_range(0.4..1.2), &mut rng);
    }
    writeln!(chat, "@End").unwrap();
    SyntheticSample {
        id,
        label,
        mmse,
        chat,
        trees,
        audio: AudioSignal::new(audio.samples, FIXTURE_SAMPLE_RATE).expect("valid signal"),
    }
}

/// Grammar words whose vectors are shrunk so that utterance means are
/// dominated by content words.
const FUNCTION_WORDS: [&str; 14] =
    ["the", "a", "is", "in", "on", "and", "there", "that", "i", "see", "she", "he", "it", "them"];

/// Stable pseudo-random vector for a word in a named space.
pub fn word_vector(space: &str, word: &str, dim: usize) -> Vec<f64> {
    let digest = Sha256::digest(format!("{space}\u{0}{word}").as_bytes());
    let seed = u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sd = if FUNCTION_WORDS.contains(&word) { 0.05 } else { 1.0 };
    let normal = Normal::new(0.0, sd).expect("valid normal");
    (0..dim).map(|_| normal.sample(&mut rng)).collect()
}

/// Embedding file text for `words` in word2vec text format with header.
pub fn embedding_text(space: &str, dim: usize, words: &[String]) -> String {
    let mut out = format!("{} {dim}\n", words.len());
    for w in words {
        out.push_str(w);
        for v in word_vector(space, w, dim) {
            write!(out, " {v:.6}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Words that need vectors: the grammar vocabulary plus every content
/// unit lemma.
pub fn embedding_vocabulary() -> Vec<String> {
    let mut words = fixture_vocabulary();
    words.extend(ContentUnitLexicon::builtin().all_lemmas().into_iter().map(str::to_string));
    words.sort();
    words.dedup();
    words
}

pub struct GeneratedCorpus {
    pub dir: PathBuf,
    pub ids: Vec<String>,
    pub config: PathBuf,
}

/// Write `n` samples (alternating non-AD and AD), `labels.csv`, five
/// embedding spaces under `embeddings/`, and a config whose resource root
/// is the corpus directory.
pub fn generate_corpus(dir: &Path, n: usize, seed: u64) -> Result<GeneratedCorpus> {
    std::fs::create_dir_all(dir.join("embeddings"))?;
    let mut labels = String::from("id,label,mmse\n");
    let mut ids = Vec::with_capacity(n);
    for i in 0..n {
        let label = if i % 2 == 0 { Label::NonAd } else { Label::Ad };
        let s = synthetic_sample(i, label, seed);
        std::fs::write(dir.join(format!("{}.cha", s.id)), &s.chat)?;
        std::fs::write(dir.join(format!("{}.trees", s.id)), &s.trees)?;
        write_wav(&dir.join(format!("{}.wav", s.id)), &s.audio)?;
        writeln!(labels, "{},{},{}", s.id, s.label.as_binary(), s.mmse).unwrap();
        ids.push(s.id);
    }
    std::fs::write(dir.join(LABELS_FILE), labels)?;
    let vocab = embedding_vocabulary();
    for (name, dim) in DEFAULT_SPACES {
        std::fs::write(dir.join(format!("embeddings/{name}.txt")), embedding_text(name, dim, &vocab))?;
    }
    let config = dir.join(CONFIG_FILE);
    std::fs::write(
        &config,
        "# Synthetic fixture corpus configuration.\n[resources]\nroot = \".\"\n\n[eval]\ntsne_perplexity = 3.0\n",
    )?;
    Ok(GeneratedCorpus {
        dir: dir.to_path_buf(),
        ids,
        config,
    })
}

/// The 509-feature registry over the default embedding spaces.
pub fn default_registry() -> FeatureRegistry {
    let spaces: Vec<String> = DEFAULT_SPACES.iter().map(|(n, _)| n.to_string()).collect();
    FeatureRegistry::new(&ProductionRegistry::builtin(), &spaces).expect("default registry is valid")
}

fn balanced_labels(n: usize) -> Vec<u8> {
    (0..n).map(|i| (i % 2) as u8).collect()
}

fn mmse_for(label: u8, rng: &mut ChaCha8Rng) -> f64 {
    if label == 1 {
        rng.gen_range(12..=24) as f64
    } else {
        rng.gen_range(25..=30) as f64
    }
}

/// A balanced dataset over the default registry in which `informative`
/// randomly placed columns are shifted by `+-shift/2` with the class and
/// every other column is standard normal noise. Returns the dataset and
/// the informative column indices (sorted).
pub fn informative_matrix(n: usize, informative: usize, shift: f64, seed: u64) -> (Dataset, Vec<usize>) {
    let registry = default_registry();
    let d = registry.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<usize> = rand::seq::index::sample(&mut rng, d, informative).into_vec();
    cols.sort_unstable();
    let mut is_inf = vec![false; d];
    cols.iter().for_each(|&c| is_inf[c] = true);
    let normal = Normal::new(0.0, 1.0).expect("valid normal");
    let mut data = Dataset::for_registry(&registry);
    for (i, y) in balanced_labels(n).into_iter().enumerate() {
        let sign = if y == 1 { 0.5 } else { -0.5 };
        let row = (0..d)
            .map(|j| Some(normal.sample(&mut rng) + if is_inf[j] { sign * shift } else { 0.0 }))
            .collect();
        let m = mmse_for(y, &mut rng);
        data.push(format!("M{i:03}"), row, Label::from_binary(y), Some(m)).expect("valid row");
    }
    (data, cols)
}

/// Two Gaussian blobs in `d` dimensions whose centres are `separation`
/// apart along every axis; labels alternate.
pub fn blobs(n: usize, d: usize, separation: f64, seed: u64) -> (Vec<Vec<f64>>, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("valid normal");
    let y = balanced_labels(n);
    let x = y
        .iter()
        .map(|&c| (0..d).map(|_| normal.sample(&mut rng) + c as f64 * separation).collect())
        .collect();
    (x, y)
}
