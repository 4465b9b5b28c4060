use serde::{Deserialize, Serialize};

use super::registry::{needs_audio, FeatureRegistry, BLOCKS};
use crate::acoustics::{acoustic_features, AudioSignal, SpeechCounts};
use crate::chat::{participant_segments, participant_utterances, Timing, Transcript};
use crate::config::ExtractionConfig;
use crate::error::{Error, Result};
use crate::lexical::{category_and_ratio_features, norm_features, richness_features, CategoryInput, TaggedWord};
use crate::resources::Resources;
use crate::semantics::{coherence_features, content_unit_frequencies, global_coherence};
use crate::speechgraph::{build_graph, graph_features, WordGraph};
use crate::treebank::{is_punct_tag, syntax_features, ParseTree, SyntaxFeatures};

/// Everything known about one speech sample.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub transcript: &'a Transcript,
    /// One entry per participant utterance; `None` where no parse exists.
    pub trees: Option<&'a [Option<ParseTree>]>,
    pub audio: Option<&'a AudioSignal>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AudioScope {
    /// Only participant time-coded segments were analysed.
    Participant,
    /// The whole recording was analysed.
    Full,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub id: String,
    pub masked: usize,
    /// Blocks with at least one masked value.
    pub masked_blocks: Vec<String>,
    pub notes: Vec<String>,
    pub audio_scope: AudioScope,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub id: String,
    pub values: Vec<Option<f64>>,
    pub provenance: Provenance,
}

impl FeatureVector {
    pub fn masked(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }
}

/// Builds the vector block by block and checks each block's length.
struct Assembler {
    values: Vec<Option<f64>>,
    next: usize,
}

impl Assembler {
    fn push(&mut self, name: &str, values: impl IntoIterator<Item = Option<f64>>) {
        let b = &BLOCKS[self.next];
        assert_eq!(b.name, name, "blocks assembled out of order");
        let before = self.values.len();
        self.values.extend(values);
        assert_eq!(self.values.len() - before, b.len, "block {name} has the wrong size");
        self.next += 1;
    }

    fn mask(&mut self, name: &str) {
        let len = BLOCKS[self.next].len;
        self.push(name, std::iter::repeat(None).take(len));
    }
}

fn graph_for(utterances: &[Vec<&str>], across: bool) -> WordGraph {
    if across {
        let all: Vec<&str> = utterances.iter().flatten().copied().collect();
        return build_graph(&all);
    }
    let mut g = build_graph::<&str>(&[]);
    for u in utterances {
        let part = build_graph(u);
        let ids: Vec<usize> = part
            .nodes
            .iter()
            .map(|n| match g.nodes.iter().position(|m| m == n) {
                Some(i) => i,
                None => {
                    g.nodes.push(n.clone());
                    g.nodes.len() - 1
                }
            })
            .collect();
        for (&(a, b), &m) in &part.edges {
            *g.edges.entry((ids[a], ids[b])).or_insert(0) += m;
        }
    }
    g
}

/// Compute every registry feature for one sample. Features whose inputs
/// are absent come back masked, and the provenance lists which blocks.
pub fn extract_all(
    sample: Sample<'_>,
    resources: &Resources,
    registry: &FeatureRegistry,
    cfg: &ExtractionConfig,
) -> Result<FeatureVector> {
    let t = sample.transcript;
    let utts = participant_utterances(t, &cfg.participant);
    if let Some(trees) = sample.trees {
        if trees.len() != utts.len() {
            return Err(Error::data(format!(
                "{}: {} trees for {} participant utterances",
                t.id,
                trees.len(),
                utts.len()
            )));
        }
    }
    let mut notes = Vec::new();

    let words_per_utt: Vec<Vec<&str>> =
        utts.iter().map(|u| u.words().map(|w| w.normalized.as_str()).collect()).collect();
    let words: Vec<&str> = words_per_utt.iter().flatten().copied().collect();
    let nonwords = utts
        .iter()
        .flat_map(|u| &u.tokens)
        .filter(|k| k.is_nonword && !k.is_filler && !k.is_terminator)
        .count();
    let fillers = utts.iter().flat_map(|u| u.fillers()).count();
    let has_text = !words.is_empty();
    if !has_text {
        notes.push("no participant words: text features masked".to_string());
    }

    let parsed: Vec<&ParseTree> = sample.trees.map(|ts| ts.iter().flatten().collect()).unwrap_or_default();
    if has_text && parsed.is_empty() {
        notes.push("no parse trees: syntax features masked".to_string());
    }

    // tagged words: tree preterminals where a parse exists, else untagged tokens
    let mut tagged_owned: Vec<(String, Option<String>)> = Vec::new();
    for (i, u) in words_per_utt.iter().enumerate() {
        match sample.trees.and_then(|ts| ts[i].as_ref()) {
            Some(tree) => tagged_owned.extend(
                tree.unwrap_root()
                    .tagged_words()
                    .into_iter()
                    .filter(|(tag, _)| !is_punct_tag(tag))
                    .map(|(tag, w)| (w.to_lowercase(), Some(tag.to_string()))),
            ),
            None => tagged_owned.extend(u.iter().map(|w| (w.to_string(), None))),
        }
    }
    let tagged: Vec<TaggedWord<'_>> =
        tagged_owned.iter().map(|(w, tag)| TaggedWord::new(w, tag.as_deref())).collect();

    let (audio, audio_scope) = match sample.audio {
        None => {
            notes.push("no audio: acoustic and rate features masked".to_string());
            (None, AudioScope::None)
        }
        Some(sig) => match participant_segments(t, &cfg.participant) {
            Timing::Segments(spans) if cfg.restrict_audio_to_participant => {
                let cut = sig.restrict(&spans);
                if cut.samples.is_empty() {
                    notes.push("participant segments fall outside the audio: using the full recording".to_string());
                    (Some(sig.clone()), AudioScope::Full)
                } else {
                    (Some(cut), AudioScope::Participant)
                }
            }
            _ => (Some(sig.clone()), AudioScope::Full),
        },
    };

    let syntax: Option<SyntaxFeatures> = if has_text && !parsed.is_empty() {
        match syntax_features(&parsed, &resources.productions) {
            Ok(f) => Some(f),
            Err(Error::Degenerate(m)) => {
                notes.push(format!("syntax features masked: {m}"));
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let mut a = Assembler {
        values: Vec::with_capacity(registry.len()),
        next: 0,
    };

    let text = |a: &mut Assembler, name: &str, vals: Vec<Option<f64>>| {
        if has_text {
            a.push(name, vals)
        } else {
            a.mask(name)
        }
    };

    let norms = norm_features(&tagged, &resources.norms);
    let richness = if has_text {
        richness_features(&words, cfg.mattr_window)?.to_vec()
    } else {
        Vec::new()
    };
    let categories = category_and_ratio_features(
        CategoryInput {
            words: &words,
            nonwords,
            tagged: (!parsed.is_empty()).then_some(tagged.as_slice()),
            audio_seconds: audio.as_ref().map(AudioSignal::duration_seconds),
        },
        &resources.lists,
    );
    let coherence = coherence_features(&words_per_utt, &resources.spaces, resources.primary_space);
    let graph = graph_features(&graph_for(&words_per_utt, cfg.graph_across_utterances));

    match &syntax {
        Some(s) => {
            a.push("complexity", s.complexity.clone());
            a.push("productions", s.productions.clone());
            a.push("phrasal", s.phrasal.clone());
        }
        None => {
            a.mask("complexity");
            a.mask("productions");
            a.mask("phrasal");
        }
    }
    text(&mut a, "lexical_norms", norms.lexical.clone());
    text(&mut a, "richness", richness);
    text(&mut a, "word_category", categories.word_category.to_vec());
    text(&mut a, "noun_ratio", categories.noun_ratios.to_vec());
    text(&mut a, "word_length", vec![categories.word_length]);
    match &syntax {
        Some(s) => {
            a.push("universal_pos", s.universal.clone());
            a.push("pos", s.pos.clone());
        }
        None => {
            a.mask("universal_pos");
            a.mask("pos");
        }
    }
    text(&mut a, "local_coherence", coherence.local.clone());
    text(&mut a, "utterance_distance", coherence.pairwise.to_vec());
    text(&mut a, "speech_graph", graph.to_vec());
    match &syntax {
        Some(s) => a.push("cohesion", [s.cohesion]),
        None => a.mask("cohesion"),
    }
    text(&mut a, "rate", categories.rate.to_vec());
    text(&mut a, "invalid_words", vec![categories.invalid_words]);
    text(&mut a, "sentiment", norms.sentiment.clone());

    match &audio {
        Some(sig) => {
            let ac = acoustic_features(sig, SpeechCounts { words: words.len(), fillers }, &cfg.acoustic);
            a.push("pause", ac.pause);
            a.push("f0", ac.f0);
            a.push("duration", ac.duration);
            a.push("zcr", ac.zcr);
            a.push("mfcc", ac.mfcc);
        }
        None => {
            for b in BLOCKS.iter().filter(|b| needs_audio(b) && b.name != "rate") {
                a.mask(b.name);
            }
        }
    }

    text(&mut a, "content_unit_frequency", content_unit_frequencies(&words, &resources.content_units).to_vec());
    text(
        &mut a,
        "global_coherence",
        global_coherence(&words_per_utt, &resources.content_units, &resources.spaces),
    );

    assert_eq!(a.values.len(), registry.len());
    let values = a.values;
    let mut masked_blocks = Vec::new();
    let mut start = 0;
    for b in &BLOCKS {
        if values[start..start + b.len].iter().any(Option::is_none) {
            masked_blocks.push(b.name.to_string());
        }
        start += b.len;
    }
    let masked = values.iter().filter(|v| v.is_none()).count();
    Ok(FeatureVector {
        id: t.id.clone(),
        provenance: Provenance {
            id: t.id.clone(),
            masked,
            masked_blocks,
            notes,
            audio_scope,
        },
        values,
    })
}
