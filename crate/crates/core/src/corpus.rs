//! Corpus directories: `{id}.cha` with optional `{id}.trees` and
//! `{id}.wav`, plus an optional `labels.csv` (`id,label,mmse`).

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acoustics::read_wav;
use crate::chat::{parse_chat, participant_utterances, Label};
use crate::config::ExtractionConfig;
use crate::error::{Error, Result};
use crate::featureset::{extract_all, write_atomic, Dataset, FeatureRegistry, Provenance, Sample};
use crate::resources::Resources;
use crate::treebank::parse_trees_file;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub id: String,
    pub chat: PathBuf,
    pub trees: Option<PathBuf>,
    pub wav: Option<PathBuf>,
}

/// Entries sorted by id. An error when the directory has no `.cha` file.
pub fn scan_corpus(dir: &Path) -> Result<Vec<CorpusEntry>> {
    let listing = std::fs::read_dir(dir).map_err(|e| Error::resource(dir, e.to_string()))?;
    let mut entries = Vec::new();
    for item in listing {
        let path = item?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("cha") {
            continue;
        }
        let Some(id) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        let sibling = |ext: &str| Some(path.with_extension(ext)).filter(|p| p.is_file());
        entries.push(CorpusEntry {
            id: id.to_string(),
            trees: sibling("trees"),
            wav: sibling("wav"),
            chat: path.clone(),
        });
    }
    if entries.is_empty() {
        return Err(Error::data(format!("{} contains no .cha transcripts", dir.display())));
    }
    entries.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LabelRow {
    pub label: Option<Label>,
    pub mmse: Option<u8>,
}

/// Read `id,label,mmse`; empty cells mean unknown.
pub fn read_labels<R: Read>(input: R) -> Result<HashMap<String, LabelRow>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.first().map(String::as_str) != Some("id") || header.len() < 2 {
        return Err(Error::data("labels file must start with an id column followed by label[,mmse]"));
    }
    let mut out = HashMap::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let ctx = |m: String| Error::data(format!("labels row {}: {m}", i + 1));
        let label = match rec.get(1).filter(|s| !s.is_empty()) {
            Some(s) => Some(s.parse::<Label>().map_err(|e| ctx(e.to_string()))?),
            None => None,
        };
        let mmse = match rec.get(2).filter(|s| !s.is_empty()) {
            Some(s) => {
                let v: u8 = s.parse().map_err(|_| ctx(format!("MMSE {s:?} is not an integer")))?;
                if v > 30 {
                    return Err(ctx(format!("MMSE {v} outside [0, 30]")));
                }
                Some(v)
            }
            None => None,
        };
        if out.insert(rec[0].to_string(), LabelRow { label, mmse }).is_some() {
            return Err(ctx(format!("duplicate id {:?}", &rec[0])));
        }
    }
    Ok(out)
}

/// Participant words of one transcript, as exported for text models.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptText {
    pub id: String,
    pub text: String,
    pub label: Option<u8>,
}

pub struct CorpusExtraction {
    pub dataset: Dataset,
    pub provenance: Vec<Provenance>,
    pub texts: Vec<TranscriptText>,
}

fn extract_one(
    entry: &CorpusEntry,
    labels: &HashMap<String, LabelRow>,
    resources: &Resources,
    registry: &FeatureRegistry,
    cfg: &ExtractionConfig,
) -> Result<(Vec<Option<f64>>, Provenance, TranscriptText, LabelRow)> {
    let with_file = |p: &Path, e: Error| Error::data(format!("{}: {e}", p.display()));
    let text = std::fs::read_to_string(&entry.chat).map_err(|e| Error::resource(&entry.chat, e.to_string()))?;
    let mut transcript = parse_chat(&text).map_err(|e| with_file(&entry.chat, e))?.with_id(&entry.id);
    let row = labels.get(&entry.id).copied().unwrap_or_default();
    transcript.label = row.label;
    transcript.set_mmse(row.mmse)?;
    let n_utts = participant_utterances(&transcript, &cfg.participant).len();
    let trees = match &entry.trees {
        Some(p) => {
            let t = std::fs::read_to_string(p).map_err(|e| Error::resource(p, e.to_string()))?;
            Some(parse_trees_file(&t, n_utts).map_err(|e| with_file(p, e))?)
        }
        None => None,
    };
    let audio = match &entry.wav {
        Some(p) => Some(read_wav(p).map_err(|e| with_file(p, e))?),
        None => None,
    };
    let fv = extract_all(
        Sample {
            transcript: &transcript,
            trees: trees.as_deref(),
            audio: audio.as_ref(),
        },
        resources,
        registry,
        cfg,
    )?;
    let words: Vec<&str> = participant_utterances(&transcript, &cfg.participant)
        .iter()
        .flat_map(|u| u.words().map(|w| w.normalized.as_str()))
        .collect();
    let text = TranscriptText {
        id: entry.id.clone(),
        text: words.join(" "),
        label: row.label.map(Label::as_binary),
    };
    Ok((fv.values, fv.provenance, text, row))
}

/// Extract every transcript in parallel; rows keep id order.
pub fn extract_corpus(
    dir: &Path,
    resources: &Resources,
    registry: &FeatureRegistry,
    cfg: &ExtractionConfig,
) -> Result<CorpusExtraction> {
    let entries = scan_corpus(dir)?;
    let labels_path = dir.join("labels.csv");
    let labels = if labels_path.is_file() {
        let f = std::fs::File::open(&labels_path)?;
        read_labels(f).map_err(|e| Error::data(format!("{}: {e}", labels_path.display())))?
    } else {
        HashMap::new()
    };
    let rows: Vec<_> = entries
        .par_iter()
        .map(|e| extract_one(e, &labels, resources, registry, cfg))
        .collect::<Result<_>>()?;
    let mut dataset = Dataset::for_registry(registry);
    let mut provenance = Vec::with_capacity(rows.len());
    let mut texts = Vec::with_capacity(rows.len());
    for (entry, (values, prov, text, row)) in entries.iter().zip(rows) {
        dataset.push(&entry.id, values, row.label, row.mmse.map(f64::from))?;
        provenance.push(prov);
        texts.push(text);
    }
    Ok(CorpusExtraction {
        dataset,
        provenance,
        texts,
    })
}

/// `id,text,label` with an empty label when unknown.
pub fn write_transcripts_csv<W: Write>(out: W, rows: &[TranscriptText]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "text", "label"])?;
    for r in rows {
        w.write_record([r.id.as_str(), r.text.as_str(), &r.label.map_or(String::new(), |l| l.to_string())])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_transcripts_csv<R: Read>(input: R) -> Result<Vec<TranscriptText>> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(["id", "text", "label"]) {
        return Err(Error::data("transcript file header must be id,text,label"));
    }
    r.records()
        .map(|rec| {
            let rec = rec?;
            let label = match &rec[2] {
                "" => None,
                "0" => Some(0),
                "1" => Some(1),
                other => return Err(Error::data(format!("transcript label {other:?} is not 0 or 1"))),
            };
            Ok(TranscriptText {
                id: rec[0].to_string(),
                text: rec[1].to_string(),
                label,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceFile {
    pub registry_hash: String,
    pub features: usize,
    pub samples: Vec<Provenance>,
}

pub fn write_provenance(path: &Path, registry: &FeatureRegistry, samples: &[Provenance]) -> Result<()> {
    let file = ProvenanceFile {
        registry_hash: registry.hash().to_string(),
        features: registry.len(),
        samples: samples.to_vec(),
    };
    let text = serde_json::to_string_pretty(&file)?;
    write_atomic(path, |f| {
        f.write_all(text.as_bytes())?;
        Ok(())
    })
}
