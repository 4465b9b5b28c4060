use cogspeech::config::PipelineConfig;
use cogspeech::corpus::{extract_corpus, read_transcripts_csv, write_transcripts_csv};
use cogspeech::featureset::{Dataset, FeatureRegistry, Group, Imputer, BLOCKS, FEATURE_COUNT};
use cogspeech::fixtures::{default_registry, generate_corpus};
use cogspeech::resources::Resources;
use cogspeech::Error;

fn fixture() -> (tempfile::TempDir, PipelineConfig) {
    let dir = tempfile::tempdir().unwrap();
    let corpus = generate_corpus(dir.path(), 12, 7).unwrap();
    let cfg = PipelineConfig::load(&corpus.config).unwrap();
    (dir, cfg)
}

#[test]
fn registry_counts() {
    let r = default_registry();
    assert_eq!(r.len(), FEATURE_COUNT);
    let counts = r.group_counts();
    assert_eq!(counts, [(Group::Lexicosyntactic, 297), (Group::Acoustic, 187), (Group::Semantic, 25)]);
    let mut names: Vec<&str> = r.names();
    names.sort_unstable();
    names.dedup();
    assert_eq!(names.len(), FEATURE_COUNT);
    assert_eq!(BLOCKS.iter().map(|b| b.len).sum::<usize>(), FEATURE_COUNT);
}

#[test]
fn shipped_registry_file_matches() {
    let shipped = include_str!("../data/feature_registry.tsv");
    assert_eq!(shipped, default_registry().to_tsv());
}

#[test]
fn full_fixture_has_no_masked_features() {
    let (dir, cfg) = fixture();
    let resources = Resources::load(&cfg).unwrap();
    let registry = FeatureRegistry::new(&resources.productions, &resources.space_names()).unwrap();
    let start = std::time::Instant::now();
    let out = extract_corpus(dir.path(), &resources, &registry, &cfg.extraction).unwrap();
    assert!(start.elapsed().as_secs() < 60);
    assert_eq!(out.dataset.len(), 12);
    assert_eq!(out.dataset.n_features(), 509);
    for (i, p) in out.provenance.iter().enumerate() {
        assert_eq!(p.masked, 0, "{}: masked {:?} {:?}", out.dataset.ids[i], p.masked_blocks, p.notes);
    }
    let again = extract_corpus(dir.path(), &resources, &registry, &cfg.extraction).unwrap();
    assert_eq!(out.dataset, again.dataset);
}

#[test]
fn missing_audio_masks_acoustic_and_rate() {
    let (dir, cfg) = fixture();
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "wav") {
            std::fs::remove_file(p).unwrap();
        }
    }
    let resources = Resources::load(&cfg).unwrap();
    let registry = FeatureRegistry::new(&resources.productions, &resources.space_names()).unwrap();
    let out = extract_corpus(dir.path(), &resources, &registry, &cfg.extraction).unwrap();
    let rate = registry.block_range("rate").unwrap();
    for (row, p) in out.dataset.rows.iter().zip(&out.provenance) {
        assert_eq!(p.masked, 189);
        for (j, v) in row.iter().enumerate() {
            let f = &registry.features()[j];
            let audio_dependent = f.group == Group::Acoustic || rate.contains(&j);
            assert_eq!(v.is_none(), audio_dependent, "{}", f.name);
        }
    }
}

#[test]
fn matrix_round_trip_and_hash_check() {
    let (dir, cfg) = fixture();
    let resources = Resources::load(&cfg).unwrap();
    let registry = FeatureRegistry::new(&resources.productions, &resources.space_names()).unwrap();
    let out = extract_corpus(dir.path(), &resources, &registry, &cfg.extraction).unwrap();
    let mut buf = Vec::new();
    out.dataset.write_csv(&mut buf).unwrap();
    let back = Dataset::read_csv(buf.as_slice(), Some(&registry)).unwrap();
    assert_eq!(back, out.dataset);

    let mut other = out.dataset.clone();
    other.registry_hash = "0".repeat(64);
    let mut buf = Vec::new();
    other.write_csv(&mut buf).unwrap();
    assert!(matches!(
        Dataset::read_csv(buf.as_slice(), Some(&registry)),
        Err(Error::RegistryMismatch { .. })
    ));

    let mut text = Vec::new();
    write_transcripts_csv(&mut text, &out.texts).unwrap();
    assert_eq!(read_transcripts_csv(text.as_slice()).unwrap(), out.texts);
    assert!(out.texts.iter().all(|t| !t.text.is_empty() && t.label.is_some()));
}

#[test]
fn empty_corpus_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig::default();
    let spaces = cogspeech::semantics::DEFAULT_SPACES
        .iter()
        .map(|(n, d)| cogspeech::semantics::EmbeddingSpace::new(*n, *d).unwrap())
        .collect();
    let resources = Resources::with_spaces(spaces, 3).unwrap();
    let registry = default_registry();
    assert!(extract_corpus(dir.path(), &resources, &registry, &cfg.extraction).is_err());
}

#[test]
fn imputer_uses_training_medians() {
    let rows = vec![vec![Some(1.0), None], vec![Some(3.0), None], vec![None, None], vec![Some(10.0), None]];
    let imp = Imputer::fit(&rows, 2);
    assert_eq!(imp.fill, vec![3.0, 0.0]);
    assert_eq!(imp.transform_row(&[None, Some(2.0)]), vec![3.0, 2.0]);
}

fn median_oracle(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

#[test]
fn imputer_matches_median_script_on_random_masks() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let (n, d) = (rng.gen_range(1..30), rng.gen_range(1..8));
        let rows: Vec<Vec<Option<f64>>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_bool(0.7).then(|| rng.gen_range(-10.0..10.0))).collect())
            .collect();
        let imp = Imputer::fit(&rows, d);
        for j in 0..d {
            let present: Vec<f64> = rows.iter().filter_map(|r| r[j]).collect();
            assert_eq!(imp.fill[j], median_oracle(present));
        }
        for (row, filled) in rows.iter().zip(imp.transform(&rows)) {
            for j in 0..d {
                assert_eq!(filled[j], row[j].unwrap_or(imp.fill[j]));
            }
        }
    }
}

#[test]
fn full_size_matrix_round_trips() {
    let (mut data, _) = cogspeech::fixtures::informative_matrix(156, 10, 1.0, 3);
    for i in (0..156).step_by(7) {
        data.rows[i][i % 509] = None;
    }
    data.labels[5] = None;
    data.mmse[6] = None;
    let registry = default_registry();
    let mut buf = Vec::new();
    data.write_csv(&mut buf).unwrap();
    assert_eq!(Dataset::read_csv(buf.as_slice(), Some(&registry)).unwrap(), data);

    // drop the last feature column from every line
    let text = String::from_utf8(buf).unwrap();
    let cut: String = text
        .lines()
        .map(|l| if l.starts_with('#') { l.to_string() } else { l[..l.rfind(',').unwrap()].to_string() })
        .map(|l| l + "\n")
        .collect();
    assert!(Dataset::read_csv(cut.as_bytes(), Some(&registry)).is_err());
}

#[test]
fn no_participant_speech_masks_text_features() {
    use cogspeech::featureset::{extract_all, Sample};
    let (_dir, cfg) = fixture();
    let resources = Resources::load(&cfg).unwrap();
    let registry = default_registry();
    let t = cogspeech::chat::parse_chat("*INV:\ttell me everything you see .\n").unwrap();
    let v = extract_all(
        Sample {
            transcript: &t,
            trees: None,
            audio: None,
        },
        &resources,
        &registry,
        &cfg.extraction,
    )
    .unwrap();
    assert_eq!(v.masked(), FEATURE_COUNT);
}

/// Class means over many synthetic samples: AD speech uses more pronouns,
/// names fewer distinct content units and has tighter local coherence.
#[test]
fn synthetic_classes_separate_on_marker_features() {
    use cogspeech::chat::{parse_chat, participant_utterances, Label};
    use cogspeech::fixtures::{embedding_vocabulary, synthetic_sample, word_vector};
    use cogspeech::semantics::{coherence_features, content_unit_frequencies, ContentUnitLexicon, EmbeddingSpace};
    use cogspeech::treebank::parse_trees_file;

    let lexicon = ContentUnitLexicon::builtin();
    let mut space = EmbeddingSpace::new("w2v300", 300).unwrap();
    for w in embedding_vocabulary() {
        space.insert(&w, word_vector("w2v300", &w, 300)).unwrap();
    }
    let means = |label: Label| {
        let n = 40;
        let mut acc = [0.0; 3];
        for i in 0..n {
            let s = synthetic_sample(i, label, 99);
            let t = parse_chat(&s.chat).unwrap();
            let utts = participant_utterances(&t, "PAR");
            let trees = parse_trees_file(&s.trees, utts.len()).unwrap();
            let tags: Vec<String> =
                trees.iter().flatten().flat_map(|t| t.tagged_words().into_iter().map(|(tag, _)| tag.to_string())).collect();
            acc[0] += tags.iter().filter(|t| *t == "PRP").count() as f64 / tags.len() as f64;
            let words: Vec<Vec<&str>> = utts.iter().map(|u| u.words().map(|w| w.normalized.as_str()).collect()).collect();
            let flat: Vec<&str> = words.iter().flatten().copied().collect();
            acc[1] += content_unit_frequencies(&flat, &lexicon)[0].unwrap();
            acc[2] += coherence_features(&words, std::slice::from_ref(&space), 0).local[0].unwrap();
        }
        acc.map(|v| v / n as f64)
    };
    let (ad, control) = (means(Label::Ad), means(Label::NonAd));
    assert!(ad[0] > control[0] + 0.03, "PRP {ad:?} {control:?}");
    assert!((0.04..0.16).contains(&ad[0]) && (0.02..0.10).contains(&control[0]));
    assert!(ad[1] + 0.1 < control[1], "content units {ad:?} {control:?}");
    assert!(ad[2] < control[2], "coherence {ad:?} {control:?}");
}
