//! CHAT ingestion against a line-by-line reference tokenizer.

use cogspeech::chat::*;
use cogspeech::fixtures::synthetic_sample;
use proptest::prelude::*;

#[derive(Debug, Default, PartialEq)]
struct OracleCounts {
    words: usize,
    fillers: usize,
    nonwords: usize,
    retraced: usize,
}

/// Independent reading of the CHAT subset the fixtures use: strip the tier
/// prefix and the time bullet, drop `<...> [/]` groups and single words
/// followed by `[/]`, and classify the remaining whitespace tokens.
fn oracle(line: &str) -> (String, OracleCounts) {
    let (speaker, body) = line[1..].split_once(':').unwrap();
    let body = match body.find('\u{15}') {
        Some(i) => &body[..i],
        None => body,
    };
    let raw: Vec<&str> = body.split_whitespace().collect();
    let mut kept: Vec<&str> = Vec::new();
    let mut c = OracleCounts::default();
    let mut i = 0;
    while i < raw.len() {
        let tok = raw[i];
        if tok.starts_with('<') {
            let mut j = i;
            while !raw[j].ends_with('>') {
                j += 1;
            }
            let group: Vec<&str> = raw[i..=j].iter().map(|t| t.trim_matches(|c| c == '<' || c == '>')).collect();
            if matches!(raw.get(j + 1), Some(&"[/]") | Some(&"[//]")) {
                c.retraced += group.len();
                i = j + 2;
            } else {
                kept.extend(group);
                i = j + 1;
            }
            continue;
        }
        if matches!(raw.get(i + 1), Some(&"[/]") | Some(&"[//]")) {
            c.retraced += 1;
            i += 2;
            continue;
        }
        if !tok.starts_with('[') {
            kept.push(tok);
        }
        i += 1;
    }
    for tok in kept {
        let bare = tok.trim_start_matches("&-").trim_start_matches('&').to_lowercase();
        if [".", "?", "!"].contains(&tok) {
            continue;
        }
        if ["um", "uh", "er", "erm", "uhm", "hm", "hmm", "mm"].contains(&bare.as_str()) {
            c.fillers += 1;
        } else if ["xxx", "yyy", "www"].contains(&bare.as_str()) {
            c.nonwords += 1;
        } else {
            c.words += 1;
        }
    }
    (speaker.to_string(), c)
}

fn counts(u: &Utterance) -> OracleCounts {
    OracleCounts {
        words: u.words().count(),
        fillers: u.fillers().count(),
        nonwords: u.tokens.iter().filter(|t| t.is_nonword).count(),
        retraced: u.retraced,
    }
}

#[test]
fn fixture_corpus_matches_reference_tokenizer() {
    let mut par_total = 0;
    for i in 0..12 {
        let label = if i % 2 == 0 { Label::NonAd } else { Label::Ad };
        let s = synthetic_sample(i, label, 42);
        let t = parse_chat(&s.chat).unwrap();
        let tiers: Vec<&str> = s.chat.lines().filter(|l| l.starts_with('*')).collect();
        assert_eq!(t.utterances.len(), tiers.len());
        for (u, line) in t.utterances.iter().zip(tiers) {
            let (speaker, want) = oracle(line);
            assert_eq!(u.speaker, speaker);
            assert_eq!(counts(u), want, "{line}");
            if speaker == "PAR" {
                par_total += want.words;
            }
        }
        let par: usize = participant_utterances(&t, "PAR").iter().map(|u| u.words().count()).sum();
        let oracle_par: usize = s.chat.lines().filter(|l| l.starts_with("*PAR")).map(|l| oracle(l).1.words).sum();
        assert_eq!(par, oracle_par);
        // same bytes, same tokens
        assert_eq!(parse_chat(&s.chat).unwrap(), t);
    }
    assert!(par_total > 0);
}

#[test]
fn speaker_routing() {
    let t = parse_chat("*PAR:\ta dog .\n*INV:\ttell me everything .\n*PAR:\tyes .\n").unwrap();
    let par = participant_utterances(&t, "PAR");
    assert_eq!(par.len(), 2);
    assert_eq!(par[1].tokens[0].normalized, "yes");
    let only_inv = parse_chat("*INV:\ttell me everything .\n").unwrap();
    assert!(participant_utterances(&only_inv, "PAR").is_empty());
}

#[test]
fn interleaved_segments_merge() {
    let text = "*PAR:\tone . \u{15}0_1000\u{15}\n\
                *INV:\tmm . \u{15}1000_1500\u{15}\n\
                *PAR:\ttwo . \u{15}900_2000\u{15}\n\
                *INV:\tgo on . \u{15}2000_2600\u{15}\n\
                *PAR:\tthree . \u{15}2600_3100\u{15}\n\
                *PAR:\tfour . \u{15}3500_4000\u{15}\n\
                *INV:\tok . \u{15}4000_4100\u{15}\n\
                *PAR:\tfive . \u{15}3900_4500\u{15}\n";
    let t = parse_chat(text).unwrap();
    // participant spans (0,1000) (900,2000) (2600,3100) (3500,4000) (3900,4500), merged by hand
    assert_eq!(
        participant_segments(&t, "PAR"),
        Timing::Segments(vec![(0, 2000), (2600, 3100), (3500, 4500)])
    );
    assert_eq!(merge_intervals(vec![(0, 1000), (900, 2000)]), vec![(0, 2000)]);
}

#[test]
fn canonical_round_trip() {
    for i in 0..4 {
        let s = synthetic_sample(i, Label::Ad, 3);
        let t = parse_chat(&s.chat).unwrap().with_id(s.id);
        assert_eq!(from_canonical(&to_canonical(&t)).unwrap(), t);
    }
}

proptest! {
    #[test]
    fn participant_filter_is_ordered_subset(speakers in prop::collection::vec(prop::sample::select(vec!["PAR", "INV", "OTH"]), 0..20)) {
        let text: String = speakers.iter().enumerate().map(|(i, s)| format!("*{s}:\tword{i} .\n")).collect();
        let t = parse_chat(&text).unwrap();
        let par = participant_utterances(&t, "PAR");
        let want: Vec<String> = speakers.iter().enumerate().filter(|(_, s)| **s == "PAR").map(|(i, _)| format!("word{i}")).collect();
        let got: Vec<String> = par.iter().map(|u| u.tokens[0].normalized.clone()).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn merged_segments_are_sorted_and_disjoint(spans in prop::collection::vec((0u64..5000, 1u64..800), 1..15)) {
        let spans: Vec<(u64, u64)> = spans.into_iter().map(|(s, l)| (s, s + l)).collect();
        let merged = merge_intervals(spans.clone());
        for w in merged.windows(2) {
            prop_assert!(w[0].1 < w[1].0);
        }
        for &(s, e) in &spans {
            prop_assert!(merged.iter().any(|&(ms, me)| ms <= s && e <= me));
        }
        let covered: u64 = merged.iter().map(|(s, e)| e - s).sum();
        let mut bits = vec![false; 6000];
        for &(s, e) in &spans {
            for m in s..e { bits[m as usize] = true; }
        }
        prop_assert_eq!(covered, bits.iter().filter(|b| **b).count() as u64);
    }
}
