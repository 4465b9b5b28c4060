//! CHAT transcript ingestion.
//!
//! Supported subset: `@` headers (only `@Media` is read), `*XXX:` main tiers
//! with tab continuation lines, `%xxx:` dependent tiers (skipped), bullet
//! time codes `NNN_NNN` (with or without the `\x15` delimiters), fillers
//! `&-um` / `&-uh` and bare `um` / `uh`, retracing `[/]` and `[//]` applied
//! to the preceding word or `<...>` group, unintelligible `xxx`, and pause
//! markers `(.)`, `(..)`, `(...)`.
//!
//! Utterance terminators (`.`, `?`, `!`, `+...` and friends) are kept as
//! tokens flagged `is_terminator`; use [`Utterance::words`] for lexical
//! content only.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tier code of the participant in the ADReSS-style corpora.
pub const DEFAULT_PARTICIPANT: &str = "PAR";

const FILLERS: &[&str] = &["um", "uh", "er", "erm", "uhm", "hm", "hmm", "mm"];
const UNINTELLIGIBLE: &[&str] = &["xxx", "yyy", "www"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub normalized: String,
    pub is_filler: bool,
    pub is_nonword: bool,
    pub is_terminator: bool,
}

impl Token {
    /// A lexical word: not a filler, not unintelligible, not a terminator.
    pub fn is_word(&self) -> bool {
        !self.is_filler && !self.is_nonword && !self.is_terminator
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub speaker: String,
    pub tokens: Vec<Token>,
    pub start_ms: Option<u64>,
    pub end_ms: Option<u64>,
    pub raw: String,
    /// Words removed by `[/]` / `[//]` retracing.
    pub retraced: usize,
    /// Pause markers `(.)`, `(..)`, `(...)` or timed `(1.5)`.
    pub pauses: usize,
}

impl Utterance {
    pub fn words(&self) -> impl Iterator<Item = &Token> + '_ {
        self.tokens.iter().filter(|t| t.is_word())
    }

    pub fn fillers(&self) -> impl Iterator<Item = &Token> + '_ {
        self.tokens.iter().filter(|t| t.is_filler)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "non-AD")]
    NonAd,
    #[serde(rename = "AD")]
    Ad,
}

impl Label {
    /// AD is the positive class.
    pub fn as_binary(self) -> u8 {
        match self {
            Label::NonAd => 0,
            Label::Ad => 1,
        }
    }

    pub fn from_binary(v: u8) -> Option<Self> {
        match v {
            0 => Some(Label::NonAd),
            1 => Some(Label::Ad),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::NonAd => "non-AD",
            Label::Ad => "AD",
        })
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ad" | "1" | "dementia" | "cd" => Ok(Label::Ad),
            "non-ad" | "nonad" | "0" | "control" | "cc" => Ok(Label::NonAd),
            other => Err(Error::data(format!("unknown label {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub id: String,
    pub utterances: Vec<Utterance>,
    pub label: Option<Label>,
    pub mmse: Option<u8>,
    pub audio_path: Option<PathBuf>,
}

impl Transcript {
    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn set_mmse(&mut self, mmse: Option<u8>) -> Result<()> {
        if let Some(v) = mmse {
            if v > 30 {
                return Err(Error::data(format!("{}: MMSE {v} outside [0, 30]", self.id)));
            }
        }
        self.mmse = mmse;
        Ok(())
    }
}

/// Parse the contents of a `.cha` file.
pub fn parse_chat(text: &str) -> Result<Transcript> {
    let mut tiers: Vec<(usize, String)> = Vec::new();
    // true while continuation lines belong to a main tier
    let mut in_main = false;
    let mut in_tier = false;
    let mut media: Option<String> = None;

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = if idx == 0 { line.trim_start_matches('\u{feff}') } else { line };
        if line.trim().is_empty() {
            continue;
        }
        if line.starts_with('\t') || line.starts_with(' ') {
            if !in_tier {
                return Err(Error::Chat {
                    line: line_no,
                    message: "continuation line outside any tier".into(),
                });
            }
            if in_main {
                let last = tiers.last_mut().expect("main tier present");
                last.1.push(' ');
                last.1.push_str(line.trim());
            }
            continue;
        }
        match line.as_bytes()[0] {
            b'@' => {
                in_tier = true;
                in_main = false;
                if let Some(rest) = line.strip_prefix("@Media:") {
                    media = rest.split(',').next().map(|s| s.trim().to_string());
                }
            }
            b'%' => {
                if !line.contains(':') {
                    return Err(Error::Chat {
                        line: line_no,
                        message: "dependent tier without ':'".into(),
                    });
                }
                in_tier = true;
                in_main = false;
            }
            b'*' => {
                tier_code(line).ok_or_else(|| Error::Chat {
                    line: line_no,
                    message: format!("malformed tier line {line:?}"),
                })?;
                tiers.push((line_no, line.trim_end().to_string()));
                in_tier = true;
                in_main = true;
            }
            _ => {
                return Err(Error::Chat {
                    line: line_no,
                    message: format!("malformed tier line {line:?}"),
                })
            }
        }
    }

    let utterances = tiers
        .into_iter()
        .map(|(line_no, raw)| parse_main_tier(line_no, raw))
        .collect::<Result<Vec<_>>>()?;

    Ok(Transcript {
        id: media.unwrap_or_default(),
        utterances,
        label: None,
        mmse: None,
        audio_path: None,
    })
}

fn tier_code(line: &str) -> Option<(&str, &str)> {
    let body = line.strip_prefix('*')?;
    let colon = body.find(':')?;
    let code = &body[..colon];
    if code.is_empty() || !code.chars().all(|c| c.is_ascii_alphanumeric()) {
        return None;
    }
    Some((code, &body[colon + 1..]))
}

fn parse_main_tier(line_no: usize, raw: String) -> Result<Utterance> {
    let (code, content) = tier_code(&raw).expect("validated tier line");
    let speaker = code.to_string();
    let (content, times) = split_bullet(content);
    let (start_ms, end_ms) = match times {
        Some((s, e)) if e < s => {
            return Err(Error::Chat {
                line: line_no,
                message: format!("time code end {e} precedes start {s}"),
            })
        }
        Some((s, e)) => (Some(s), Some(e)),
        None => (None, None),
    };

    let items = lex(content);
    let mut units: Vec<Unit> = Vec::new();
    let mut group: Option<Vec<String>> = None;
    let mut pauses = 0;
    for item in items {
        match item {
            Item::Word(w) => match group.as_mut() {
                Some(g) => g.push(w),
                None => units.push(Unit { words: vec![w], retraced: false }),
            },
            Item::GroupStart => {
                if let Some(g) = group.take() {
                    units.push(Unit { words: g, retraced: false });
                }
                group = Some(Vec::new());
            }
            Item::GroupEnd => {
                if let Some(g) = group.take() {
                    units.push(Unit { words: g, retraced: false });
                }
            }
            Item::Pause => pauses += 1,
            Item::Annotation(a) => {
                if let Some(g) = group.take() {
                    units.push(Unit { words: g, retraced: false });
                }
                let a = a.trim();
                if matches!(a, "/" | "//" | "///" | "/-" | "/?") {
                    if let Some(last) = units.last_mut() {
                        last.retraced = true;
                    }
                }
            }
        }
    }
    if let Some(g) = group.take() {
        units.push(Unit { words: g, retraced: false });
    }

    let mut tokens = Vec::new();
    let mut retraced = 0;
    for unit in units {
        for w in unit.words {
            for token in classify(&w) {
                if unit.retraced {
                    if !token.is_terminator {
                        retraced += 1;
                    }
                } else {
                    tokens.push(token);
                }
            }
        }
    }

    Ok(Utterance {
        speaker,
        tokens,
        start_ms,
        end_ms,
        raw,
        retraced,
        pauses,
    })
}

struct Unit {
    words: Vec<String>,
    retraced: bool,
}

#[derive(Debug, PartialEq)]
enum Item {
    Word(String),
    GroupStart,
    GroupEnd,
    Pause,
    Annotation(String),
}

/// Remove a trailing `start_end` bullet, returning the remaining content.
fn split_bullet(content: &str) -> (&str, Option<(u64, u64)>) {
    let trimmed = content.trim_end().trim_end_matches('\u{15}');
    let digits_start = trimmed
        .char_indices()
        .rev()
        .take_while(|(_, c)| c.is_ascii_digit() || *c == '_')
        .last()
        .map(|(i, _)| i);
    let Some(i) = digits_start else {
        return (content, None);
    };
    let code = &trimmed[i..];
    let before = &trimmed[..i];
    let delimited = before.is_empty()
        || before.ends_with(char::is_whitespace)
        || before.ends_with('\u{15}');
    let mut parts = code.split('_');
    let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
        return (content, None);
    };
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(s), Ok(e)) if delimited => (before.trim_end_matches('\u{15}'), Some((s, e))),
        _ => (content, None),
    }
}

fn lex(content: &str) -> Vec<Item> {
    let chars: Vec<char> = content.chars().collect();
    let mut items = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '[' {
            let end = chars[i..].iter().position(|&c| c == ']').map(|p| i + p);
            let end = end.unwrap_or(chars.len());
            items.push(Item::Annotation(chars[i + 1..end].iter().collect()));
            i = end + 1;
        } else if c == '<' {
            items.push(Item::GroupStart);
            i += 1;
        } else if c == '>' {
            items.push(Item::GroupEnd);
            i += 1;
        } else {
            let start = i;
            while i < chars.len() && !chars[i].is_whitespace() && !matches!(chars[i], '[' | '<' | '>') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if is_pause_marker(&word) {
                items.push(Item::Pause);
            } else {
                items.push(Item::Word(word));
            }
        }
    }
    items
}

fn is_pause_marker(w: &str) -> bool {
    w.len() >= 3
        && w.starts_with('(')
        && w.ends_with(')')
        && w[1..w.len() - 1].chars().all(|c| c == '.' || c == ':' || c.is_ascii_digit())
        && w[1..w.len() - 1].contains('.')
}

fn terminator(normalized: &str, surface: &str) -> Token {
    Token {
        surface: surface.to_string(),
        normalized: normalized.to_string(),
        is_filler: false,
        is_nonword: false,
        is_terminator: true,
    }
}

fn strip_markup(w: &str) -> String {
    let w = w.split('@').next().unwrap_or("");
    w.chars()
        .filter(|c| c.is_alphanumeric() || *c == '\'' || *c == '-')
        .flat_map(char::to_lowercase)
        .collect::<String>()
        .trim_matches('-')
        .to_string()
}

/// Turn one lexed word into zero, one, or two tokens.
fn classify(w: &str) -> Vec<Token> {
    if matches!(w, "." | "?" | "!") {
        return vec![terminator(w, w)];
    }
    if let Some(rest) = w.strip_prefix('+') {
        if !rest.is_empty() && rest.chars().all(|c| "./?!\",".contains(c)) {
            let norm = if rest.contains('?') {
                "?"
            } else if rest.contains('!') {
                "!"
            } else {
                "."
            };
            return vec![terminator(norm, w)];
        }
        // utterance linkers such as +< ++ +^ +,
        return Vec::new();
    }
    if matches!(w, "," | ";" | ":" | "„" | "‡") {
        return Vec::new();
    }
    if let Some(rest) = w.strip_prefix("&-") {
        return vec![Token {
            surface: w.to_string(),
            normalized: strip_markup(rest),
            is_filler: true,
            is_nonword: false,
            is_terminator: false,
        }];
    }
    if w.starts_with("&=") {
        return Vec::new();
    }
    if let Some(rest) = w.strip_prefix('&') {
        let rest = rest.trim_start_matches('+');
        let norm = strip_markup(rest);
        let filler = FILLERS.contains(&norm.as_str());
        return vec![Token {
            surface: w.to_string(),
            normalized: norm,
            is_filler: filler,
            is_nonword: !filler,
            is_terminator: false,
        }];
    }
    if w.len() > 1 && w.starts_with('0') && w[1..].starts_with(char::is_alphabetic) {
        return Vec::new();
    }

    // terminator glued to the final word, e.g. "cookies."
    let (body, glued) = match w.char_indices().last() {
        Some((i, c)) if w.len() > 1 && matches!(c, '.' | '?' | '!') && !w.starts_with('(') => {
            (&w[..i], Some(c))
        }
        _ => (w, None),
    };
    let mut out = Vec::new();
    let normalized = strip_markup(body);
    if !normalized.is_empty() {
        let is_nonword = UNINTELLIGIBLE.contains(&normalized.as_str());
        let is_filler = !is_nonword && FILLERS.contains(&normalized.as_str());
        out.push(Token {
            surface: body.to_string(),
            normalized,
            is_filler,
            is_nonword,
            is_terminator: false,
        });
    }
    if let Some(c) = glued {
        let s = c.to_string();
        out.push(terminator(&s, &s));
    }
    out
}

/// Participant utterances in transcript order.
pub fn participant_utterances<'a>(t: &'a Transcript, code: &str) -> Vec<&'a Utterance> {
    t.utterances.iter().filter(|u| u.speaker == code).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Timing {
    /// Merged, sorted, non-overlapping `(start_ms, end_ms)` intervals.
    Segments(Vec<(u64, u64)>),
    /// At least one participant utterance has no time code.
    NoTiming,
}

/// Participant speech intervals. Timing is only reported when every
/// participant utterance carries a time code.
pub fn participant_segments(t: &Transcript, code: &str) -> Timing {
    let utts = participant_utterances(t, code);
    if utts.is_empty() {
        return Timing::NoTiming;
    }
    let mut spans = Vec::with_capacity(utts.len());
    for u in utts {
        match (u.start_ms, u.end_ms) {
            (Some(s), Some(e)) => spans.push((s, e)),
            _ => return Timing::NoTiming,
        }
    }
    Timing::Segments(merge_intervals(spans))
}

pub fn merge_intervals(mut spans: Vec<(u64, u64)>) -> Vec<(u64, u64)> {
    spans.sort_unstable();
    let mut merged: Vec<(u64, u64)> = Vec::with_capacity(spans.len());
    for (s, e) in spans {
        match merged.last_mut() {
            Some(last) if s <= last.1 => last.1 = last.1.max(e),
            _ => merged.push((s, e)),
        }
    }
    merged
}

#[derive(Serialize, Deserialize)]
struct Header {
    id: String,
    label: Option<Label>,
    mmse: Option<u8>,
    audio_path: Option<PathBuf>,
}

/// Canonical debug dump: a header record followed by one JSON record per
/// utterance, one per line.
pub fn to_canonical(t: &Transcript) -> String {
    let header = Header {
        id: t.id.clone(),
        label: t.label,
        mmse: t.mmse,
        audio_path: t.audio_path.clone(),
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for u in &t.utterances {
        out.push_str(&serde_json::to_string(u).expect("utterance serializes"));
        out.push('\n');
    }
    out
}

pub fn from_canonical(dump: &str) -> Result<Transcript> {
    let mut lines = dump.lines().filter(|l| !l.trim().is_empty());
    let header: Header = serde_json::from_str(
        lines.next().ok_or_else(|| Error::data("empty canonical dump"))?,
    )?;
    let utterances = lines
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect::<Result<Vec<Utterance>>>()?;
    Ok(Transcript {
        id: header.id,
        utterances,
        label: header.label,
        mmse: header.mmse,
        audio_path: header.audio_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(line: &str) -> Utterance {
        parse_chat(line).unwrap().utterances.remove(0)
    }

    #[test]
    fn filler_and_time_code() {
        let u = one("*PAR: the boy is um taking cookies . 0_2400");
        assert_eq!(u.speaker, "PAR");
        assert_eq!(u.tokens.iter().filter(|t| !t.is_filler).count(), 6);
        assert_eq!(u.fillers().count(), 1);
        assert_eq!(u.words().count(), 5);
        assert_eq!((u.start_ms, u.end_ms), (Some(0), Some(2400)));
    }

    #[test]
    fn nak_delimited_bullet() {
        let u = one("*PAR:\tokay . \u{15}1200_3450\u{15}");
        assert_eq!((u.start_ms, u.end_ms), (Some(1200), Some(3450)));
        assert_eq!(u.words().count(), 1);
    }

    #[test]
    fn investigator_tier_kept() {
        let t = parse_chat("*INV: tell me everything .").unwrap();
        assert_eq!(t.utterances[0].speaker, "INV");
        assert!(participant_utterances(&t, DEFAULT_PARTICIPANT).is_empty());
    }

    #[test]
    fn retracing_excluded_and_tallied() {
        let u = one("*PAR: <the boy> [/] the boy is [//] was taking it .");
        let words: Vec<_> = u.words().map(|t| t.normalized.as_str()).collect();
        assert_eq!(words, ["the", "boy", "was", "taking", "it"]);
        assert_eq!(u.retraced, 3);
    }

    #[test]
    fn markup_stripped() {
        let u = one("*PAR: &-uh xxx (.) the cookie@o jar (be)cause &=laughs &+fr fell .");
        let t = &u.tokens;
        assert!(t[0].is_filler && t[0].normalized == "uh");
        assert!(t[1].is_nonword);
        assert_eq!(t[2].normalized, "the");
        assert_eq!(t[3].normalized, "cookie");
        assert_eq!(t[5].normalized, "because");
        assert!(t[6].is_nonword && t[6].normalized == "fr");
        assert_eq!(t[7].normalized, "fell");
        assert!(t[8].is_terminator);
        assert_eq!(u.pauses, 1);
    }

    #[test]
    fn continuation_lines_join() {
        let t = parse_chat("@Begin\n*PAR:\tthe boy\n\tis falling .\n%mor:\tdet|the\n@End\n").unwrap();
        assert_eq!(t.utterances.len(), 1);
        assert_eq!(t.utterances[0].words().count(), 4);
    }

    #[test]
    fn malformed_tier_reports_line() {
        let err = parse_chat("@Begin\n*PAR the boy .\n").unwrap_err();
        assert!(matches!(err, Error::Chat { line: 2, .. }), "{err}");
        let err = parse_chat("@Begin\nfree text\n").unwrap_err();
        assert!(matches!(err, Error::Chat { line: 2, .. }));
    }

    #[test]
    fn unknown_tier_codes_preserved() {
        let t = parse_chat("*XYZ1: hello .").unwrap();
        assert_eq!(t.utterances[0].speaker, "XYZ1");
    }

    #[test]
    fn reversed_time_code_rejected() {
        assert!(parse_chat("*PAR: hi . 500_100").is_err());
    }

    #[test]
    fn merge_overlaps() {
        assert_eq!(merge_intervals(vec![(0, 1000), (900, 2000)]), vec![(0, 2000)]);
        assert_eq!(
            merge_intervals(vec![(3000, 4000), (0, 10), (5, 20)]),
            vec![(0, 20), (3000, 4000)]
        );
    }

    #[test]
    fn no_timing() {
        let t = parse_chat("*PAR: the boy .\n*PAR: fell . 10_20").unwrap();
        assert_eq!(participant_segments(&t, "PAR"), Timing::NoTiming);
    }

    #[test]
    fn label_parsing() {
        assert_eq!("AD".parse::<Label>().unwrap(), Label::Ad);
        assert_eq!("0".parse::<Label>().unwrap(), Label::NonAd);
        assert!("maybe".parse::<Label>().is_err());
    }
}
