use serde::{Deserialize, Serialize};

use super::frames::{frame_rms, FrameConfig};
use super::wav::AudioSignal;
use crate::chat::merge_intervals;
use crate::util::ratio;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PauseConfig {
    /// A frame is silent when its RMS is below this fraction of the
    /// loudest frame.
    pub silence_threshold: f64,
    pub min_pause_s: f64,
    /// Pauses longer than this are long; the rest are short.
    pub long_pause_s: f64,
}

impl Default for PauseConfig {
    fn default() -> Self {
        PauseConfig {
            silence_threshold: 0.02,
            min_pause_s: 0.15,
            long_pause_s: 0.4,
        }
    }
}

/// Silent stretches as merged sample intervals `[start, end)`.
pub fn silent_intervals(sig: &AudioSignal, frame: &FrameConfig, cfg: &PauseConfig) -> Vec<(usize, usize)> {
    let energies = frame_rms(sig, frame);
    let loudest = energies.iter().copied().fold(0.0, f64::max);
    let w = frame.window_samples(sig.sample_rate);
    let h = frame.hop_samples(sig.sample_rate);
    let theta = cfg.silence_threshold * loudest;
    let spans: Vec<(u64, u64)> = energies
        .iter()
        .enumerate()
        .filter(|(_, &e)| loudest == 0.0 || e < theta)
        .map(|(i, _)| ((i * h) as u64, (i * h + w) as u64))
        .collect();
    merge_intervals(spans)
        .into_iter()
        .map(|(a, b)| (a as usize, b as usize))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauseSummary {
    /// Internal pause lengths in seconds, at least the minimum pause.
    pub pauses: Vec<f64>,
    pub silence_s: f64,
    pub total_s: f64,
}

impl PauseSummary {
    pub fn spoken_s(&self) -> f64 {
        self.total_s - self.silence_s
    }
}

/// Silence at the very start or end of the signal is not a pause, but it
/// still counts toward the silent duration.
pub fn summarize_pauses(sig: &AudioSignal, frame: &FrameConfig, cfg: &PauseConfig) -> PauseSummary {
    let rate = sig.sample_rate as f64;
    let len = sig.samples.len();
    let silent = silent_intervals(sig, frame, cfg);
    let silence_s = silent.iter().map(|(a, b)| (b.min(&len) - a) as f64).sum::<f64>() / rate;
    let pauses = silent
        .iter()
        .filter(|(a, b)| *a > 0 && *b < len)
        .map(|(a, b)| (b - a) as f64 / rate)
        .filter(|&d| d >= cfg.min_pause_s)
        .collect();
    PauseSummary {
        pauses,
        silence_s,
        total_s: sig.duration_seconds(),
    }
}

/// Word counts from the transcript used by the pause block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SpeechCounts {
    /// Lexical words, fillers excluded.
    pub words: usize,
    pub fillers: usize,
}

/// Nine pause features followed by the two duration features.
pub fn pause_and_duration_features(
    sig: &AudioSignal,
    counts: SpeechCounts,
    frame: &FrameConfig,
    cfg: &PauseConfig,
) -> ([Option<f64>; 9], [Option<f64>; 2]) {
    let s = summarize_pauses(sig, frame, cfg);
    let n = s.pauses.len() as f64;
    let total: f64 = s.pauses.iter().sum();
    let long = s.pauses.iter().filter(|&&p| p > cfg.long_pause_s).count() as f64;
    let words = counts.words as f64;
    let fillers = counts.fillers as f64;
    let pause = [
        Some(total),
        ratio(total, n),
        Some(long),
        Some(n - long),
        ratio(n, words + fillers),
        Some(fillers),
        ratio(fillers, words),
        ratio(total, s.spoken_s()),
        ratio(n * 60.0, s.total_s),
    ];
    (pause, [Some(s.total_s), Some(s.spoken_s())])
}
