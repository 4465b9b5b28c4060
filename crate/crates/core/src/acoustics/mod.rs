//! Audio ingestion and the acoustic feature block: pauses and fillers, F0,
//! durations, zero-crossing rate and MFCC statistics.

mod frames;
mod mfcc;
mod pauses;
mod pitch;
mod wav;
mod zcr;

use serde::{Deserialize, Serialize};

pub use frames::{frame_rms, frame_starts, hamming, rms, FrameConfig};
pub use mfcc::{
    apply_dct, dct_matrix, deltas, hz_to_mel, mel_to_hz, mfcc_block, mfcc_frames, MelFilterbank, MfccConfig,
};
pub use pauses::{
    pause_and_duration_features, silent_intervals, summarize_pauses, PauseConfig, PauseSummary, SpeechCounts,
};
pub use pitch::{f0_stats, f0_track, PitchConfig};
pub use wav::{quantize16, read_wav, write_wav, AudioSignal};
pub use zcr::{frame_zcr, zcr_stats, zero_crossing_rate};

use crate::error::Result;

pub const PAUSE_NAMES: [&str; 9] = [
    "pause_total_s",
    "pause_mean_s",
    "pause_long_count",
    "pause_short_count",
    "pause_to_word_ratio",
    "filler_count",
    "fillers_per_word",
    "pause_to_speech_duration",
    "pauses_per_minute",
];
pub const F0_NAMES: [&str; 4] = ["f0_mean", "f0_min", "f0_max", "f0_median"];
pub const DURATION_NAMES: [&str; 2] = ["audio_duration_s", "spoken_duration_s"];
pub const ZCR_NAMES: [&str; 4] = ["zcr_mean", "zcr_var", "zcr_skew", "zcr_kurtosis"];
pub const MOMENT_SUFFIXES: [&str; 4] = ["mean", "var", "skew", "kurtosis"];

/// MFCC statistic names, coefficient-major within static, delta and
/// delta-delta blocks.
pub fn mfcc_names(n_coefficients: usize) -> Vec<String> {
    let mut names = Vec::with_capacity(12 * n_coefficients);
    for block in ["mfcc", "mfcc_d", "mfcc_dd"] {
        for k in 1..=n_coefficients {
            for m in MOMENT_SUFFIXES {
                names.push(format!("{block}{k}_{m}"));
            }
        }
    }
    names
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AcousticConfig {
    pub frame: FrameConfig,
    pub pause: PauseConfig,
    pub pitch: PitchConfig,
    pub mfcc: MfccConfig,
}

impl AcousticConfig {
    pub fn validate(&self) -> Result<()> {
        self.frame.validate()?;
        let bad = |m: &str| Err(crate::Error::Config(m.to_string()));
        if !(self.pause.silence_threshold > 0.0 && self.pause.silence_threshold < 1.0) {
            return bad("silence_threshold must lie in (0, 1)");
        }
        if !(self.pause.min_pause_s >= 0.0 && self.pause.long_pause_s >= self.pause.min_pause_s) {
            return bad("pause bounds must satisfy 0 <= min_pause_s <= long_pause_s");
        }
        if !(self.pitch.min_hz > 0.0 && self.pitch.max_hz > self.pitch.min_hz) {
            return bad("pitch range must satisfy 0 < min_hz < max_hz");
        }
        if self.mfcc.n_coefficients == 0 || self.mfcc.mel_filters <= self.mfcc.n_coefficients {
            return bad("mel_filters must exceed n_coefficients > 0");
        }
        Ok(())
    }
}

/// The 187 acoustic values: pauses, F0, durations, ZCR, MFCC.
#[derive(Debug, Clone, PartialEq)]
pub struct AcousticFeatures {
    pub pause: [Option<f64>; 9],
    pub f0: [Option<f64>; 4],
    pub duration: [Option<f64>; 2],
    pub zcr: [Option<f64>; 4],
    pub mfcc: Vec<Option<f64>>,
}

impl AcousticFeatures {
    pub fn to_vec(&self) -> Vec<Option<f64>> {
        let mut v = Vec::with_capacity(19 + self.mfcc.len());
        v.extend_from_slice(&self.pause);
        v.extend_from_slice(&self.f0);
        v.extend_from_slice(&self.duration);
        v.extend_from_slice(&self.zcr);
        v.extend_from_slice(&self.mfcc);
        v
    }
}

pub fn acoustic_features(sig: &AudioSignal, counts: SpeechCounts, cfg: &AcousticConfig) -> AcousticFeatures {
    let (pause, duration) = pause_and_duration_features(sig, counts, &cfg.frame, &cfg.pause);
    AcousticFeatures {
        pause,
        f0: f0_stats(sig, &cfg.frame, &cfg.pitch),
        duration,
        zcr: zcr_stats(sig, &cfg.frame),
        mfcc: mfcc_block(sig, &cfg.frame, &cfg.mfcc),
    }
}
