use super::frames::{frame_starts, FrameConfig};
use super::wav::AudioSignal;
use crate::util::Moments;

/// Sign changes per adjacent-sample comparison. Zero counts as positive.
pub fn zero_crossing_rate(samples: &[f64]) -> f64 {
    if samples.len() < 2 {
        return 0.0;
    }
    let changes = samples.windows(2).filter(|w| (w[0] >= 0.0) != (w[1] >= 0.0)).count();
    changes as f64 / (samples.len() - 1) as f64
}

pub fn frame_zcr(sig: &AudioSignal, cfg: &FrameConfig) -> Vec<f64> {
    let w = cfg.window_samples(sig.sample_rate);
    let h = cfg.hop_samples(sig.sample_rate);
    frame_starts(sig.samples.len(), w, h)
        .into_iter()
        // each sample is compared with its predecessor, including the one
        // just before the frame
        .map(|s| zero_crossing_rate(&sig.samples[s.saturating_sub(1)..s + w]))
        .collect()
}

/// Mean, variance, skewness and excess kurtosis of per-frame ZCR; all
/// missing when there is no full frame.
pub fn zcr_stats(sig: &AudioSignal, cfg: &FrameConfig) -> [Option<f64>; 4] {
    match Moments::of(&frame_zcr(sig, cfg)) {
        Some(m) => m.to_vec(),
        None => [None; 4],
    }
}
