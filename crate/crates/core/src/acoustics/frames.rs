use serde::{Deserialize, Serialize};

use super::wav::AudioSignal;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrameConfig {
    pub window_ms: f64,
    pub hop_ms: f64,
}

impl Default for FrameConfig {
    fn default() -> Self {
        FrameConfig {
            window_ms: 25.0,
            hop_ms: 10.0,
        }
    }
}

impl FrameConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.hop_ms > 0.0 && self.window_ms >= self.hop_ms) {
            return Err(Error::Config(format!(
                "frame window {} ms and hop {} ms must satisfy window >= hop > 0",
                self.window_ms, self.hop_ms
            )));
        }
        Ok(())
    }

    pub fn window_samples(&self, rate: u32) -> usize {
        ((self.window_ms * rate as f64 / 1000.0).round() as usize).max(1)
    }

    pub fn hop_samples(&self, rate: u32) -> usize {
        ((self.hop_ms * rate as f64 / 1000.0).round() as usize).max(1)
    }
}

/// Start offsets of every full frame.
pub fn frame_starts(len: usize, window: usize, hop: usize) -> Vec<usize> {
    if len < window {
        return Vec::new();
    }
    (0..=(len - window) / hop).map(|i| i * hop).collect()
}

pub fn hamming(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.54 - 0.46 * (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}

pub fn rms(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

/// Frame RMS values over full frames.
pub fn frame_rms(sig: &AudioSignal, cfg: &FrameConfig) -> Vec<f64> {
    let w = cfg.window_samples(sig.sample_rate);
    let h = cfg.hop_samples(sig.sample_rate);
    frame_starts(sig.samples.len(), w, h)
        .into_iter()
        .map(|s| rms(&sig.samples[s..s + w]))
        .collect()
}
