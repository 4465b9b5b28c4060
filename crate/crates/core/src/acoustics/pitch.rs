use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::frames::{frame_starts, rms, FrameConfig};
use super::wav::AudioSignal;
use crate::util::median;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PitchConfig {
    pub min_hz: f64,
    pub max_hz: f64,
    /// Analysis window; at least the frame window and long enough for
    /// two periods of `min_hz`.
    pub window_ms: f64,
    /// Minimum normalized autocorrelation peak for a voiced frame.
    pub voicing_threshold: f64,
    /// Frames quieter than this fraction of the loudest frame are skipped.
    pub energy_gate: f64,
}

impl Default for PitchConfig {
    fn default() -> Self {
        PitchConfig {
            min_hz: 75.0,
            max_hz: 500.0,
            window_ms: 40.0,
            voicing_threshold: 0.45,
            energy_gate: 0.05,
        }
    }
}

struct Analyzer {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    size: usize,
    lag_min: usize,
    lag_max: usize,
    rate: f64,
    voicing: f64,
}

impl Analyzer {
    fn new(window: usize, rate: u32, cfg: &PitchConfig) -> Self {
        let size = (2 * window).next_power_of_two();
        let mut planner = FftPlanner::new();
        let rate_f = rate as f64;
        Analyzer {
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
            size,
            lag_min: ((rate_f / cfg.max_hz).floor() as usize).max(2),
            lag_max: ((rate_f / cfg.min_hz).ceil() as usize).min(window.saturating_sub(2)),
            rate: rate_f,
            voicing: cfg.voicing_threshold,
        }
    }

    /// Normalized autocorrelation for lags `0..=lag_max + 1`.
    fn autocorrelation(&self, x: &[f64]) -> Vec<f64> {
        let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
        buf.resize(self.size, Complex::new(0.0, 0.0));
        self.forward.process(&mut buf);
        for c in &mut buf {
            *c = Complex::new(c.norm_sqr(), 0.0);
        }
        self.inverse.process(&mut buf);
        let mut prefix = Vec::with_capacity(x.len() + 1);
        prefix.push(0.0);
        for v in x {
            prefix.push(prefix.last().unwrap() + v * v);
        }
        let n = x.len();
        let total = prefix[n];
        (0..=self.lag_max + 1)
            .map(|lag| {
                let head = prefix[n - lag];
                let tail = total - prefix[lag];
                let denom = (head * tail).sqrt();
                if denom > 0.0 {
                    buf[lag].re / self.size as f64 / denom
                } else {
                    0.0
                }
            })
            .collect()
    }

    fn estimate(&self, frame: &[f64]) -> Option<f64> {
        if self.lag_max <= self.lag_min {
            return None;
        }
        let mean = frame.iter().sum::<f64>() / frame.len() as f64;
        let x: Vec<f64> = frame.iter().map(|v| v - mean).collect();
        let nc = self.autocorrelation(&x);
        let peaks: Vec<usize> = (self.lag_min..=self.lag_max)
            .filter(|&t| nc[t] > nc[t - 1] && nc[t] >= nc[t + 1])
            .collect();
        let best = peaks.iter().map(|&t| nc[t]).fold(f64::NEG_INFINITY, f64::max);
        if !(best >= self.voicing) {
            return None;
        }
        // the shortest lag close to the best peak avoids octave-down errors
        let t = *peaks.iter().find(|&&t| nc[t] >= 0.9 * best)?;
        let (a, b, c) = (nc[t - 1], nc[t], nc[t + 1]);
        let curvature = a - 2.0 * b + c;
        let shift = if curvature < 0.0 { 0.5 * (a - c) / curvature } else { 0.0 };
        Some(self.rate / (t as f64 + shift))
    }
}

/// Per-frame F0 estimates for voiced frames, in frame order.
pub fn f0_track(sig: &AudioSignal, frame: &FrameConfig, cfg: &PitchConfig) -> Vec<f64> {
    let rate = sig.sample_rate;
    let window = frame
        .window_samples(rate)
        .max((cfg.window_ms * rate as f64 / 1000.0).round() as usize);
    let hop = frame.hop_samples(rate);
    let starts = frame_starts(sig.samples.len(), window, hop);
    if starts.is_empty() {
        return Vec::new();
    }
    let energies: Vec<f64> = starts.iter().map(|&s| rms(&sig.samples[s..s + window])).collect();
    let loudest = energies.iter().copied().fold(0.0, f64::max);
    if loudest <= 0.0 {
        return Vec::new();
    }
    let analyzer = Analyzer::new(window, rate, cfg);
    starts
        .par_iter()
        .zip(energies.par_iter())
        .map(|(&s, &e)| {
            if e < cfg.energy_gate * loudest || e < 1e-6 {
                None
            } else {
                analyzer.estimate(&sig.samples[s..s + window])
            }
        })
        .collect::<Vec<Option<f64>>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Average, minimum, maximum and median F0 over voiced frames.
pub fn f0_stats(sig: &AudioSignal, frame: &FrameConfig, cfg: &PitchConfig) -> [Option<f64>; 4] {
    let track = f0_track(sig, frame, cfg);
    if track.is_empty() {
        return [None; 4];
    }
    let mean = track.iter().sum::<f64>() / track.len() as f64;
    let min = track.iter().copied().fold(f64::INFINITY, f64::min);
    let max = track.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    [Some(mean), Some(min), Some(max), median(&track)]
}
