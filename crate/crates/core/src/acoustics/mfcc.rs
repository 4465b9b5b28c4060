use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::frames::{frame_starts, hamming, FrameConfig};
use super::wav::AudioSignal;
use crate::util::Moments;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MfccConfig {
    pub pre_emphasis: f64,
    pub mel_filters: usize,
    /// Coefficients `1..=n_coefficients` are kept; `c0` is dropped.
    pub n_coefficients: usize,
    /// Half-width of the delta regression window.
    pub delta_width: usize,
    /// Floor applied to filter energies before the logarithm.
    pub log_floor: f64,
}

impl Default for MfccConfig {
    fn default() -> Self {
        MfccConfig {
            pre_emphasis: 0.97,
            mel_filters: 26,
            n_coefficients: 14,
            delta_width: 2,
            log_floor: 1e-10,
        }
    }
}

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular mel filters over the bins `0..=n_fft/2`, equally spaced on
/// the mel scale from 0 Hz to Nyquist. Weights use each bin's exact
/// frequency.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    pub weights: Vec<Vec<f64>>,
    pub centers_hz: Vec<f64>,
}

impl MelFilterbank {
    pub fn new(n_filters: usize, n_fft: usize, rate: u32) -> Self {
        let nyquist = rate as f64 / 2.0;
        let top = hz_to_mel(nyquist);
        let edges: Vec<f64> = (0..n_filters + 2)
            .map(|i| mel_to_hz(top * i as f64 / (n_filters + 1) as f64))
            .collect();
        let bins = n_fft / 2 + 1;
        let weights = (0..n_filters)
            .map(|m| {
                let (lo, mid, hi) = (edges[m], edges[m + 1], edges[m + 2]);
                (0..bins)
                    .map(|k| {
                        let f = k as f64 * rate as f64 / n_fft as f64;
                        if f <= lo || f >= hi {
                            0.0
                        } else if f <= mid {
                            (f - lo) / (mid - lo)
                        } else {
                            (hi - f) / (hi - mid)
                        }
                    })
                    .collect()
            })
            .collect();
        MelFilterbank {
            weights,
            centers_hz: edges[1..=n_filters].to_vec(),
        }
    }

    pub fn apply(&self, power: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .map(|w| w.iter().zip(power).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Orthonormal DCT-II basis rows `0..n_out` for inputs of length `n`.
pub fn dct_matrix(n_out: usize, n: usize) -> Vec<Vec<f64>> {
    (0..n_out)
        .map(|k| {
            let scale = if k == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
            (0..n)
                .map(|m| scale * (std::f64::consts::PI * k as f64 * (m as f64 + 0.5) / n as f64).cos())
                .collect()
        })
        .collect()
}

pub fn apply_dct(basis: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    basis.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

/// `d_t = sum_n n (c_{t+n} - c_{t-n}) / (2 sum_n n^2)`, edges replicated.
pub fn deltas(frames: &[Vec<f64>], width: usize) -> Vec<Vec<f64>> {
    let t_len = frames.len();
    if t_len == 0 {
        return Vec::new();
    }
    let dim = frames[0].len();
    let norm = 2.0 * (1..=width).map(|n| (n * n) as f64).sum::<f64>();
    (0..t_len)
        .map(|t| {
            (0..dim)
                .map(|d| {
                    (1..=width)
                        .map(|n| {
                            let fwd = &frames[(t + n).min(t_len - 1)];
                            let back = &frames[t.saturating_sub(n)];
                            n as f64 * (fwd[d] - back[d])
                        })
                        .sum::<f64>()
                        / norm
                })
                .collect()
        })
        .collect()
}

struct Pipeline {
    fft: Arc<dyn Fft<f64>>,
    n_fft: usize,
    window: Vec<f64>,
    bank: MelFilterbank,
    dct: Vec<Vec<f64>>,
    floor: f64,
}

impl Pipeline {
    fn frame(&self, x: &[f64]) -> Vec<f64> {
        let mut buf: Vec<Complex<f64>> = x
            .iter()
            .zip(&self.window)
            .map(|(v, w)| Complex::new(v * w, 0.0))
            .collect();
        buf.resize(self.n_fft, Complex::new(0.0, 0.0));
        self.fft.process(&mut buf);
        let power: Vec<f64> = buf[..=self.n_fft / 2]
            .iter()
            .map(|c| c.norm_sqr() / self.n_fft as f64)
            .collect();
        let log_e: Vec<f64> = self.bank.apply(&power).into_iter().map(|e| e.max(self.floor).ln()).collect();
        let mut c = apply_dct(&self.dct, &log_e);
        c.remove(0);
        c
    }
}

/// Static coefficients `1..=n` per full frame.
pub fn mfcc_frames(sig: &AudioSignal, frame: &FrameConfig, cfg: &MfccConfig) -> Vec<Vec<f64>> {
    let rate = sig.sample_rate;
    let w = frame.window_samples(rate);
    let h = frame.hop_samples(rate);
    let starts = frame_starts(sig.samples.len(), w, h);
    if starts.is_empty() {
        return Vec::new();
    }
    let mut emphasized = Vec::with_capacity(sig.samples.len());
    emphasized.push(sig.samples[0]);
    emphasized.extend(sig.samples.windows(2).map(|p| p[1] - cfg.pre_emphasis * p[0]));
    let n_fft = w.next_power_of_two();
    let pipeline = Pipeline {
        fft: FftPlanner::new().plan_fft_forward(n_fft),
        n_fft,
        window: hamming(w),
        bank: MelFilterbank::new(cfg.mel_filters, n_fft, rate),
        dct: dct_matrix(cfg.n_coefficients + 1, cfg.mel_filters),
        floor: cfg.log_floor,
    };
    starts.par_iter().map(|&s| pipeline.frame(&emphasized[s..s + w])).collect()
}

/// Mean, variance, skewness and kurtosis of each of the static, delta and
/// delta-delta coefficients, coefficient-major. Missing when fewer than
/// three frames exist.
pub fn mfcc_block(sig: &AudioSignal, frame: &FrameConfig, cfg: &MfccConfig) -> Vec<Option<f64>> {
    let n = 3 * cfg.n_coefficients * 4;
    let statics = mfcc_frames(sig, frame, cfg);
    if statics.len() < 3 {
        return vec![None; n];
    }
    let d1 = deltas(&statics, cfg.delta_width);
    let d2 = deltas(&d1, cfg.delta_width);
    let mut out = Vec::with_capacity(n);
    for block in [&statics, &d1, &d2] {
        for k in 0..cfg.n_coefficients {
            let series: Vec<f64> = block.iter().map(|f| f[k]).collect();
            out.extend(Moments::of(&series).expect("non-empty").to_vec());
        }
    }
    out
}
