use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::error::{Error, Result};

/// Mono samples in `[-1, 1]` at a fixed rate.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioSignal {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

impl AudioSignal {
    pub fn new(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidArgument("sample rate must be positive".into()));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::data("audio contains non-finite samples"));
        }
        Ok(AudioSignal { samples, sample_rate })
    }

    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn ms_to_sample(&self, ms: u64) -> usize {
        ((ms as u128 * self.sample_rate as u128) / 1000) as usize
    }

    /// Concatenate the given `(start_ms, end_ms)` spans, clipped to the
    /// signal.
    pub fn restrict(&self, spans: &[(u64, u64)]) -> AudioSignal {
        let mut samples = Vec::new();
        for &(s, e) in spans {
            let a = self.ms_to_sample(s).min(self.samples.len());
            let b = self.ms_to_sample(e).min(self.samples.len());
            samples.extend_from_slice(&self.samples[a..b.max(a)]);
        }
        AudioSignal {
            samples,
            sample_rate: self.sample_rate,
        }
    }
}

fn unsupported(e: hound::Error) -> Error {
    match e {
        hound::Error::Unsupported => Error::UnsupportedAudio("compressed or non-PCM WAV".into()),
        hound::Error::FormatError(m) => Error::UnsupportedAudio(m.to_string()),
        other => Error::Wav(other),
    }
}

/// Read integer PCM (8 to 32 bit) or 32-bit float WAV. Stereo and wider
/// files are averaged down to mono.
pub fn read_wav(path: &Path) -> Result<AudioSignal> {
    let mut reader = WavReader::open(path).map_err(unsupported)?;
    let spec = reader.spec();
    let channels = spec.channels.max(1) as usize;
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(unsupported)?,
        (SampleFormat::Int, bits @ 8..=32) => {
            let scale = (1u64 << (bits - 1)) as f64;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f64 / scale))
                .collect::<std::result::Result<_, _>>()
                .map_err(unsupported)?
        }
        (fmt, bits) => {
            return Err(Error::UnsupportedAudio(format!("{bits}-bit {fmt:?} samples")));
        }
    };
    let samples = interleaved
        .chunks(channels)
        .map(|frame| frame.iter().sum::<f64>() / frame.len() as f64)
        .collect();
    AudioSignal::new(samples, spec.sample_rate)
}

/// Write 16-bit mono PCM. Samples are clipped to `[-1, 1]`.
pub fn write_wav(path: &Path, signal: &AudioSignal) -> Result<()> {
    let spec = WavSpec {
        channels: 1,
        sample_rate: signal.sample_rate,
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut writer = WavWriter::create(path, spec)?;
    for &x in &signal.samples {
        writer.write_sample(quantize16(x))?;
    }
    writer.finalize()?;
    Ok(())
}

/// The 16-bit code `write_wav` stores for a sample.
pub fn quantize16(x: f64) -> i16 {
    (x.clamp(-1.0, 1.0) * 32767.0).round() as i16
}
