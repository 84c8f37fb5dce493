//! Signal-processing primitives: framing, Hamming windowing, magnitude
//! spectra, mel filterbanks and the DCT-II.
//!
//! Everything in this module is a deterministic pure function over `f64`
//! buffers; identical inputs give bit-identical outputs within one build.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DspError {
    #[error("signal too short: {samples} samples, window needs {window}")]
    SignalTooShort { samples: usize, window: usize },
    #[error("degenerate mel filter {index}: adjacent centers collapse onto the same bin")]
    DegenerateFilter { index: usize },
}

/// Magnitude spectrum of one frame. Bins run from DC up to (exclusive)
/// Nyquist; `bin_hz` is `sample_rate / fft_len` where `fft_len` is the
/// zero-padded DFT length, fixed for all frames of a run.
#[derive(Debug, Clone)]
pub struct MagnitudeSpectrum {
    pub bins: Vec<f64>,
    pub bin_hz: f64,
}

impl MagnitudeSpectrum {
    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }
}

/// Window length in samples for a window given in seconds, round-half-up.
pub fn window_len(window_s: f64, sample_rate: u32) -> usize {
    (window_s * sample_rate as f64).round() as usize
}

/// Slice `samples` into frames of `window_s` seconds every `step_s` seconds.
/// Frame `i` covers samples `[i*step, i*step + w)`; a tail that would overrun
/// the signal is dropped, so every frame has exactly `w` samples.
pub fn frame_signal(
    samples: &[f64],
    sample_rate: u32,
    window_s: f64,
    step_s: f64,
) -> Result<Vec<Vec<f64>>, DspError> {
    assert!(
        step_s > 0.0 && step_s <= window_s,
        "require 0 < step_s <= window_s"
    );
    let w = window_len(window_s, sample_rate);
    let step = window_len(step_s, sample_rate).max(1);
    if samples.len() < w || w == 0 {
        return Err(DspError::SignalTooShort {
            samples: samples.len(),
            window: w,
        });
    }
    let count = (samples.len() - w) / step + 1;
    Ok((0..count)
        .map(|i| samples[i * step..i * step + w].to_vec())
        .collect())
}

/// Hamming window coefficients: `w[n] = 0.54 - 0.46*cos(2*pi*n/(W-1))`.
pub fn hamming_window(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    (0..len)
        .map(|n| 0.54 - 0.46 * (2.0 * PI * n as f64 / (len - 1) as f64).cos())
        .collect()
}

/// Apply a Hamming window to a frame.
pub fn hamming(frame: &[f64]) -> Vec<f64> {
    hamming_window(frame.len())
        .iter()
        .zip(frame)
        .map(|(w, x)| w * x)
        .collect()
}

fn next_pow_two(n: usize) -> usize {
    n.next_power_of_two()
}

/// Reusable FFT plan for frames of a fixed length. The frame is zero-padded
/// to the next power of two; all spectra of a run share one padded length.
pub struct SpectrumAnalyzer {
    fft: Arc<dyn Fft<f64>>,
    fft_len: usize,
    bin_hz: f64,
}

impl SpectrumAnalyzer {
    pub fn new(frame_len: usize, sample_rate: u32) -> Self {
        let fft_len = next_pow_two(frame_len.max(2));
        let fft = FftPlanner::new().plan_fft_forward(fft_len);
        SpectrumAnalyzer {
            fft,
            fft_len,
            bin_hz: sample_rate as f64 / fft_len as f64,
        }
    }

    pub fn fft_len(&self) -> usize {
        self.fft_len
    }

    /// Number of retained bins: DC through Nyquist-exclusive.
    pub fn n_bins(&self) -> usize {
        self.fft_len / 2
    }

    pub fn bin_hz(&self) -> f64 {
        self.bin_hz
    }

    pub fn magnitude(&self, frame: &[f64]) -> MagnitudeSpectrum {
        assert!(frame.len() <= self.fft_len, "frame longer than FFT plan");
        let mut buf: Vec<Complex<f64>> = frame
            .iter()
            .map(|&x| Complex::new(x, 0.0))
            .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
            .take(self.fft_len)
            .collect();
        self.fft.process(&mut buf);
        MagnitudeSpectrum {
            bins: buf[..self.fft_len / 2].iter().map(|c| c.norm()).collect(),
            bin_hz: self.bin_hz,
        }
    }
}

/// One-shot magnitude spectrum of a frame (plans an FFT per call; use
/// [`SpectrumAnalyzer`] when processing many frames).
pub fn magnitude_spectrum(frame: &[f64], sample_rate: u32) -> MagnitudeSpectrum {
    SpectrumAnalyzer::new(frame.len(), sample_rate).magnitude(frame)
}

/// Hz to mel: `2595 * log10(1 + f/700)`.
pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

/// Mel to Hz, inverse of [`hz_to_mel`].
pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular mel filterbank. Row `i` rises from center `i-1` to center `i`
/// and falls to center `i+1`; centers are equally spaced on the mel scale
/// between 0 Hz and Nyquist.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    /// `n_filters` rows of `n_bins` non-negative weights.
    pub weights: Vec<Vec<f64>>,
    /// Center frequency of each filter in Hz.
    pub centers_hz: Vec<f64>,
    pub n_bins: usize,
}

impl MelFilterbank {
    pub fn n_filters(&self) -> usize {
        self.weights.len()
    }

    /// Filter energies for a power spectrum (squared magnitudes).
    pub fn apply(&self, power: &[f64]) -> Vec<f64> {
        assert_eq!(power.len(), self.n_bins, "bin count mismatch");
        self.weights
            .iter()
            .map(|row| row.iter().zip(power).map(|(w, p)| w * p).sum())
            .collect()
    }
}

pub fn mel_filterbank(
    n_filters: usize,
    n_bins: usize,
    sample_rate: u32,
) -> Result<MelFilterbank, DspError> {
    assert!(n_filters >= 1, "n_filters must be >= 1");
    assert!(n_bins >= n_filters, "need n_bins >= n_filters");
    let nyquist = sample_rate as f64 / 2.0;
    let bin_hz = nyquist / n_bins as f64;
    let mel_max = hz_to_mel(nyquist);
    // n_filters + 2 edge points; filter i spans edges i..i+2 peaking at i+1.
    let edges: Vec<f64> = (0..n_filters + 2)
        .map(|i| mel_to_hz(mel_max * i as f64 / (n_filters + 1) as f64))
        .collect();

    let mut weights = Vec::with_capacity(n_filters);
    for i in 0..n_filters {
        let (lo, center, hi) = (edges[i], edges[i + 1], edges[i + 2]);
        let mut row = vec![0.0; n_bins];
        for (k, w) in row.iter_mut().enumerate() {
            let f = k as f64 * bin_hz;
            if f >= lo && f < center && center > lo {
                *w = (f - lo) / (center - lo);
            } else if f >= center && f <= hi && hi > center {
                *w = (hi - f) / (hi - center);
            }
        }
        if row.iter().sum::<f64>() <= 0.0 {
            return Err(DspError::DegenerateFilter { index: i });
        }
        weights.push(row);
    }
    Ok(MelFilterbank {
        weights,
        centers_hz: edges[1..=n_filters].to_vec(),
        n_bins,
    })
}

/// Orthonormal DCT-II keeping the first `n_out` coefficients:
/// `c[k] = s_k * sum_n v[n] * cos(pi*k*(2n+1)/(2N))` with `s_0 = sqrt(1/N)`
/// and `s_k = sqrt(2/N)` otherwise.
pub fn dct_ii(v: &[f64], n_out: usize) -> Vec<f64> {
    assert!(n_out <= v.len(), "n_out must not exceed input length");
    let n = v.len() as f64;
    (0..n_out)
        .map(|k| {
            let sum: f64 = v
                .iter()
                .enumerate()
                .map(|(i, &x)| x * (PI * k as f64 * (2 * i + 1) as f64 / (2.0 * n)).cos())
                .sum();
            let scale = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            scale * sum
        })
        .collect()
}
