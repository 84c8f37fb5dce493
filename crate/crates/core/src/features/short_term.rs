//! The 34 short-term features computed per windowed frame.
//!
//! All ratio-normalized features (zcr, entropies, centroid/spread, flux,
//! rolloff, chroma) are invariant to scaling the signal by any positive
//! gain; epsilon guards keep every value finite on silence.

use crate::dsp::{dct_ii, MagnitudeSpectrum, MelFilterbank};

use super::FeatureError;

/// Epsilon used in every log/ratio guard.
pub const GUARD_EPS: f64 = 1e-10;

/// Sub-blocks used by the energy and spectral entropies.
pub const ENTROPY_BLOCKS: usize = 10;

/// Power fraction for the spectral rolloff.
pub const ROLLOFF_FRACTION: f64 = 0.90;

/// Normalized count of sign changes, `sgn(0) = +1`; result in [0, 1].
pub fn zero_crossing_rate(frame: &[f64]) -> f64 {
    assert!(frame.len() >= 2, "zcr needs at least 2 samples");
    let sgn = |x: f64| -> f64 { if x >= 0.0 { 1.0 } else { -1.0 } };
    let sum: f64 = frame
        .windows(2)
        .map(|pair| (sgn(pair[1]) - sgn(pair[0])).abs())
        .sum();
    sum / (2.0 * (frame.len() - 1) as f64)
}

/// Mean squared amplitude of the frame.
pub fn short_term_energy(frame: &[f64]) -> f64 {
    frame.iter().map(|x| x * x).sum::<f64>() / frame.len() as f64
}

fn block_entropy(energies: &[f64]) -> f64 {
    let total: f64 = energies.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    -energies
        .iter()
        .map(|&e| {
            let frac = e / total;
            frac * (frac + GUARD_EPS).log2()
        })
        .sum::<f64>()
}

/// Shannon entropy of the energy distribution over `n_blocks` equal
/// sub-blocks of the frame (remainder samples truncated).
pub fn energy_entropy(frame: &[f64], n_blocks: usize) -> f64 {
    assert!(n_blocks >= 1 && frame.len() >= n_blocks);
    let block = frame.len() / n_blocks;
    let energies: Vec<f64> = (0..n_blocks)
        .map(|j| frame[j * block..(j + 1) * block].iter().map(|x| x * x).sum())
        .collect();
    block_entropy(&energies)
}

/// First and second moments of the magnitude spectrum over normalized bin
/// positions `(k+1)/K`. A zero spectrum yields (0, 0).
pub fn spectral_centroid_spread(spec: &MagnitudeSpectrum) -> (f64, f64) {
    let k_count = spec.bins.len() as f64;
    let total: f64 = spec.bins.iter().sum();
    if total <= 0.0 {
        return (0.0, 0.0);
    }
    let centroid = spec
        .bins
        .iter()
        .enumerate()
        .map(|(k, &x)| (k + 1) as f64 / k_count * x)
        .sum::<f64>()
        / total;
    let variance = spec
        .bins
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let p = (k + 1) as f64 / k_count;
            (p - centroid) * (p - centroid) * x
        })
        .sum::<f64>()
        / total;
    (centroid, variance.max(0.0).sqrt())
}

/// Entropy of spectral power grouped into `n_blocks` bands.
pub fn spectral_entropy(spec: &MagnitudeSpectrum, n_blocks: usize) -> f64 {
    assert!(n_blocks >= 1 && spec.bins.len() >= n_blocks);
    let block = spec.bins.len() / n_blocks;
    let energies: Vec<f64> = (0..n_blocks)
        .map(|j| {
            spec.bins[j * block..(j + 1) * block]
                .iter()
                .map(|x| x * x)
                .sum()
        })
        .collect();
    block_entropy(&energies)
}

/// Squared difference of sum-normalized spectra.
pub fn spectral_flux(
    spec: &MagnitudeSpectrum,
    prev: &MagnitudeSpectrum,
) -> Result<f64, FeatureError> {
    if spec.bins.len() != prev.bins.len() {
        return Err(FeatureError::BinCountMismatch {
            left: spec.bins.len(),
            right: prev.bins.len(),
        });
    }
    let sum_x: f64 = spec.bins.iter().sum();
    let sum_p: f64 = prev.bins.iter().sum();
    Ok(spec
        .bins
        .iter()
        .zip(&prev.bins)
        .map(|(&x, &p)| {
            let nx = if sum_x > 0.0 { x / sum_x } else { 0.0 };
            let np = if sum_p > 0.0 { p / sum_p } else { 0.0 };
            (nx - np) * (nx - np)
        })
        .sum())
}

/// Normalized frequency below which `c` of the spectral power lies.
pub fn spectral_rolloff(spec: &MagnitudeSpectrum, c: f64) -> f64 {
    assert!(c > 0.0 && c < 1.0);
    let total: f64 = spec.bins.iter().map(|x| x * x).sum();
    if total <= 0.0 {
        return 0.0;
    }
    let threshold = c * total;
    let mut cumulative = 0.0;
    for (m, &x) in spec.bins.iter().enumerate() {
        cumulative += x * x;
        if cumulative >= threshold {
            return m as f64 / spec.bins.len() as f64;
        }
    }
    1.0
}

/// Mel-frequency cepstral coefficients: DCT-II of log mel-filter energies.
pub fn mfcc(
    spec: &MagnitudeSpectrum,
    filterbank: &MelFilterbank,
    n_coeffs: usize,
) -> Result<Vec<f64>, FeatureError> {
    if spec.bins.len() != filterbank.n_bins {
        return Err(FeatureError::BinCountMismatch {
            left: spec.bins.len(),
            right: filterbank.n_bins,
        });
    }
    let power: Vec<f64> = spec.bins.iter().map(|x| x * x).collect();
    let log_energies: Vec<f64> = filterbank
        .apply(&power)
        .iter()
        .map(|&e| (e + GUARD_EPS).ln())
        .collect();
    Ok(dct_ii(&log_energies, n_coeffs))
}

/// Spectral power folded onto the 12 equal-tempered pitch classes
/// (class 0 = A, anchored at 440 Hz), normalized to sum 1, plus the
/// population standard deviation of the 12 values.
pub fn chroma(spec: &MagnitudeSpectrum) -> ([f64; 12], f64) {
    let mut classes = [0.0f64; 12];
    let mut total = 0.0;
    for (k, &x) in spec.bins.iter().enumerate().skip(1) {
        let freq = k as f64 * spec.bin_hz;
        let class = ((12.0 * (freq / 440.0).log2()).round() as i64).rem_euclid(12) as usize;
        let power = x * x;
        classes[class] += power;
        total += power;
    }
    if total <= 0.0 {
        return ([0.0; 12], 0.0);
    }
    for c in classes.iter_mut() {
        *c /= total;
    }
    let mean = classes.iter().sum::<f64>() / 12.0;
    let var = classes.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / 12.0;
    (classes, var.sqrt())
}
