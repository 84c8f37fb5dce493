//! Per-file feature extraction: 34 short-term features and their deltas per
//! frame, mid-term mean/std aggregation, and the beat pair, yielding the
//! canonical 138-dimensional vector per audio file.

mod csv;
pub mod short_term;

pub use csv::{read_features_csv, write_features_csv};

use std::path::Path;

use thiserror::Error;

use crate::audio_io::{AudioClip, AudioError, DatasetManifest};
use crate::dataset::Dataset;
use crate::dsp::{self, DspError, SpectrumAnalyzer};

pub const BASE_FEATURE_COUNT: usize = 34;
pub const SHORT_TERM_COUNT: usize = 68;
pub const FEATURE_COUNT: usize = 138;
pub const N_MFCC: usize = 13;

/// Row indices into the base feature block.
pub const ROW_ENERGY: usize = 1;
pub const ROW_SPECTRAL_FLUX: usize = 6;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("signal too short: {samples} samples at {sample_rate} Hz, need {needed}")]
    SignalTooShort {
        samples: usize,
        sample_rate: u32,
        needed: usize,
    },
    #[error("bin count mismatch: {left} vs {right}")]
    BinCountMismatch { left: usize, right: usize },
    #[error("window of {samples} samples is too small; need at least {needed}")]
    WindowTooSmall { samples: usize, needed: usize },
    #[error("filterbank construction failed: {0}")]
    Filterbank(#[from] DspError),
    #[error(transparent)]
    Audio(#[from] AudioError),
    #[error("non-finite value for feature `{feature}` of {path}")]
    NonFinite { feature: String, path: String },
    #[error("malformed feature CSV line {line}: {detail}")]
    MalformedCsv { line: usize, detail: String },
    #[error("feature CSV has no data rows")]
    EmptyCsv,
}

/// Extraction parameters. Frame lengths are in seconds so features stay
/// comparable across sample rates.
#[derive(Debug, Clone)]
pub struct FeatureConfig {
    pub window_s: f64,
    pub step_s: f64,
    pub mt_window_s: f64,
    pub mt_step_s: f64,
    pub n_mel_filters: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            window_s: 0.050,
            step_s: 0.025,
            mt_window_s: 1.0,
            mt_step_s: 1.0,
            n_mel_filters: 26,
        }
    }
}

/// Canonical names of the 34 base short-term features, in row order.
pub fn base_feature_names() -> Vec<String> {
    let mut names: Vec<String> = [
        "zcr",
        "energy",
        "energy_entropy",
        "spectral_centroid",
        "spectral_spread",
        "spectral_entropy",
        "spectral_flux",
        "spectral_rolloff",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for i in 1..=N_MFCC {
        names.push(format!("mfcc_{i}"));
    }
    for i in 1..=12 {
        names.push(format!("chroma_{i}"));
    }
    names.push("chroma_std".to_string());
    debug_assert_eq!(names.len(), BASE_FEATURE_COUNT);
    names
}

/// The 68 short-term row names: the 34 base names then `delta_`-prefixed.
pub fn short_term_names() -> Vec<String> {
    let base = base_feature_names();
    let mut names = base.clone();
    names.extend(base.iter().map(|n| format!("delta_{n}")));
    names
}

/// The canonical 138 per-file feature names: 68 `_mean`, 68 `_std`,
/// then `beat` and `beat_conf`.
pub fn feature_names() -> Vec<String> {
    let st = short_term_names();
    let mut names: Vec<String> = st.iter().map(|n| format!("{n}_mean")).collect();
    names.extend(st.iter().map(|n| format!("{n}_std")));
    names.push("beat".to_string());
    names.push("beat_conf".to_string());
    debug_assert_eq!(names.len(), FEATURE_COUNT);
    names
}

/// 68 feature series (34 base + 34 first-difference deltas), one column per
/// frame.
#[derive(Debug, Clone)]
pub struct ShortTermMatrix {
    pub rows: Vec<Vec<f64>>,
    pub row_names: Vec<String>,
    /// Seconds between successive frames.
    pub frame_step_s: f64,
}

impl ShortTermMatrix {
    pub fn n_frames(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }
}

/// The 138 per-file feature values with their canonical names.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub names: Vec<String>,
}

/// Compute the 68-row short-term matrix for one clip.
pub fn short_term_features(
    clip: &AudioClip,
    config: &FeatureConfig,
) -> Result<ShortTermMatrix, FeatureError> {
    let too_short = |needed: usize| FeatureError::SignalTooShort {
        samples: clip.samples.len(),
        sample_rate: clip.sample_rate,
        needed,
    };
    let window = dsp::window_len(config.window_s, clip.sample_rate);
    let step = dsp::window_len(config.step_s, clip.sample_rate);
    // 64 samples keeps every sub-block and bin-count precondition satisfied.
    if window < 64 {
        return Err(FeatureError::WindowTooSmall {
            samples: window,
            needed: 64,
        });
    }
    let frames = dsp::frame_signal(&clip.samples, clip.sample_rate, config.window_s, config.step_s)
        .map_err(|_| too_short(window))?;
    if frames.len() < 2 {
        return Err(too_short(window + step));
    }

    let analyzer = SpectrumAnalyzer::new(window, clip.sample_rate);
    let filterbank = dsp::mel_filterbank(config.n_mel_filters, analyzer.n_bins(), clip.sample_rate)?;

    let n_frames = frames.len();
    let mut rows = vec![vec![0.0; n_frames]; SHORT_TERM_COUNT];
    let mut prev_spec = None;
    for (t, frame) in frames.iter().enumerate() {
        let windowed = dsp::hamming(frame);
        let spec = analyzer.magnitude(&windowed);

        rows[0][t] = short_term::zero_crossing_rate(&windowed);
        rows[ROW_ENERGY][t] = short_term::short_term_energy(&windowed);
        rows[2][t] = short_term::energy_entropy(&windowed, short_term::ENTROPY_BLOCKS);
        let (centroid, spread) = short_term::spectral_centroid_spread(&spec);
        rows[3][t] = centroid;
        rows[4][t] = spread;
        rows[5][t] = short_term::spectral_entropy(&spec, short_term::ENTROPY_BLOCKS);
        rows[ROW_SPECTRAL_FLUX][t] =
            short_term::spectral_flux(&spec, prev_spec.as_ref().unwrap_or(&spec))?;
        rows[7][t] = short_term::spectral_rolloff(&spec, short_term::ROLLOFF_FRACTION);
        let coeffs = short_term::mfcc(&spec, &filterbank, N_MFCC)?;
        for (i, c) in coeffs.into_iter().enumerate() {
            rows[8 + i][t] = c;
        }
        let (classes, chroma_std) = short_term::chroma(&spec);
        for (i, c) in classes.into_iter().enumerate() {
            rows[21 + i][t] = c;
        }
        rows[33][t] = chroma_std;

        prev_spec = Some(spec);
    }

    // Delta rows: first differences with a zero-filled first column.
    for base in 0..BASE_FEATURE_COUNT {
        for t in 1..n_frames {
            rows[BASE_FEATURE_COUNT + base][t] = rows[base][t] - rows[base][t - 1];
        }
    }

    Ok(ShortTermMatrix {
        rows,
        row_names: short_term_names(),
        frame_step_s: config.step_s,
    })
}

/// Mid-term statistics: frames are grouped into windows of `mt_window_s`
/// every `mt_step_s`; the per-window mean and population std of each row are
/// averaged over all windows, yielding 68 means then 68 stds.
pub fn mid_term_stats(
    st: &ShortTermMatrix,
    mt_window_s: f64,
    mt_step_s: f64,
) -> Result<Vec<f64>, FeatureError> {
    let n_frames = st.n_frames();
    if n_frames == 0 {
        return Err(FeatureError::SignalTooShort {
            samples: 0,
            sample_rate: 0,
            needed: 1,
        });
    }
    let per_window = ((mt_window_s / st.frame_step_s).round() as usize).max(1);
    let step = ((mt_step_s / st.frame_step_s).round() as usize).max(1);

    let mut window_bounds = Vec::new();
    let mut start = 0;
    while start < n_frames {
        window_bounds.push((start, (start + per_window).min(n_frames)));
        start += step;
    }
    let n_windows = window_bounds.len() as f64;

    let mut means = vec![0.0; SHORT_TERM_COUNT];
    let mut stds = vec![0.0; SHORT_TERM_COUNT];
    for (row_idx, row) in st.rows.iter().enumerate() {
        for &(lo, hi) in &window_bounds {
            let slice = &row[lo..hi];
            let len = slice.len() as f64;
            let mean = slice.iter().sum::<f64>() / len;
            let var = slice.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / len;
            means[row_idx] += mean;
            stds[row_idx] += var.max(0.0).sqrt();
        }
        means[row_idx] /= n_windows;
        stds[row_idx] /= n_windows;
    }

    let mut out = means;
    out.extend(stds);
    Ok(out)
}

/// Tempo estimate from the onset envelope (positive part of the summed
/// delta-flux and delta-energy rows), autocorrelated over lags spanning
/// 60-200 BPM. Returns (BPM, confidence in [0, 1]); silence gives (0, 0).
pub fn beat_features(st: &ShortTermMatrix) -> Result<(f64, f64), FeatureError> {
    let n_frames = st.n_frames();
    if n_frames < 64 {
        return Err(FeatureError::SignalTooShort {
            samples: n_frames,
            sample_rate: 0,
            needed: 64,
        });
    }
    let d_flux = &st.rows[BASE_FEATURE_COUNT + ROW_SPECTRAL_FLUX];
    let d_energy = &st.rows[BASE_FEATURE_COUNT + ROW_ENERGY];
    let envelope: Vec<f64> = d_flux
        .iter()
        .zip(d_energy)
        .map(|(f, e)| (f + e).max(0.0))
        .collect();

    let at_lag_zero: f64 = envelope.iter().map(|v| v * v).sum();
    if at_lag_zero <= 0.0 {
        return Ok((0.0, 0.0));
    }

    let step = st.frame_step_s;
    let lag_min = ((60.0 / (200.0 * step)).ceil() as usize).max(1);
    let lag_max = ((60.0 / (60.0 * step)).floor() as usize).min(n_frames - 1);
    if lag_min > lag_max {
        return Ok((0.0, 0.0));
    }

    let mut best_lag = lag_min;
    let mut best_val = f64::NEG_INFINITY;
    for lag in lag_min..=lag_max {
        let r: f64 = (lag..n_frames)
            .map(|t| envelope[t] * envelope[t - lag])
            .sum();
        if r > best_val {
            best_val = r;
            best_lag = lag;
        }
    }
    if best_val <= 0.0 {
        return Ok((0.0, 0.0));
    }

    let bpm = 60.0 / (best_lag as f64 * step);
    let confidence = (best_val / at_lag_zero).clamp(0.0, 1.0);
    Ok((bpm, confidence))
}

/// Extract the canonical 138-value feature vector for one clip.
pub fn extract_file_features(
    clip: &AudioClip,
    config: &FeatureConfig,
) -> Result<FeatureVector, FeatureError> {
    let st = short_term_features(clip, config)?;
    let mut values = mid_term_stats(&st, config.mt_window_s, config.mt_step_s)?;
    let (beat, beat_conf) = beat_features(&st)?;
    values.push(beat);
    values.push(beat_conf);

    let names = feature_names();
    debug_assert_eq!(values.len(), FEATURE_COUNT);
    if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
        return Err(FeatureError::NonFinite {
            feature: names[idx].clone(),
            path: clip.source_path.clone(),
        });
    }
    Ok(FeatureVector { values, names })
}

/// Extract features for every manifest entry into a [`Dataset`].
///
/// `threads` caps data parallelism across files: 0 uses the default rayon
/// pool width, 1 runs serially. Parallel runs produce bit-identical results
/// to serial ones (per-file work is pure; row order follows the manifest).
pub fn extract_dataset(
    manifest: &DatasetManifest,
    manifest_path: &Path,
    config: &FeatureConfig,
    threads: usize,
) -> Result<Dataset, FeatureError> {
    use rayon::prelude::*;

    let paths = manifest.resolved_paths(manifest_path);
    let extract_one = |path: &std::path::PathBuf| -> Result<Vec<f64>, FeatureError> {
        let clip = crate::audio_io::load_wav(path)?;
        Ok(extract_file_features(&clip, config)?.values)
    };

    let rows: Result<Vec<Vec<f64>>, FeatureError> = if threads == 1 {
        paths.iter().map(extract_one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("rayon pool");
        pool.install(|| paths.par_iter().map(extract_one).collect())
    };

    Ok(Dataset {
        x: rows?,
        y: manifest.label_indices(),
        class_names: manifest.class_names.clone(),
        feature_names: feature_names(),
        paths: manifest.entries.iter().map(|(p, _)| p.clone()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone_clip(freq: f64, seconds: f64, sr: u32, amp: f64) -> AudioClip {
        let n = (seconds * sr as f64) as usize;
        AudioClip {
            samples: (0..n)
                .map(|i| amp * (2.0 * std::f64::consts::PI * freq * i as f64 / sr as f64).sin())
                .collect(),
            sample_rate: sr,
            source_path: "tone".to_string(),
        }
    }

    fn silence_clip(seconds: f64, sr: u32) -> AudioClip {
        AudioClip {
            samples: vec![0.0; (seconds * sr as f64) as usize],
            sample_rate: sr,
            source_path: "silence".to_string(),
        }
    }

    #[test]
    fn short_term_matrix_has_68_rows() {
        let clip = tone_clip(440.0, 2.0, 22050, 0.5);
        let st = short_term_features(&clip, &FeatureConfig::default()).unwrap();
        assert_eq!(st.rows.len(), 68);
        assert_eq!(st.row_names.len(), 68);
        assert_eq!(st.row_names[0], "zcr");
        assert_eq!(st.row_names[34], "delta_zcr");
        assert!(st.n_frames() >= 2);
    }

    #[test]
    fn deltas_of_constant_rows_are_zero_and_telescope() {
        let clip = tone_clip(330.0, 2.0, 22050, 0.4);
        let st = short_term_features(&clip, &FeatureConfig::default()).unwrap();
        for base in 0..BASE_FEATURE_COUNT {
            let delta = &st.rows[BASE_FEATURE_COUNT + base];
            assert_eq!(delta[0], 0.0);
            let sum: f64 = delta.iter().sum();
            let b = &st.rows[base];
            assert!(
                (sum - (b[b.len() - 1] - b[0])).abs() < 1e-9,
                "telescoping failed for row {base}"
            );
        }
    }

    #[test]
    fn too_short_clip_is_rejected() {
        let clip = silence_clip(0.01, 22050);
        assert!(matches!(
            short_term_features(&clip, &FeatureConfig::default()),
            Err(FeatureError::SignalTooShort { .. })
        ));
    }

    #[test]
    fn sub_millisecond_window_is_rejected() {
        let clip = tone_clip(440.0, 1.0, 22050, 0.5);
        let cfg = FeatureConfig {
            window_s: 0.001,
            step_s: 0.001,
            ..FeatureConfig::default()
        };
        assert!(matches!(
            short_term_features(&clip, &cfg),
            Err(FeatureError::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn mid_term_single_window_equals_direct_stats() {
        let rows: Vec<Vec<f64>> = (0..SHORT_TERM_COUNT)
            .map(|r| (0..10).map(|t| (r * 10 + t) as f64 * 0.1).collect())
            .collect();
        let st = ShortTermMatrix {
            rows: rows.clone(),
            row_names: short_term_names(),
            frame_step_s: 0.1,
        };
        // One mid-term window covering all 10 frames.
        let out = mid_term_stats(&st, 1.0, 1.0).unwrap();
        for r in 0..SHORT_TERM_COUNT {
            let mean = rows[r].iter().sum::<f64>() / 10.0;
            let var = rows[r].iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 10.0;
            assert!((out[r] - mean).abs() < 1e-12);
            assert!((out[SHORT_TERM_COUNT + r] - var.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn mid_term_constant_row_gives_zero_std() {
        let mut rows = vec![vec![0.0; 8]; SHORT_TERM_COUNT];
        rows[5] = vec![3.5; 8];
        let st = ShortTermMatrix {
            rows,
            row_names: short_term_names(),
            frame_step_s: 0.25,
        };
        let out = mid_term_stats(&st, 1.0, 1.0).unwrap();
        assert_eq!(out[5], 3.5);
        assert_eq!(out[SHORT_TERM_COUNT + 5], 0.0);
    }

    #[test]
    fn mid_term_two_windows_average_their_means() {
        // frame_step 0.25 s, mt window 1.0 s -> 4 frames per window, 8 frames
        // -> exactly two windows.
        let mut rows = vec![vec![0.0; 8]; SHORT_TERM_COUNT];
        rows[0] = vec![1.0, 2.0, 3.0, 4.0, 10.0, 20.0, 30.0, 40.0];
        let st = ShortTermMatrix {
            rows,
            row_names: short_term_names(),
            frame_step_s: 0.25,
        };
        let out = mid_term_stats(&st, 1.0, 1.0).unwrap();
        let w1 = (1.0 + 2.0 + 3.0 + 4.0) / 4.0;
        let w2 = (10.0 + 20.0 + 30.0 + 40.0) / 4.0;
        assert!((out[0] - (w1 + w2) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn beat_of_silence_is_degenerate() {
        let clip = silence_clip(3.0, 22050);
        let st = short_term_features(&clip, &FeatureConfig::default()).unwrap();
        assert_eq!(beat_features(&st).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn beat_of_click_track_is_120_bpm() {
        let sr = 22050u32;
        let n = 10 * sr as usize;
        let mut samples = vec![0.0f64; n];
        let period = sr as usize / 2; // one click every 0.5 s = 120 BPM
        let mut pos = 0;
        while pos < n {
            for s in samples.iter_mut().skip(pos).take(30) {
                *s = 0.9;
            }
            pos += period;
        }
        let clip = AudioClip {
            samples,
            sample_rate: sr,
            source_path: "clicks".to_string(),
        };
        let st = short_term_features(&clip, &FeatureConfig::default()).unwrap();
        let (bpm, conf) = beat_features(&st).unwrap();
        assert!((bpm - 120.0).abs() <= 3.0, "got {bpm} BPM");
        assert!((0.0..=1.0).contains(&conf));
        assert!(conf > 0.0);
    }

    #[test]
    fn beat_requires_64_frames() {
        let clip = silence_clip(0.5, 22050);
        let st = short_term_features(&clip, &FeatureConfig::default()).unwrap();
        assert!(matches!(
            beat_features(&st),
            Err(FeatureError::SignalTooShort { .. })
        ));
    }

    #[test]
    fn file_features_have_canonical_layout() {
        let clip = tone_clip(440.0, 2.0, 22050, 0.5);
        let fv = extract_file_features(&clip, &FeatureConfig::default()).unwrap();
        assert_eq!(fv.values.len(), FEATURE_COUNT);
        assert_eq!(fv.names.len(), FEATURE_COUNT);
        assert_eq!(fv.names[2], "energy_entropy_mean");
        assert_eq!(fv.names[3], "spectral_centroid_mean");
        assert_eq!(fv.names[34], "delta_zcr_mean");
        assert_eq!(fv.names[68], "zcr_std");
        assert_eq!(fv.names[136], "beat");
        assert_eq!(fv.names[137], "beat_conf");
        assert!(fv.values.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn identical_clips_give_identical_vectors() {
        let a = tone_clip(523.25, 2.0, 22050, 0.41);
        let b = tone_clip(523.25, 2.0, 22050, 0.41);
        let fa = extract_file_features(&a, &FeatureConfig::default()).unwrap();
        let fb = extract_file_features(&b, &FeatureConfig::default()).unwrap();
        assert_eq!(fa.values, fb.values);
    }

    #[test]
    fn chroma_of_440_tone_peaks_at_class_a_through_pipeline() {
        let clip = tone_clip(440.0, 2.0, 22050, 0.5);
        let st = short_term_features(&clip, &FeatureConfig::default()).unwrap();
        // chroma_1 (class A) occupies row 21; take its per-frame mean.
        let chroma_rows: Vec<f64> = (0..12)
            .map(|c| st.rows[21 + c].iter().sum::<f64>() / st.n_frames() as f64)
            .collect();
        let argmax = chroma_rows
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(argmax, 0);
        assert!(chroma_rows[0] >= 0.5);
    }
}
