//! Synthetic stand-in corpus: 10 "classical-like" and 10 "metal-like" clips
//! plus a manifest, byte-identical for a given seed.
//!
//! Classical clips are sums of a few low/mid-frequency harmonics under a slow
//! amplitude envelope with a tiny noise floor. Metal clips mix broadband
//! noise with distorted square-wave partials, gated fast for rapid spectral
//! flux and pulsed on a beat grid.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{save_manifest, write_wav_16bit, AudioError, DatasetManifest};

pub const CORPUS_SAMPLE_RATE: u32 = 22050;
pub const CLIP_SECONDS: f64 = 10.0;
const FILES_PER_CLASS: usize = 10;

fn classical_clip(rng: &mut ChaCha8Rng, n_samples: usize, sr: f64) -> Vec<f64> {
    let n_harm = rng.random_range(3..=5usize);
    let f0 = rng.random_range(196.0..523.0);
    let phases: Vec<f64> = (0..n_harm).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
    let amps: Vec<f64> = (1..=n_harm).map(|h| (h as f64).powf(-1.3)).collect();
    let amp_sum: f64 = amps.iter().sum();
    let gain = 0.45 / amp_sum;
    let env_freq = rng.random_range(0.1..0.3);
    let env_phase = rng.random_range(0.0..2.0 * PI);

    (0..n_samples)
        .map(|i| {
            let t = i as f64 / sr;
            let env = 0.3 + 0.35 * (1.0 + (2.0 * PI * env_freq * t + env_phase).sin());
            let tone: f64 = (0..n_harm)
                .map(|h| amps[h] * (2.0 * PI * f0 * (h + 1) as f64 * t + phases[h]).sin())
                .sum();
            let noise = 0.0005 * (rng.random::<f64>() * 2.0 - 1.0);
            env * gain * tone + noise
        })
        .collect()
}

fn metal_clip(rng: &mut ChaCha8Rng, n_samples: usize, sr: f64) -> Vec<f64> {
    let f0 = rng.random_range(82.0..165.0);
    let phase_a = rng.random_range(0.0..2.0 * PI);
    let phase_b = rng.random_range(0.0..2.0 * PI);
    let gate_freq = rng.random_range(9.0..15.0);
    let gate_phase = rng.random_range(0.0..2.0 * PI);
    let beat_period = [0.5, 60.0 / 140.0, 0.375][rng.random_range(0..3usize)];

    (0..n_samples)
        .map(|i| {
            let t = i as f64 / sr;
            let sq_a = (2.0 * PI * f0 * t + phase_a).sin().signum();
            let sq_b = (2.0 * PI * 1.5 * f0 * t + phase_b).sin().signum();
            let body = (2.5 * (0.6 * sq_a + 0.4 * sq_b)).tanh() * 0.55;
            let noise = 0.35 * (rng.random::<f64>() * 2.0 - 1.0);
            let gate_fast = if (2.0 * PI * gate_freq * t + gate_phase).sin() > -0.3 {
                1.0
            } else {
                0.2
            };
            let gate_beat = if (t / beat_period).fract() < 0.62 { 1.0 } else { 0.35 };
            let floor = 0.003 * (rng.random::<f64>() * 2.0 - 1.0);
            (body + noise) * gate_fast * gate_beat + floor
        })
        .collect()
}

/// Write the 20-file synthetic corpus and its manifest into `out_dir`.
/// Returns the manifest and the path of the written manifest CSV.
pub fn synthesize_corpus<P: AsRef<Path>>(
    out_dir: P,
    seed: u64,
) -> Result<(DatasetManifest, PathBuf), AudioError> {
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir)?;
    let sr = CORPUS_SAMPLE_RATE;
    let n_samples = (CLIP_SECONDS * sr as f64) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut entries = Vec::with_capacity(2 * FILES_PER_CLASS);
    for class in ["classical", "metal"] {
        for i in 0..FILES_PER_CLASS {
            let samples = match class {
                "classical" => classical_clip(&mut rng, n_samples, sr as f64),
                _ => metal_clip(&mut rng, n_samples, sr as f64),
            };
            let name = format!("{class}_{i:02}.wav");
            write_wav_16bit(out_dir.join(&name), &samples, sr)?;
            entries.push((name, class.to_string()));
        }
    }

    let manifest = DatasetManifest::new(entries);
    let manifest_path = out_dir.join("manifest.csv");
    save_manifest(&manifest, &manifest_path)?;
    Ok((manifest, manifest_path))
}
