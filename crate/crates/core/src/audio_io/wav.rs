//! RIFF/WAVE decoding and 16-bit PCM encoding.
//!
//! Supported inputs: fmt codes 1 (integer PCM, 16-bit) and 3 (IEEE float,
//! 32-bit), 1 or 2 channels. Stereo is mixed down by the arithmetic mean of
//! the two channels; 16-bit samples are normalized by 32768 so the integer
//! range maps into [-1, 1).

use std::fs;
use std::path::Path;

use super::AudioError;

/// Decoded mono audio: normalized samples plus the header sample rate.
#[derive(Debug, Clone)]
pub struct AudioClip {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
    pub source_path: String,
}

impl AudioClip {
    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}

fn u16_le(b: &[u8]) -> u16 {
    u16::from_le_bytes([b[0], b[1]])
}

fn u32_le(b: &[u8]) -> u32 {
    u32::from_le_bytes([b[0], b[1], b[2], b[3]])
}

struct FmtChunk {
    format: u16,
    channels: u16,
    sample_rate: u32,
    bits_per_sample: u16,
}

pub fn load_wav<P: AsRef<Path>>(path: P) -> Result<AudioClip, AudioError> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(AudioError::MissingFile(path.to_path_buf()));
    }
    let bytes = fs::read(path)?;
    let malformed = |detail: &str| AudioError::MalformedHeader {
        path: path.to_path_buf(),
        detail: detail.to_string(),
    };
    let unsupported = |detail: String| AudioError::UnsupportedEncoding {
        path: path.to_path_buf(),
        detail,
    };

    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(malformed("not a RIFF/WAVE file"));
    }

    let mut fmt: Option<FmtChunk> = None;
    let mut data: Option<&[u8]> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_le(&bytes[pos + 4..pos + 8]) as usize;
        let body_start = pos + 8;
        let body_end = body_start.checked_add(size).ok_or_else(|| malformed("chunk size overflow"))?;
        if body_end > bytes.len() {
            return Err(malformed("chunk extends past end of file"));
        }
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => {
                if body.len() < 16 {
                    return Err(malformed("fmt chunk too short"));
                }
                fmt = Some(FmtChunk {
                    format: u16_le(&body[0..2]),
                    channels: u16_le(&body[2..4]),
                    sample_rate: u32_le(&body[4..8]),
                    bits_per_sample: u16_le(&body[14..16]),
                });
            }
            b"data" => data = Some(body),
            _ => {}
        }
        // Chunks are word-aligned: odd sizes carry one pad byte.
        pos = body_end + (size & 1);
    }

    let fmt = fmt.ok_or_else(|| malformed("missing fmt chunk"))?;
    let data = data.ok_or_else(|| malformed("missing data chunk"))?;

    if fmt.sample_rate == 0 {
        return Err(malformed("zero sample rate"));
    }
    if fmt.channels == 0 || fmt.channels > 2 {
        return Err(unsupported(format!("{} channels", fmt.channels)));
    }
    let channels = fmt.channels as usize;

    let interleaved: Vec<f64> = match (fmt.format, fmt.bits_per_sample) {
        (1, 16) => data
            .chunks_exact(2)
            .map(|b| i16::from_le_bytes([b[0], b[1]]) as f64 / 32768.0)
            .collect(),
        (3, 32) => data
            .chunks_exact(4)
            .map(|b| (f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64).clamp(-1.0, 1.0))
            .collect(),
        (fmt_code, bits) => {
            return Err(unsupported(format!("format code {fmt_code}, {bits}-bit")));
        }
    };

    if interleaved.len() < channels {
        return Err(AudioError::EmptyAudio {
            path: path.to_path_buf(),
        });
    }

    let samples: Vec<f64> = if channels == 1 {
        interleaved
    } else {
        interleaved
            .chunks_exact(2)
            .map(|pair| (pair[0] + pair[1]) / 2.0)
            .collect()
    };

    if samples.is_empty() {
        return Err(AudioError::EmptyAudio {
            path: path.to_path_buf(),
        });
    }

    Ok(AudioClip {
        samples,
        sample_rate: fmt.sample_rate,
        source_path: path.display().to_string(),
    })
}

/// Encode mono samples as a 16-bit PCM WAV file. Samples are clamped to
/// [-1, 1] and scaled by 32768 (the +1.0 endpoint saturates at 32767).
pub fn write_wav_16bit<P: AsRef<Path>>(
    path: P,
    samples: &[f64],
    sample_rate: u32,
) -> Result<(), AudioError> {
    let data_len = (samples.len() * 2) as u32;
    let mut out = Vec::with_capacity(44 + samples.len() * 2);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&(sample_rate * 2).to_le_bytes()); // byte rate
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes()); // bits per sample
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &s in samples {
        let v = (s.clamp(-1.0, 1.0) * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        out.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path.as_ref(), out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn raw_wav(format: u16, channels: u16, rate: u32, bits: u16, data: &[u8]) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"RIFF");
        out.extend_from_slice(&(36 + data.len() as u32).to_le_bytes());
        out.extend_from_slice(b"WAVE");
        out.extend_from_slice(b"fmt ");
        out.extend_from_slice(&16u32.to_le_bytes());
        out.extend_from_slice(&format.to_le_bytes());
        out.extend_from_slice(&channels.to_le_bytes());
        out.extend_from_slice(&rate.to_le_bytes());
        let block = channels as u32 * bits as u32 / 8;
        out.extend_from_slice(&(rate * block).to_le_bytes());
        out.extend_from_slice(&(block as u16).to_le_bytes());
        out.extend_from_slice(&bits.to_le_bytes());
        out.extend_from_slice(b"data");
        out.extend_from_slice(&(data.len() as u32).to_le_bytes());
        out.extend_from_slice(data);
        out
    }

    fn write_tmp(bytes: &[u8]) -> tempfile::TempPath {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(bytes).unwrap();
        f.into_temp_path()
    }

    #[test]
    fn max_positive_16bit_sample() {
        let bytes = raw_wav(1, 1, 22050, 16, &32767i16.to_le_bytes());
        let path = write_tmp(&bytes);
        let clip = load_wav(&path).unwrap();
        assert_eq!(clip.samples.len(), 1);
        assert!((clip.samples[0] - 32767.0 / 32768.0).abs() < 1e-12);
        assert_eq!(clip.sample_rate, 22050);
    }

    #[test]
    fn stereo_averages_to_mono() {
        // One frame: +0.5 on the left, -0.5 on the right.
        let mut data = Vec::new();
        data.extend_from_slice(&16384i16.to_le_bytes());
        data.extend_from_slice(&(-16384i16).to_le_bytes());
        let path = write_tmp(&raw_wav(1, 2, 44100, 16, &data));
        let clip = load_wav(&path).unwrap();
        assert_eq!(clip.samples, vec![0.0]);
    }

    #[test]
    fn sine_survives_write_and_reload() {
        let sr = 22050u32;
        let amp = 0.8;
        let sine: Vec<f64> = (0..sr)
            .map(|i| amp * (2.0 * std::f64::consts::PI * 440.0 * i as f64 / sr as f64).sin())
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sine.wav");
        write_wav_16bit(&path, &sine, sr).unwrap();
        let clip = load_wav(&path).unwrap();
        assert_eq!(clip.samples.len(), sr as usize);
        let max = clip.samples.iter().cloned().fold(0.0f64, |a, s| a.max(s.abs()));
        assert!((max - amp).abs() < 1e-3);
    }

    #[test]
    fn float32_wav_loads() {
        let mut data = Vec::new();
        for v in [0.25f32, -0.75, 1.5] {
            data.extend_from_slice(&v.to_le_bytes());
        }
        let path = write_tmp(&raw_wav(3, 1, 8000, 32, &data));
        let clip = load_wav(&path).unwrap();
        assert_eq!(clip.samples, vec![0.25, -0.75, 1.0]); // out-of-range clamped
    }

    #[test]
    fn rejects_non_riff() {
        let path = write_tmp(b"OGGS....not a wav");
        assert!(matches!(
            load_wav(&path),
            Err(AudioError::MalformedHeader { .. })
        ));
    }

    #[test]
    fn rejects_24_bit_pcm() {
        let path = write_tmp(&raw_wav(1, 1, 44100, 24, &[0, 0, 0]));
        assert!(matches!(
            load_wav(&path),
            Err(AudioError::UnsupportedEncoding { .. })
        ));
    }

    #[test]
    fn rejects_empty_data() {
        let path = write_tmp(&raw_wav(1, 1, 44100, 16, &[]));
        assert!(matches!(load_wav(&path), Err(AudioError::EmptyAudio { .. })));
    }

    proptest! {
        #[test]
        fn pcm16_round_trip_within_half_lsb(samples in proptest::collection::vec(-1.0f64..=1.0, 1..256)) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("rt.wav");
            write_wav_16bit(&path, &samples, 8000).unwrap();
            let clip = load_wav(&path).unwrap();
            prop_assert_eq!(clip.samples.len(), samples.len());
            for (orig, got) in samples.iter().zip(&clip.samples) {
                prop_assert!((orig - got).abs() <= 1.0 / 32768.0);
            }
        }

        #[test]
        fn mono_mixdown_is_linear(samples in proptest::collection::vec(-0.99f64..=0.99, 1..128)) {
            // A stereo file with L == R == x must load identically to mono x.
            let dir = tempfile::tempdir().unwrap();
            let mono = dir.path().join("mono.wav");
            write_wav_16bit(&mono, &samples, 8000).unwrap();
            let mono_clip = load_wav(&mono).unwrap();

            let mut stereo_data = Vec::new();
            for &s in &samples {
                let v = (s.clamp(-1.0, 1.0) * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
                stereo_data.extend_from_slice(&v.to_le_bytes());
                stereo_data.extend_from_slice(&v.to_le_bytes());
            }
            let stereo = dir.path().join("stereo.wav");
            std::fs::write(&stereo, raw_wav(1, 2, 8000, 16, &stereo_data)).unwrap();
            let stereo_clip = load_wav(&stereo).unwrap();
            prop_assert_eq!(mono_clip.samples, stereo_clip.samples);
        }
    }
}
