//! Audio input: WAV decoding into normalized mono buffers, dataset
//! manifests, and a deterministic synthetic stand-in corpus.

mod manifest;
mod synth;
mod wav;

pub use manifest::{load_manifest, save_manifest, DatasetManifest};
pub use synth::{synthesize_corpus, CLIP_SECONDS, CORPUS_SAMPLE_RATE};
pub use wav::{load_wav, write_wav_16bit, AudioClip};

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("malformed WAV header in {path}: {detail}")]
    MalformedHeader { path: PathBuf, detail: String },
    #[error("unsupported WAV encoding in {path}: {detail}")]
    UnsupportedEncoding { path: PathBuf, detail: String },
    #[error("WAV file {path} has zero data frames")]
    EmptyAudio { path: PathBuf },
    #[error("file not found: {0}")]
    MissingFile(PathBuf),
    #[error("duplicate path in manifest: {0}")]
    DuplicatePath(String),
    #[error("manifest has no entries")]
    EmptyManifest,
    #[error("malformed manifest line {line}: {detail}")]
    MalformedManifest { line: usize, detail: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
