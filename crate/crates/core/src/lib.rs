//! Audio genre-classification toolkit.
//!
//! The pipeline decodes WAV files into normalized mono clips, extracts a
//! 138-dimensional feature vector per file (34 short-term features plus
//! deltas, aggregated to mid-term mean/std statistics, plus a beat pair),
//! standardizes the table, reduces it with two-class Fisher LDA or name-based
//! feature selection, and trains nine classifiers behind one train/predict
//! contract. An experiment harness reproduces accuracy tables, confusion
//! matrices and k-sweeps end to end.

pub mod audio_io;
pub mod classifiers;
pub mod dataset;
pub mod dsp;
pub mod eval;
pub mod features;
pub mod preprocess;

pub use dataset::Dataset;
