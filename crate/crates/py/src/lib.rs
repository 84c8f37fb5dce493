//! Python bindings for the genreforge toolkit: WAV loading, the synthetic
//! corpus, 138-feature extraction, the nine classifiers and the experiment
//! harness.

use std::path::{Path, PathBuf};

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use genreforge::audio_io;
use genreforge::classifiers::TrainedModel;
use genreforge::eval::{self, ExperimentConfig, ExperimentMode};
use genreforge::features;

fn value_err(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

/// Decoded mono audio clip.
#[pyclass(name = "AudioClip")]
struct PyAudioClip {
    inner: audio_io::AudioClip,
}

#[pymethods]
impl PyAudioClip {
    #[getter]
    fn samples(&self) -> Vec<f64> {
        self.inner.samples.clone()
    }

    #[getter]
    fn sample_rate(&self) -> u32 {
        self.inner.sample_rate
    }

    #[getter]
    fn source_path(&self) -> String {
        self.inner.source_path.clone()
    }

    fn duration_s(&self) -> f64 {
        self.inner.duration_s()
    }

    fn __len__(&self) -> usize {
        self.inner.samples.len()
    }
}

/// The 138 per-file feature values with their canonical names.
#[pyclass(name = "FeatureVector")]
struct PyFeatureVector {
    #[pyo3(get)]
    values: Vec<f64>,
    #[pyo3(get)]
    names: Vec<String>,
}

/// Labeled feature table: one row per file.
#[pyclass(name = "Dataset")]
struct PyDataset {
    inner: genreforge::Dataset,
}

#[pymethods]
impl PyDataset {
    #[getter]
    fn x(&self) -> Vec<Vec<f64>> {
        self.inner.x.clone()
    }

    #[getter]
    fn y(&self) -> Vec<usize> {
        self.inner.y.clone()
    }

    #[getter]
    fn class_names(&self) -> Vec<String> {
        self.inner.class_names.clone()
    }

    #[getter]
    fn feature_names(&self) -> Vec<String> {
        self.inner.feature_names.clone()
    }

    #[getter]
    fn paths(&self) -> Vec<String> {
        self.inner.paths.clone()
    }

    fn n_rows(&self) -> usize {
        self.inner.n_rows()
    }

    fn n_features(&self) -> usize {
        self.inner.n_features()
    }

    fn save_csv(&self, path: &str) -> PyResult<()> {
        features::write_features_csv(path, &self.inner).map_err(value_err)
    }

    #[staticmethod]
    fn load_csv(path: &str) -> PyResult<PyDataset> {
        Ok(PyDataset {
            inner: features::read_features_csv(path).map_err(value_err)?,
        })
    }
}

/// A trained classifier behind the uniform predict contract.
#[pyclass(name = "Model")]
struct PyModel {
    inner: TrainedModel,
}

#[pymethods]
impl PyModel {
    fn predict(&self, x: Vec<f64>) -> PyResult<usize> {
        self.inner.predict(&x).map_err(value_err)
    }

    fn predict_batch(&self, rows: Vec<Vec<f64>>) -> PyResult<Vec<usize>> {
        self.inner.predict_batch(&rows).map_err(value_err)
    }

    fn n_features(&self) -> usize {
        self.inner.n_features()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[staticmethod]
    fn from_json(json: &str) -> PyResult<PyModel> {
        Ok(PyModel {
            inner: TrainedModel::from_json(json).map_err(value_err)?,
        })
    }
}

/// Decode a WAV file into a normalized mono clip.
#[pyfunction]
fn load_wav(path: &str) -> PyResult<PyAudioClip> {
    Ok(PyAudioClip {
        inner: audio_io::load_wav(path).map_err(value_err)?,
    })
}

/// Write the deterministic 20-file synthetic corpus; returns the manifest path.
#[pyfunction]
fn synth_corpus(out_dir: &str, seed: u64) -> PyResult<String> {
    let (_, manifest_path) = audio_io::synthesize_corpus(out_dir, seed).map_err(value_err)?;
    Ok(manifest_path.display().to_string())
}

/// The canonical 138 feature names.
#[pyfunction]
fn feature_names() -> Vec<String> {
    features::feature_names()
}

/// Extract the 138-value feature vector from a clip.
#[pyfunction]
#[pyo3(signature = (clip, window=0.050, step=0.025, mt_window=1.0))]
fn extract_features(
    clip: &PyAudioClip,
    window: f64,
    step: f64,
    mt_window: f64,
) -> PyResult<PyFeatureVector> {
    let config = features::FeatureConfig {
        window_s: window,
        step_s: step,
        mt_window_s: mt_window,
        mt_step_s: mt_window,
        ..features::FeatureConfig::default()
    };
    let fv = features::extract_file_features(&clip.inner, &config).map_err(value_err)?;
    Ok(PyFeatureVector {
        values: fv.values,
        names: fv.names,
    })
}

/// Extract features for every file in a manifest CSV.
#[pyfunction]
#[pyo3(signature = (manifest_path, window=0.050, step=0.025, mt_window=1.0, threads=0))]
fn extract_dataset(
    manifest_path: &str,
    window: f64,
    step: f64,
    mt_window: f64,
    threads: usize,
) -> PyResult<PyDataset> {
    let manifest = audio_io::load_manifest(manifest_path).map_err(value_err)?;
    let config = features::FeatureConfig {
        window_s: window,
        step_s: step,
        mt_window_s: mt_window,
        mt_step_s: mt_window,
        ..features::FeatureConfig::default()
    };
    let inner = features::extract_dataset(
        &manifest,
        &PathBuf::from(manifest_path),
        &config,
        threads,
    )
    .map_err(value_err)?;
    Ok(PyDataset { inner })
}

/// Train one of the nine table algorithms by display name
/// (e.g. "LogisticRegression", "SVC rbf", "KNeighborsClassifier").
#[pyfunction]
#[pyo3(signature = (algorithm, x, y, knn_k=5, seed=0))]
fn train_model(
    algorithm: &str,
    x: Vec<Vec<f64>>,
    y: Vec<usize>,
    knn_k: usize,
    seed: u64,
) -> PyResult<PyModel> {
    Ok(PyModel {
        inner: eval::train_algorithm(algorithm, &x, &y, knn_k, seed).map_err(value_err)?,
    })
}

/// The nine algorithm display names in table order.
#[pyfunction]
fn algorithm_names() -> Vec<String> {
    eval::ALGORITHM_ORDER.iter().map(|s| s.to_string()).collect()
}

/// Run a part1/part2 experiment over a feature CSV; returns the report JSON.
#[pyfunction]
#[pyo3(signature = (features_csv, mode, seed=0, split=0.75, knn_k=None, select=None, holdout_only=false, report_dir=None))]
#[allow(clippy::too_many_arguments)]
fn run_experiment(
    features_csv: &str,
    mode: &str,
    seed: u64,
    split: f64,
    knn_k: Option<usize>,
    select: Option<Vec<String>>,
    holdout_only: bool,
    report_dir: Option<&str>,
) -> PyResult<String> {
    let mode = ExperimentMode::parse(mode)
        .ok_or_else(|| value_err(format!("unknown mode `{mode}`; expected part1 or part2")))?;
    let mut cfg = ExperimentConfig::new(mode);
    cfg.seed = seed;
    cfg.split_ratio = split;
    cfg.knn_k = knn_k;
    cfg.holdout_only = holdout_only;
    cfg.features_path = features_csv.to_string();
    if let Some(names) = select {
        cfg.selected_features = names;
    }
    let dataset = features::read_features_csv(features_csv).map_err(value_err)?;
    let report = eval::run_experiment(&cfg, &dataset).map_err(value_err)?;
    if let Some(dir) = report_dir {
        eval::write_report_files(&report, Path::new(dir)).map_err(value_err)?;
    }
    Ok(eval::render_json(&report))
}

#[pymodule]
fn genreforge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAudioClip>()?;
    m.add_class::<PyFeatureVector>()?;
    m.add_class::<PyDataset>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(load_wav, m)?)?;
    m.add_function(wrap_pyfunction!(synth_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(feature_names, m)?)?;
    m.add_function(wrap_pyfunction!(extract_features, m)?)?;
    m.add_function(wrap_pyfunction!(extract_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(train_model, m)?)?;
    m.add_function(wrap_pyfunction!(algorithm_names, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
