//! Experiment harness: stratified splits, accuracy and confusion matrices,
//! KNN k-sweeps, and the two end-to-end experiment recipes (LDA feature
//! engineering and name-based feature selection).

mod report;

pub use report::{
    emit_plot_data, render_csv, render_json, render_text, write_report_files, AccuracyRow,
    ConfigEcho, EvaluationReport, KSweepPoint, PlotSeries, ProjectionPoint, ScatterPoint,
};

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::classifiers::{
    train_forest, train_gnb, train_knn, train_logreg, train_svc, train_tree, KernelKind,
    KernelSpec, LogRegConfig, ModelError, SvcConfig, TrainedModel, TreeConfig,
};
use crate::dataset::Dataset;
use crate::features::FeatureError;
use crate::preprocess::{
    apply_standardizer, fit_lda, fit_standardizer, project, select_features, PreprocessError,
};

/// The nine algorithms of the accuracy table, in table order. Ties in the
/// ranked report preserve this order.
pub const ALGORITHM_ORDER: [&str; 9] = [
    "LogisticRegression",
    "SVC sigmoid",
    "KNeighborsClassifier",
    "RandomForestClassifier",
    "DecisionTreeClassifier",
    "GaussianNB",
    "SVC linear",
    "SVC rbf",
    "SVC poly",
];

pub const DEFAULT_SELECTED_FEATURES: [&str; 2] =
    ["spectral_centroid_mean", "energy_entropy_mean"];

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("class {0} has fewer than 2 rows")]
    DegenerateClass(usize),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty evaluation set")]
    Empty,
    #[error("label {label} out of range for {n_classes} classes")]
    LabelOutOfRange { label: usize, n_classes: usize },
    #[error("k={k} out of range for {n} training rows")]
    KOutOfRange { k: usize, n: usize },
    #[error("plot series `{0}` not present in this report")]
    MissingSeries(String),
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("experiment needs exactly 2 classes, found {0}")]
    NotTwoClasses(usize),
    #[error("invalid split ratio {0}; need 0 < ratio < 1")]
    BadSplitRatio(f64),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentMode {
    Part1Lda,
    Part2Select,
}

impl ExperimentMode {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentMode::Part1Lda => "part1",
            ExperimentMode::Part2Select => "part2",
        }
    }

    pub fn parse(s: &str) -> Option<ExperimentMode> {
        match s {
            "part1" => Some(ExperimentMode::Part1Lda),
            "part2" => Some(ExperimentMode::Part2Select),
            _ => None,
        }
    }

    fn default_knn_k(&self) -> usize {
        match self {
            ExperimentMode::Part1Lda => 8,
            ExperimentMode::Part2Select => 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub mode: ExperimentMode,
    /// Feature names for the part2 selection.
    pub selected_features: Vec<String>,
    /// Train fraction for the stratified split.
    pub split_ratio: f64,
    pub seed: u64,
    pub k_min: usize,
    pub k_max: usize,
    /// KNN neighbor count for the table row; defaults to 8 (part1) / 7 (part2).
    pub knn_k: Option<usize>,
    /// Also report accuracy on the held-out rows alone.
    pub holdout_only: bool,
    /// Echoed into the report for provenance.
    pub features_path: String,
}

impl ExperimentConfig {
    pub fn new(mode: ExperimentMode) -> Self {
        ExperimentConfig {
            mode,
            selected_features: DEFAULT_SELECTED_FEATURES
                .iter()
                .map(|s| s.to_string())
                .collect(),
            split_ratio: 0.75,
            seed: 0,
            k_min: 1,
            k_max: 15,
            knn_k: None,
            holdout_only: false,
            features_path: String::new(),
        }
    }

    pub fn effective_knn_k(&self) -> usize {
        self.knn_k.unwrap_or_else(|| self.mode.default_knn_k())
    }
}

/// Per-class shuffle with a seeded generator; `ceil(ratio * n_c)` rows of
/// each class go to train. Row order within each side follows the original
/// dataset order, so train and test partition the input deterministically.
pub fn stratified_split(
    ds: &Dataset,
    ratio: f64,
    seed: u64,
) -> Result<(Dataset, Dataset), EvalError> {
    if !(0.0..1.0).contains(&ratio) || ratio <= 0.0 {
        return Err(EvalError::BadSplitRatio(ratio));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_rows = Vec::new();
    let mut test_rows = Vec::new();
    for class in 0..ds.class_names.len() {
        let mut rows: Vec<usize> = (0..ds.n_rows()).filter(|&r| ds.y[r] == class).collect();
        if rows.len() < 2 {
            return Err(EvalError::DegenerateClass(class));
        }
        rows.shuffle(&mut rng);
        let n_train = (ratio * rows.len() as f64).ceil() as usize;
        train_rows.extend_from_slice(&rows[..n_train.min(rows.len())]);
        test_rows.extend_from_slice(&rows[n_train.min(rows.len())..]);
    }
    train_rows.sort_unstable();
    test_rows.sort_unstable();
    Ok((ds.subset(&train_rows), ds.subset(&test_rows)))
}

pub fn accuracy(y_true: &[usize], y_pred: &[usize]) -> Result<f64, EvalError> {
    if y_true.len() != y_pred.len() {
        return Err(EvalError::LengthMismatch {
            left: y_true.len(),
            right: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(EvalError::Empty);
    }
    let matches = y_true.iter().zip(y_pred).filter(|(a, b)| a == b).count();
    Ok(matches as f64 / y_true.len() as f64)
}

/// Entry `[i][j]` counts rows with true class `i` predicted as class `j`.
pub fn confusion_matrix(
    y_true: &[usize],
    y_pred: &[usize],
    n_classes: usize,
) -> Result<Vec<Vec<u64>>, EvalError> {
    if y_true.len() != y_pred.len() {
        return Err(EvalError::LengthMismatch {
            left: y_true.len(),
            right: y_pred.len(),
        });
    }
    let mut matrix = vec![vec![0u64; n_classes]; n_classes];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t >= n_classes || p >= n_classes {
            return Err(EvalError::LabelOutOfRange {
                label: t.max(p),
                n_classes,
            });
        }
        matrix[t][p] += 1;
    }
    Ok(matrix)
}

/// Accuracy recomputed from a confusion matrix: trace over total.
pub fn accuracy_from_confusion(matrix: &[Vec<u64>]) -> f64 {
    let total: u64 = matrix.iter().flatten().sum();
    if total == 0 {
        return 0.0;
    }
    let hits: u64 = matrix.iter().enumerate().map(|(i, row)| row[i]).sum();
    hits as f64 / total as f64
}

/// Train KNN on `train` for each k and score it on `eval_set`.
pub fn sweep_k(
    train: &Dataset,
    eval_set: &Dataset,
    k_min: usize,
    k_max: usize,
) -> Result<Vec<(usize, f64)>, EvalError> {
    if k_min == 0 || k_max < k_min || k_max > train.n_rows() {
        return Err(EvalError::KOutOfRange {
            k: k_max,
            n: train.n_rows(),
        });
    }
    (k_min..=k_max)
        .map(|k| {
            let model = train_knn(&train.x, &train.y, k)?;
            let preds = model.predict_batch(&eval_set.x)?;
            Ok((k, accuracy(&eval_set.y, &preds)?))
        })
        .collect()
}

/// Train one of the nine table algorithms by display name. `knn_k` feeds the
/// KNN row; `seed` feeds the forest.
pub fn train_algorithm(
    name: &str,
    x: &[Vec<f64>],
    y: &[usize],
    knn_k: usize,
    seed: u64,
) -> Result<TrainedModel, EvalError> {
    let model = match name {
        "LogisticRegression" => train_logreg(x, y, &LogRegConfig::default())?,
        "KNeighborsClassifier" => train_knn(x, y, knn_k)?,
        "RandomForestClassifier" => train_forest(x, y, 100, seed)?,
        "DecisionTreeClassifier" => train_tree(x, y, &TreeConfig::default())?,
        "GaussianNB" => train_gnb(x, y, 1e-9)?,
        "SVC linear" => train_svc(
            x,
            y,
            KernelSpec::with_scale_gamma(KernelKind::Linear, x),
            &SvcConfig::default(),
        )?,
        "SVC rbf" => train_svc(
            x,
            y,
            KernelSpec::with_scale_gamma(KernelKind::Rbf, x),
            &SvcConfig::default(),
        )?,
        "SVC poly" => train_svc(
            x,
            y,
            KernelSpec::with_scale_gamma(KernelKind::Poly, x),
            &SvcConfig::default(),
        )?,
        "SVC sigmoid" => train_svc(
            x,
            y,
            KernelSpec::with_scale_gamma(KernelKind::Sigmoid, x),
            &SvcConfig::default(),
        )?,
        other => return Err(EvalError::UnknownAlgorithm(other.to_string())),
    };
    Ok(model)
}

/// Run one experiment end to end: standardize on all rows, reduce (LDA to
/// one component or the configured column selection), split, train the nine
/// models on the train rows, and score every model on the complete dataset.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    features: &Dataset,
) -> Result<EvaluationReport, EvalError> {
    let n_classes = features.class_names.len();
    if n_classes != 2 {
        return Err(EvalError::NotTwoClasses(n_classes));
    }
    if features.n_rows() < 4 {
        return Err(EvalError::Empty);
    }

    let standardizer = fit_standardizer(&features.x)?;
    let standardized = Dataset {
        x: apply_standardizer(&standardizer, &features.x)?,
        ..features.clone()
    };

    let (working, lda, projection, scatter) = match cfg.mode {
        ExperimentMode::Part1Lda => {
            let lda = fit_lda(&standardized.x, &standardized.y)?;
            let scores = project(&lda, &standardized.x)?;
            let projection: Vec<ProjectionPoint> = scores
                .iter()
                .zip(&standardized.y)
                .map(|(&score, &label)| ProjectionPoint { score, label })
                .collect();
            let working = Dataset {
                x: scores.iter().map(|&s| vec![s]).collect(),
                feature_names: vec!["lda_component_1".to_string()],
                ..standardized.clone()
            };
            (working, Some(lda), Some(projection), None)
        }
        ExperimentMode::Part2Select => {
            let working = select_features(&standardized, &cfg.selected_features)?;
            let scatter = (working.n_features() == 2).then(|| {
                working
                    .x
                    .iter()
                    .zip(&working.y)
                    .map(|(row, &label)| ScatterPoint {
                        x: row[0],
                        y: row[1],
                        label,
                    })
                    .collect::<Vec<_>>()
            });
            (working, None, None, scatter)
        }
    };

    let (train, test) = stratified_split(&working, cfg.split_ratio, cfg.seed)?;
    // Paper protocol: models are scored on the complete dataset, train rows
    // included.
    let eval_set = &working;

    let mut rows = Vec::with_capacity(ALGORITHM_ORDER.len());
    let mut confusion = BTreeMap::new();
    let mut holdout = cfg.holdout_only.then(Vec::new);
    for name in ALGORITHM_ORDER {
        let model = train_algorithm(name, &train.x, &train.y, cfg.effective_knn_k(), cfg.seed)?;
        let preds = model.predict_batch(&eval_set.x)?;
        let matrix = confusion_matrix(&eval_set.y, &preds, 2)?;
        let acc = accuracy_from_confusion(&matrix);
        rows.push(AccuracyRow {
            algorithm: name.to_string(),
            accuracy: acc,
        });
        confusion.insert(
            name.to_string(),
            [
                [matrix[0][0], matrix[0][1]],
                [matrix[1][0], matrix[1][1]],
            ],
        );
        if let Some(holdout_rows) = holdout.as_mut() {
            let preds = model.predict_batch(&test.x)?;
            holdout_rows.push(AccuracyRow {
                algorithm: name.to_string(),
                accuracy: accuracy(&test.y, &preds)?,
            });
        }
    }
    // Rank descending; stable sort keeps table order on ties.
    rows.sort_by(|a, b| b.accuracy.partial_cmp(&a.accuracy).unwrap());

    let sweep = sweep_k(&train, eval_set, cfg.k_min, cfg.k_max)?;
    let k_sweep: Vec<KSweepPoint> = sweep
        .iter()
        .map(|&(k, accuracy)| KSweepPoint { k, accuracy })
        .collect();
    let knn_k = cfg.effective_knn_k();
    let k_sweep_note = (cfg.k_min..=cfg.k_max).contains(&knn_k).then(|| {
        let at_k = sweep[knn_k - cfg.k_min].1;
        let dominated = sweep
            .iter()
            .take_while(|&&(k, _)| k < knn_k)
            .all(|&(_, acc)| at_k >= acc);
        format!("accuracy at k={knn_k} >= accuracy at every smaller k in range: {dominated}")
    });

    Ok(EvaluationReport {
        config: ConfigEcho {
            mode: cfg.mode.name().to_string(),
            features_path: cfg.features_path.clone(),
            selected_features: match cfg.mode {
                ExperimentMode::Part2Select => cfg.selected_features.clone(),
                ExperimentMode::Part1Lda => Vec::new(),
            },
            split_ratio: cfg.split_ratio,
            seed: cfg.seed,
            k_min: cfg.k_min,
            k_max: cfg.k_max,
            knn_k,
            holdout_only: cfg.holdout_only,
            train_rows: train.n_rows(),
            eval_rows: eval_set.n_rows(),
            fit_scope: "all_rows".to_string(),
        },
        class_names: working.class_names.clone(),
        rows,
        confusion,
        k_sweep,
        k_sweep_note,
        holdout,
        standardizer,
        lda,
        projection,
        scatter,
    })
}
