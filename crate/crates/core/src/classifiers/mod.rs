//! Nine from-scratch classifiers behind one train/predict contract:
//! logistic regression, k-nearest neighbors, Gaussian naive Bayes, a CART
//! decision tree, a random forest, and soft-margin SVMs with linear, poly,
//! rbf and sigmoid kernels.
//!
//! Every trainer is a pure function of its inputs and hyperparameters;
//! repeated runs produce identical models.

mod gnb;
mod kernel;
mod knn;
mod logreg;
mod svc;
mod tree;

pub mod forest;

pub use gnb::{train_gnb, GnbModel};
pub use kernel::{kernel_eval, scale_gamma, KernelKind, KernelSpec};
pub use knn::{train_knn, KnnModel};
pub use logreg::{loss_and_gradient, train_logreg, LogRegConfig, LogRegModel};
pub use svc::{solve_dual, train_svc, SmoSolution, SvcConfig, SvcModel};
pub use tree::{gini_from_counts, train_tree, TreeConfig, TreeModel, TreeNode};

pub use forest::{train_forest, ForestConfig, ForestModel};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("training data contains a single class")]
    SingleClass,
    #[error("k={k} out of range for {n} training rows")]
    KOutOfRange { k: usize, n: usize },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("dimension mismatch: model expects {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("model deserialization failed: {0}")]
    Deserialize(String),
}

/// A trained classifier. Serializes to JSON with a `type` discriminator and
/// full-precision parameters; a round trip preserves predictions exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TrainedModel {
    LogReg(LogRegModel),
    Knn(KnnModel),
    GaussianNb(GnbModel),
    Tree(TreeModel),
    Forest(ForestModel),
    Svc(SvcModel),
}

impl TrainedModel {
    pub fn n_features(&self) -> usize {
        match self {
            TrainedModel::LogReg(m) => m.weights.len(),
            TrainedModel::Knn(m) => m.n_features(),
            TrainedModel::GaussianNb(m) => m.n_features(),
            TrainedModel::Tree(m) => m.n_features,
            TrainedModel::Forest(m) => m.n_features,
            TrainedModel::Svc(m) => m.n_features,
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize, ModelError> {
        let expected = self.n_features();
        if x.len() != expected {
            return Err(ModelError::DimensionMismatch {
                expected,
                got: x.len(),
            });
        }
        Ok(match self {
            TrainedModel::LogReg(m) => m.predict(x),
            TrainedModel::Knn(m) => m.predict(x),
            TrainedModel::GaussianNb(m) => m.predict(x),
            TrainedModel::Tree(m) => m.predict(x),
            TrainedModel::Forest(m) => m.predict(x),
            TrainedModel::Svc(m) => m.predict(x),
        })
    }

    pub fn predict_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<usize>, ModelError> {
        rows.iter().map(|r| self.predict(r)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serialization")
    }

    pub fn from_json(json: &str) -> Result<TrainedModel, ModelError> {
        serde_json::from_str(json).map_err(|e| ModelError::Deserialize(e.to_string()))
    }
}
