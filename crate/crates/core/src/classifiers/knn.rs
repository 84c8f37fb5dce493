//! k-nearest neighbors with explicit, deterministic tie rules.
//!
//! Majority vote over the k nearest by Euclidean distance. Vote ties break
//! toward the class with the smaller summed distance among the k neighbors,
//! then toward the lower class index; equidistant neighbors at the k-th rank
//! break by lower training-row index.

use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub x_train: Vec<Vec<f64>>,
    pub y_train: Vec<usize>,
    pub k: usize,
}

impl KnnModel {
    pub fn n_features(&self) -> usize {
        self.x_train.first().map_or(0, Vec::len)
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        let mut neighbors: Vec<(f64, usize)> = self
            .x_train
            .iter()
            .enumerate()
            .map(|(idx, row)| {
                let dist = row
                    .iter()
                    .zip(x)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                (dist, idx)
            })
            .collect();
        neighbors.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

        let n_classes = self.y_train.iter().max().map_or(1, |m| m + 1);
        let mut votes = vec![0usize; n_classes];
        let mut summed = vec![0.0f64; n_classes];
        for &(dist, idx) in neighbors.iter().take(self.k) {
            let label = self.y_train[idx];
            votes[label] += 1;
            summed[label] += dist;
        }

        let mut best = 0;
        for class in 1..n_classes {
            if votes[class] > votes[best]
                || (votes[class] == votes[best] && summed[class] < summed[best])
            {
                best = class;
            }
        }
        best
    }
}

pub fn train_knn(
    x: &[Vec<f64>],
    y: &[usize],
    k: usize,
) -> Result<super::TrainedModel, ModelError> {
    if x.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    if k == 0 || k > x.len() {
        return Err(ModelError::KOutOfRange { k, n: x.len() });
    }
    Ok(super::TrainedModel::Knn(KnnModel {
        x_train: x.to_vec(),
        y_train: y.to_vec(),
        k,
    }))
}
