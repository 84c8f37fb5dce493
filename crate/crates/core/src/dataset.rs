//! The labeled feature table shared by extraction, preprocessing and
//! evaluation: one row per audio file, one column per named feature.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    /// Row-major feature values, `n_rows x n_features`.
    pub x: Vec<Vec<f64>>,
    /// Class index per row, indexing into `class_names`.
    pub y: Vec<usize>,
    /// Ordered class labels.
    pub class_names: Vec<String>,
    /// Column names, one per feature.
    pub feature_names: Vec<String>,
    /// Source file per row (empty when rows are not file-backed).
    pub paths: Vec<String>,
}

impl Dataset {
    pub fn n_rows(&self) -> usize {
        self.x.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Row count per class, indexed by class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.class_names.len()];
        for &label in &self.y {
            counts[label] += 1;
        }
        counts
    }

    /// Dataset restricted to the given row indices, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            x: rows.iter().map(|&r| self.x[r].clone()).collect(),
            y: rows.iter().map(|&r| self.y[r]).collect(),
            class_names: self.class_names.clone(),
            feature_names: self.feature_names.clone(),
            paths: rows
                .iter()
                .map(|&r| self.paths.get(r).cloned().unwrap_or_default())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Dataset {
        Dataset {
            x: vec![vec![0.0, 1.0], vec![2.0, 3.0], vec![4.0, 5.0]],
            y: vec![0, 1, 0],
            class_names: vec!["a".into(), "b".into()],
            feature_names: vec!["f0".into(), "f1".into()],
            paths: vec!["p0".into(), "p1".into(), "p2".into()],
        }
    }

    #[test]
    fn class_counts_and_subset() {
        let ds = toy();
        assert_eq!(ds.class_counts(), vec![2, 1]);
        let sub = ds.subset(&[2, 0]);
        assert_eq!(sub.x, vec![vec![4.0, 5.0], vec![0.0, 1.0]]);
        assert_eq!(sub.y, vec![0, 0]);
        assert_eq!(sub.paths, vec!["p2", "p0"]);
    }
}
