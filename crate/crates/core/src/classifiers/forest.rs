//! Random forest of CART trees. Each tree draws a bootstrap sample and
//! considers a random `ceil(sqrt(d))` feature subset per split, using a
//! counter-based generator streamed by (seed, tree index) so forests are
//! reproducible across platforms and thread counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{build_node, TreeConfig, TreeModel};
use super::ModelError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<TreeModel>,
    pub seed: u64,
    pub n_features: usize,
}

impl ForestModel {
    /// Majority vote over trees; ties go to the lower class index.
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut votes = Vec::new();
        for tree in &self.trees {
            let label = tree.predict(x);
            if label >= votes.len() {
                votes.resize(label + 1, 0usize);
            }
            votes[label] += 1;
        }
        let mut best = 0;
        for class in 1..votes.len() {
            if votes[class] > votes[best] {
                best = class;
            }
        }
        best
    }
}

#[derive(Debug, Clone)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub seed: u64,
    /// Features considered per split; `None` means `ceil(sqrt(d))`.
    pub max_features: Option<usize>,
    /// Test hook: `false` trains every tree on the full sample.
    pub bootstrap: bool,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl ForestConfig {
    pub fn new(n_trees: usize, seed: u64) -> Self {
        ForestConfig {
            n_trees,
            seed,
            max_features: None,
            bootstrap: true,
            max_depth: None,
            min_samples_split: 2,
        }
    }
}

fn tree_rng(seed: u64, tree_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree_index);
    rng
}

fn sample_features(rng: &mut ChaCha8Rng, d: usize, take: usize) -> Vec<usize> {
    // Partial Fisher-Yates, then sorted so splits scan ascending indices.
    let mut pool: Vec<usize> = (0..d).collect();
    for i in 0..take.min(d) {
        let j = rng.random_range(i..d);
        pool.swap(i, j);
    }
    let mut picked: Vec<usize> = pool[..take.min(d)].to_vec();
    picked.sort_unstable();
    picked
}

pub fn train_forest_with(
    x: &[Vec<f64>],
    y: &[usize],
    cfg: &ForestConfig,
) -> Result<super::TrainedModel, ModelError> {
    if x.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let n = x.len();
    let d = x[0].len();
    let n_classes = y.iter().max().map_or(1, |m| m + 1);
    let max_features = cfg
        .max_features
        .unwrap_or_else(|| (d as f64).sqrt().ceil() as usize)
        .clamp(1, d);
    let tree_cfg = TreeConfig {
        max_depth: cfg.max_depth,
        min_samples_split: cfg.min_samples_split,
    };

    let trees: Vec<TreeModel> = (0..cfg.n_trees)
        .map(|t| {
            let mut rng = tree_rng(cfg.seed, t as u64);
            let indices: Vec<usize> = if cfg.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let root = build_node(x, y, &indices, 0, &tree_cfg, n_classes, &mut || {
                sample_features(&mut rng, d, max_features)
            });
            TreeModel {
                root,
                n_features: d,
            }
        })
        .collect();

    Ok(super::TrainedModel::Forest(ForestModel {
        trees,
        seed: cfg.seed,
        n_features: d,
    }))
}

pub fn train_forest(
    x: &[Vec<f64>],
    y: &[usize],
    n_trees: usize,
    seed: u64,
) -> Result<super::TrainedModel, ModelError> {
    train_forest_with(x, y, &ForestConfig::new(n_trees, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{train_tree, TrainedModel};

    fn separable(n_per_class: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..n_per_class {
            let wobble = (i as f64 * 0.37).sin() * 0.3;
            x.push(vec![i as f64 * 0.1 + wobble, -1.0 - wobble]);
            y.push(0);
            x.push(vec![i as f64 * 0.1 + wobble + 5.0, 1.0 + wobble]);
            y.push(1);
        }
        (x, y)
    }

    #[test]
    fn single_tree_without_bootstrap_reduces_to_cart() {
        let (x, y) = separable(10);
        let d = x[0].len();
        let cfg = ForestConfig {
            n_trees: 1,
            seed: 3,
            max_features: Some(d),
            bootstrap: false,
            max_depth: None,
            min_samples_split: 2,
        };
        let forest = train_forest_with(&x, &y, &cfg).unwrap();
        let tree = train_tree(&x, &y, &Default::default()).unwrap();
        let probes: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![i as f64 * 0.2 - 2.0, (i % 7) as f64 - 3.0])
            .collect();
        assert_eq!(
            forest.predict_batch(&probes).unwrap(),
            tree.predict_batch(&probes).unwrap()
        );
    }

    #[test]
    fn same_seed_gives_identical_forests() {
        let (x, y) = separable(10);
        let a = train_forest(&x, &y, 25, 99).unwrap();
        let b = train_forest(&x, &y, 25, 99).unwrap();
        assert_eq!(a, b);
        let c = train_forest(&x, &y, 25, 100).unwrap();
        match (&a, &c) {
            (TrainedModel::Forest(fa), TrainedModel::Forest(fc)) => {
                assert_ne!(fa.trees, fc.trees);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn forest_fits_separable_training_data() {
        let (x, y) = separable(10);
        let forest = train_forest(&x, &y, 100, 0).unwrap();
        let preds = forest.predict_batch(&x).unwrap();
        let correct = preds.iter().zip(&y).filter(|(p, t)| p == t).count();
        assert!(correct as f64 / y.len() as f64 >= 0.95);
    }
}
