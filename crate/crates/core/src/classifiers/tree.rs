//! CART decision tree with Gini impurity.
//!
//! Candidate thresholds are midpoints between consecutive sorted distinct
//! values; the split maximizing impurity decrease wins, ties broken by lower
//! feature index then lower threshold. `x_j <= t` goes left.

use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf {
        label: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub root: TreeNode,
    pub n_features: usize,
}

impl TreeModel {
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { label } => return *label,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(node: &TreeNode) -> usize {
            match node {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(left).max(walk(right)),
            }
        }
        walk(&self.root)
    }
}

#[derive(Debug, Clone)]
pub struct TreeConfig {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: None,
            min_samples_split: 2,
        }
    }
}

/// Gini impurity `1 - sum_c p_c^2` from class counts.
pub fn gini_from_counts(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    1.0 - counts
        .iter()
        .map(|&c| {
            let p = c as f64 / total;
            p * p
        })
        .sum::<f64>()
}

fn class_counts(y: &[usize], indices: &[usize], n_classes: usize) -> Vec<usize> {
    let mut counts = vec![0usize; n_classes];
    for &i in indices {
        counts[y[i]] += 1;
    }
    counts
}

fn majority_label(counts: &[usize]) -> usize {
    let mut best = 0;
    for class in 1..counts.len() {
        if counts[class] > counts[best] {
            best = class;
        }
    }
    best
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    decrease: f64,
}

/// Scan `candidates` (ascending feature indices) for the best split of the
/// rows in `indices`.
fn best_split(
    x: &[Vec<f64>],
    y: &[usize],
    indices: &[usize],
    candidates: &[usize],
    n_classes: usize,
) -> Option<BestSplit> {
    let node_counts = class_counts(y, indices, n_classes);
    let node_gini = gini_from_counts(&node_counts);
    let n = indices.len() as f64;

    let mut best: Option<BestSplit> = None;
    for &feature in candidates {
        let mut values: Vec<f64> = indices.iter().map(|&i| x[i][feature]).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values.dedup();
        for pair in values.windows(2) {
            let threshold = (pair[0] + pair[1]) / 2.0;
            let mut left_counts = vec![0usize; n_classes];
            let mut right_counts = vec![0usize; n_classes];
            for &i in indices {
                if x[i][feature] <= threshold {
                    left_counts[y[i]] += 1;
                } else {
                    right_counts[y[i]] += 1;
                }
            }
            let n_left: usize = left_counts.iter().sum();
            let n_right: usize = right_counts.iter().sum();
            let weighted = n_left as f64 / n * gini_from_counts(&left_counts)
                + n_right as f64 / n * gini_from_counts(&right_counts);
            let decrease = node_gini - weighted;
            // Strict improvement keeps the lowest feature index and lowest
            // threshold on ties.
            if best.as_ref().is_none_or(|b| decrease > b.decrease) {
                best = Some(BestSplit {
                    feature,
                    threshold,
                    decrease,
                });
            }
        }
    }
    best
}

/// Recursive CART builder. `pick_features` selects the candidate feature
/// subset per node (identity for a plain tree, a random subset for forests).
pub(super) fn build_node(
    x: &[Vec<f64>],
    y: &[usize],
    indices: &[usize],
    depth: usize,
    cfg: &TreeConfig,
    n_classes: usize,
    pick_features: &mut dyn FnMut() -> Vec<usize>,
) -> TreeNode {
    let counts = class_counts(y, indices, n_classes);
    let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
    let depth_capped = cfg.max_depth.is_some_and(|limit| depth >= limit);
    if pure || depth_capped || indices.len() < cfg.min_samples_split {
        return TreeNode::Leaf {
            label: majority_label(&counts),
        };
    }

    let candidates = pick_features();
    let Some(split) = best_split(x, y, indices, &candidates, n_classes) else {
        return TreeNode::Leaf {
            label: majority_label(&counts),
        };
    };

    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
        .iter()
        .partition(|&&i| x[i][split.feature] <= split.threshold);
    TreeNode::Split {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(build_node(
            x,
            y,
            &left_idx,
            depth + 1,
            cfg,
            n_classes,
            pick_features,
        )),
        right: Box::new(build_node(
            x,
            y,
            &right_idx,
            depth + 1,
            cfg,
            n_classes,
            pick_features,
        )),
    }
}

pub fn train_tree(
    x: &[Vec<f64>],
    y: &[usize],
    cfg: &TreeConfig,
) -> Result<super::TrainedModel, ModelError> {
    if x.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let d = x[0].len();
    let n_classes = y.iter().max().map_or(1, |m| m + 1);
    let indices: Vec<usize> = (0..x.len()).collect();
    let all_features: Vec<usize> = (0..d).collect();
    let root = build_node(x, y, &indices, 0, cfg, n_classes, &mut || {
        all_features.clone()
    });
    Ok(super::TrainedModel::Tree(TreeModel {
        root,
        n_features: d,
    }))
}
