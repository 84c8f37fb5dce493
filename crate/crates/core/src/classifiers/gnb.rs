//! Gaussian naive Bayes with per-class diagonal covariance and a variance
//! floor of `var_smoothing * max_j Var(X_j)`.

use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnbModel {
    pub class_means: Vec<Vec<f64>>,
    pub class_vars: Vec<Vec<f64>>,
    pub priors: Vec<f64>,
}

impl GnbModel {
    pub fn n_features(&self) -> usize {
        self.class_means.first().map_or(0, Vec::len)
    }

    /// Unnormalized log posterior per class:
    /// `log prior + sum_j log N(x_j; mu_cj, var_cj)`.
    pub fn log_joint(&self, x: &[f64]) -> Vec<f64> {
        self.class_means
            .iter()
            .zip(&self.class_vars)
            .zip(&self.priors)
            .map(|((means, vars), &prior)| {
                if prior <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                let mut ll = prior.ln();
                for ((&v, &mean), &var) in x.iter().zip(means).zip(vars) {
                    ll += -0.5 * (2.0 * std::f64::consts::PI * var).ln()
                        - (v - mean) * (v - mean) / (2.0 * var);
                }
                ll
            })
            .collect()
    }

    /// Normalized class posteriors (softmax of the log joint).
    pub fn posteriors(&self, x: &[f64]) -> Vec<f64> {
        let joint = self.log_joint(x);
        let max = joint.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = joint.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = exps.iter().sum();
        exps.iter().map(|e| e / total).collect()
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        let joint = self.log_joint(x);
        let mut best = 0;
        for class in 1..joint.len() {
            if joint[class] > joint[best] {
                best = class;
            }
        }
        best
    }
}

pub fn train_gnb(
    x: &[Vec<f64>],
    y: &[usize],
    var_smoothing: f64,
) -> Result<super::TrainedModel, ModelError> {
    if x.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let n = x.len();
    let d = x[0].len();
    let n_classes = y.iter().max().map_or(0, |m| m + 1);
    {
        let mut distinct: Vec<usize> = y.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() < 2 {
            return Err(ModelError::SingleClass);
        }
    }

    // Variance floor from the total-data per-feature variance.
    let mut total_mean = vec![0.0; d];
    for row in x {
        for (m, v) in total_mean.iter_mut().zip(row) {
            *m += v / n as f64;
        }
    }
    let mut max_total_var = 0.0f64;
    for j in 0..d {
        let var: f64 = x.iter().map(|r| (r[j] - total_mean[j]).powi(2)).sum::<f64>() / n as f64;
        max_total_var = max_total_var.max(var);
    }
    let mut floor = var_smoothing * max_total_var;
    if floor <= 0.0 {
        floor = var_smoothing;
    }

    let mut counts = vec![0usize; n_classes];
    let mut means = vec![vec![0.0; d]; n_classes];
    for (row, &label) in x.iter().zip(y) {
        counts[label] += 1;
        for (m, v) in means[label].iter_mut().zip(row) {
            *m += v;
        }
    }
    for (mean, &count) in means.iter_mut().zip(&counts) {
        if count > 0 {
            for m in mean.iter_mut() {
                *m /= count as f64;
            }
        }
    }
    let mut vars = vec![vec![floor; d]; n_classes];
    for class in 0..n_classes {
        if counts[class] == 0 {
            continue;
        }
        for j in 0..d {
            let var: f64 = x
                .iter()
                .zip(y)
                .filter(|(_, &l)| l == class)
                .map(|(r, _)| (r[j] - means[class][j]).powi(2))
                .sum::<f64>()
                / counts[class] as f64;
            vars[class][j] = var.max(floor);
        }
    }

    Ok(super::TrainedModel::GaussianNb(GnbModel {
        class_means: means,
        class_vars: vars,
        priors: counts.iter().map(|&c| c as f64 / n as f64).collect(),
    }))
}
