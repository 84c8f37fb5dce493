//! Soft-margin SVM trained by simplified SMO.
//!
//! Pairs are visited deterministically: the first index scans all rows for
//! KKT violations, the second maximizes |E1 - E2| (falling back to an
//! ascending scan when that pair makes no progress). Optimization stops when
//! a full pass changes no multiplier by more than 1e-8; hitting the pass
//! limit sets a non-convergence flag on the model instead of failing.

use serde::{Deserialize, Serialize};

use super::kernel::{kernel_eval, KernelSpec};
use super::ModelError;

#[derive(Debug, Clone)]
pub struct SvcConfig {
    pub c: f64,
    pub tol: f64,
    pub max_passes: usize,
}

impl Default for SvcConfig {
    fn default() -> Self {
        SvcConfig {
            c: 1.0,
            tol: 1e-3,
            max_passes: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvcModel {
    pub support_x: Vec<Vec<f64>>,
    /// `alpha_i * t_i` with targets in {-1, +1}.
    pub dual_coef: Vec<f64>,
    pub bias: f64,
    pub kernel: KernelSpec,
    pub c: f64,
    pub converged: bool,
    pub n_features: usize,
}

impl SvcModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.support_x
            .iter()
            .zip(&self.dual_coef)
            .map(|(sv, coef)| coef * kernel_eval(&self.kernel, sv, x).expect("dim checked"))
            .sum::<f64>()
            + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        usize::from(self.decision(x) >= 0.0)
    }
}

/// Raw SMO output over the full training set.
#[derive(Debug, Clone)]
pub struct SmoSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub converged: bool,
}

const ALPHA_EPS: f64 = 1e-12;
const PASS_EPS: f64 = 1e-8;

struct Smo<'a> {
    gram: &'a [Vec<f64>],
    targets: &'a [f64],
    alpha: Vec<f64>,
    bias: f64,
    c: f64,
}

impl Smo<'_> {
    fn error(&self, idx: usize) -> f64 {
        let f: f64 = self
            .alpha
            .iter()
            .zip(self.targets)
            .zip(&self.gram[idx])
            .map(|((a, t), k)| a * t * k)
            .sum::<f64>()
            + self.bias;
        f - self.targets[idx]
    }

    /// Joint optimization of the pair (i, j); returns |change in alpha_j|.
    fn take_step(&mut self, i: usize, j: usize, e_i: f64, e_j: f64) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a_i, a_j) = (self.alpha[i], self.alpha[j]);
        let (t_i, t_j) = (self.targets[i], self.targets[j]);
        let (lo, hi) = if t_i != t_j {
            ((a_j - a_i).max(0.0), (self.c + a_j - a_i).min(self.c))
        } else {
            ((a_i + a_j - self.c).max(0.0), (a_i + a_j).min(self.c))
        };
        if hi - lo < ALPHA_EPS {
            return 0.0;
        }
        let eta = self.gram[i][i] + self.gram[j][j] - 2.0 * self.gram[i][j];
        if eta <= 0.0 {
            return 0.0;
        }
        let mut a_j_new = (a_j + t_j * (e_i - e_j) / eta).clamp(lo, hi);
        if a_j_new < ALPHA_EPS {
            a_j_new = 0.0;
        } else if a_j_new > self.c - ALPHA_EPS {
            a_j_new = self.c;
        }
        let delta_j = a_j_new - a_j;
        if delta_j.abs() < ALPHA_EPS {
            return 0.0;
        }
        let mut a_i_new = a_i + t_i * t_j * (a_j - a_j_new);
        if a_i_new < ALPHA_EPS {
            a_i_new = 0.0;
        } else if a_i_new > self.c - ALPHA_EPS {
            a_i_new = self.c;
        }

        let b1 = self.bias
            - e_i
            - t_i * (a_i_new - a_i) * self.gram[i][i]
            - t_j * delta_j * self.gram[i][j];
        let b2 = self.bias
            - e_j
            - t_i * (a_i_new - a_i) * self.gram[i][j]
            - t_j * delta_j * self.gram[j][j];
        self.bias = if a_i_new > 0.0 && a_i_new < self.c {
            b1
        } else if a_j_new > 0.0 && a_j_new < self.c {
            b2
        } else {
            (b1 + b2) / 2.0
        };
        self.alpha[i] = a_i_new;
        self.alpha[j] = a_j_new;
        delta_j.abs()
    }
}

/// Solve the soft-margin dual for targets in {-1, +1}.
pub fn solve_dual(
    x: &[Vec<f64>],
    targets: &[f64],
    kernel: &KernelSpec,
    cfg: &SvcConfig,
) -> SmoSolution {
    let n = x.len();
    let gram: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| kernel_eval(kernel, &x[i], &x[j]).expect("dim checked"))
                .collect()
        })
        .collect();
    let mut smo = Smo {
        gram: &gram,
        targets,
        alpha: vec![0.0; n],
        bias: 0.0,
        c: cfg.c,
    };

    let mut converged = false;
    for _ in 0..cfg.max_passes {
        let mut max_change = 0.0f64;
        for (i, &target) in targets.iter().enumerate() {
            let e_i = smo.error(i);
            let r = e_i * target;
            let violates = (r < -cfg.tol && smo.alpha[i] < cfg.c - ALPHA_EPS)
                || (r > cfg.tol && smo.alpha[i] > ALPHA_EPS);
            if !violates {
                continue;
            }
            let errors: Vec<f64> = (0..n).map(|j| smo.error(j)).collect();
            // Second-choice heuristic: maximize |E_i - E_j|.
            let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            order.sort_by(|&a, &b| {
                let ga = (e_i - errors[a]).abs();
                let gb = (e_i - errors[b]).abs();
                gb.partial_cmp(&ga).unwrap().then(a.cmp(&b))
            });
            for j in order {
                let change = smo.take_step(i, j, e_i, errors[j]);
                if change > 0.0 {
                    max_change = max_change.max(change);
                    break;
                }
            }
        }
        if max_change <= PASS_EPS {
            converged = true;
            break;
        }
    }

    SmoSolution {
        alpha: smo.alpha,
        bias: smo.bias,
        converged,
    }
}

/// Targets in {-1, +1} from class indices (class 0 -> -1, class 1 -> +1).
pub fn to_targets(y: &[usize]) -> Vec<f64> {
    y.iter().map(|&l| 2.0 * l as f64 - 1.0).collect()
}

pub fn train_svc(
    x: &[Vec<f64>],
    y: &[usize],
    kernel: KernelSpec,
    cfg: &SvcConfig,
) -> Result<super::TrainedModel, ModelError> {
    if x.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    if !(y.contains(&0) && y.contains(&1)) {
        return Err(ModelError::SingleClass);
    }
    let targets = to_targets(y);
    let solution = solve_dual(x, &targets, &kernel, cfg);

    let mut support_x = Vec::new();
    let mut dual_coef = Vec::new();
    for (idx, &a) in solution.alpha.iter().enumerate() {
        if a > 0.0 {
            support_x.push(x[idx].clone());
            dual_coef.push(a * targets[idx]);
        }
    }
    Ok(super::TrainedModel::Svc(SvcModel {
        support_x,
        dual_coef,
        bias: solution.bias,
        kernel,
        c: cfg.c,
        converged: solution.converged,
        n_features: x[0].len(),
    }))
}
