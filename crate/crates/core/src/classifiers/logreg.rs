//! Two-class logistic regression trained by full-batch gradient descent
//! with backtracking line search. The bias is unregularized.

use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Debug, Clone)]
pub struct LogRegConfig {
    /// Inverse regularization weight: the penalty is `||w||^2 / (2 * l2_strength)`.
    pub l2_strength: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            l2_strength: 1.0,
            max_iter: 1000,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub converged: bool,
}

impl LogRegModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        usize::from(self.decision(x) >= 0.0)
    }
}

/// log(1 + exp(z)) without overflow.
fn softplus(z: f64) -> f64 {
    if z > 35.0 {
        z
    } else {
        z.exp().ln_1p()
    }
}

/// Logistic sigmoid.
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Objective `sum_i log(1 + exp(-t_i (w.x_i + b))) + ||w||^2/(2 l2)` with
/// targets `t_i = 2 y_i - 1` in {-1, +1}, plus its gradient in (w, b).
pub fn loss_and_gradient(
    x: &[Vec<f64>],
    y: &[usize],
    weights: &[f64],
    bias: f64,
    l2_strength: f64,
) -> (f64, Vec<f64>, f64) {
    let d = weights.len();
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; d];
    let mut grad_b = 0.0;
    for (row, &label) in x.iter().zip(y) {
        let target = 2.0 * label as f64 - 1.0;
        let margin = target * (row.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() + bias);
        loss += softplus(-margin);
        // d/df softplus(-t f) = -t * sigma(-t f)
        let coeff = -target * sigmoid(-margin);
        for (g, v) in grad_w.iter_mut().zip(row) {
            *g += coeff * v;
        }
        grad_b += coeff;
    }
    let ridge = 1.0 / (2.0 * l2_strength);
    loss += ridge * weights.iter().map(|w| w * w).sum::<f64>();
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g += w / l2_strength;
    }
    (loss, grad_w, grad_b)
}

fn optimize(
    x: &[Vec<f64>],
    y: &[usize],
    cfg: &LogRegConfig,
) -> (Vec<f64>, f64, Vec<f64>, bool) {
    let d = x[0].len();
    let mut weights = vec![0.0; d];
    let mut bias = 0.0;
    let mut losses = Vec::new();
    let mut converged = false;

    for _ in 0..cfg.max_iter {
        let (loss, grad_w, grad_b) = loss_and_gradient(x, y, &weights, bias, cfg.l2_strength);
        losses.push(loss);
        let inf_norm = grad_w
            .iter()
            .chain(std::iter::once(&grad_b))
            .fold(0.0f64, |acc, g| acc.max(g.abs()));
        if inf_norm < cfg.tol {
            converged = true;
            break;
        }
        let grad_sq: f64 = grad_w.iter().map(|g| g * g).sum::<f64>() + grad_b * grad_b;

        // Backtracking line search along the negative gradient (Armijo).
        let mut step = 1.0;
        loop {
            let trial_w: Vec<f64> = weights
                .iter()
                .zip(&grad_w)
                .map(|(w, g)| w - step * g)
                .collect();
            let trial_b = bias - step * grad_b;
            let (trial_loss, _, _) = loss_and_gradient(x, y, &trial_w, trial_b, cfg.l2_strength);
            if trial_loss <= loss - 1e-4 * step * grad_sq || step < 1e-18 {
                weights = trial_w;
                bias = trial_b;
                break;
            }
            step *= 0.5;
        }
    }
    (weights, bias, losses, converged)
}

pub fn train_logreg(
    x: &[Vec<f64>],
    y: &[usize],
    cfg: &LogRegConfig,
) -> Result<super::TrainedModel, ModelError> {
    if x.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    if !(y.contains(&0) && y.contains(&1)) {
        return Err(ModelError::SingleClass);
    }
    let (weights, bias, _, converged) = optimize(x, y, cfg);
    Ok(super::TrainedModel::LogReg(LogRegModel {
        weights,
        bias,
        converged,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_one_dimensional_data_is_fit_perfectly() {
        let x = vec![vec![-1.0], vec![1.0]];
        let y = vec![0, 1];
        let model = train_logreg(&x, &y, &LogRegConfig::default()).unwrap();
        assert_eq!(model.predict_batch(&x).unwrap(), y);
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        // Deterministic pseudo-random 20x5 instance.
        let mut state = 0xabcdefu64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        let x: Vec<Vec<f64>> = (0..20).map(|_| (0..5).map(|_| next()).collect()).collect();
        let y: Vec<usize> = (0..20).map(|i| i % 2).collect();
        let w: Vec<f64> = (0..5).map(|_| next() * 0.3).collect();
        let b = 0.17;

        let (_, grad_w, grad_b) = loss_and_gradient(&x, &y, &w, b, 1.0);
        let h = 1e-5;
        for j in 0..5 {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[j] += h;
            wm[j] -= h;
            let (lp, _, _) = loss_and_gradient(&x, &y, &wp, b, 1.0);
            let (lm, _, _) = loss_and_gradient(&x, &y, &wm, b, 1.0);
            let numeric = (lp - lm) / (2.0 * h);
            let denom = numeric.abs().max(1e-8);
            assert!(
                (grad_w[j] - numeric).abs() / denom < 1e-4,
                "weight {j}: analytic {} vs numeric {numeric}",
                grad_w[j]
            );
        }
        let (lp, _, _) = loss_and_gradient(&x, &y, &w, b + h, 1.0);
        let (lm, _, _) = loss_and_gradient(&x, &y, &w, b - h, 1.0);
        let numeric = (lp - lm) / (2.0 * h);
        assert!((grad_b - numeric).abs() / numeric.abs().max(1e-8) < 1e-4);
    }

    #[test]
    fn symmetric_data_gives_near_zero_bias() {
        let x = vec![
            vec![1.0, 2.0],
            vec![-1.0, -2.0],
            vec![2.0, 0.5],
            vec![-2.0, -0.5],
        ];
        let y = vec![0, 1, 0, 1];
        let model = train_logreg(&x, &y, &LogRegConfig::default()).unwrap();
        match model {
            super::super::TrainedModel::LogReg(m) => assert!(m.bias.abs() < 1e-4),
            _ => unreachable!(),
        }
    }

    #[test]
    fn loss_decreases_monotonically() {
        let x = vec![
            vec![0.0, 1.0],
            vec![0.3, 0.8],
            vec![2.0, 3.0],
            vec![2.5, 2.5],
            vec![1.0, 0.2],
            vec![3.0, 3.3],
        ];
        let y = vec![0, 0, 1, 1, 0, 1];
        let (_, _, losses, _) = optimize(&x, &y, &LogRegConfig::default());
        for pair in losses.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12, "loss increased: {pair:?}");
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let x = vec![vec![0.0], vec![1.0]];
        assert!(matches!(
            train_logreg(&x, &[1, 1], &LogRegConfig::default()),
            Err(ModelError::SingleClass)
        ));
    }
}
