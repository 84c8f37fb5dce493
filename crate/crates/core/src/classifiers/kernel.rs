//! SVM kernel functions: linear, polynomial, rbf and sigmoid.

use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Linear,
    Poly,
    Rbf,
    Sigmoid,
}

impl KernelKind {
    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::Linear => "linear",
            KernelKind::Poly => "poly",
            KernelKind::Rbf => "rbf",
            KernelKind::Sigmoid => "sigmoid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub gamma: f64,
    /// Polynomial degree; ignored by the other kernels.
    pub degree: u32,
    /// Additive constant for poly and sigmoid.
    pub coef0: f64,
}

impl KernelSpec {
    pub fn linear() -> Self {
        KernelSpec {
            kind: KernelKind::Linear,
            gamma: 1.0,
            degree: 1,
            coef0: 0.0,
        }
    }

    pub fn poly(gamma: f64, degree: u32, coef0: f64) -> Self {
        assert!(gamma > 0.0 && degree >= 1);
        KernelSpec {
            kind: KernelKind::Poly,
            gamma,
            degree,
            coef0,
        }
    }

    pub fn rbf(gamma: f64) -> Self {
        assert!(gamma > 0.0);
        KernelSpec {
            kind: KernelKind::Rbf,
            gamma,
            degree: 1,
            coef0: 0.0,
        }
    }

    pub fn sigmoid(gamma: f64, coef0: f64) -> Self {
        assert!(gamma > 0.0);
        KernelSpec {
            kind: KernelKind::Sigmoid,
            gamma,
            degree: 1,
            coef0,
        }
    }

    /// Kernel of the given kind with the "scale" gamma for `x`, degree 3 and
    /// coef0 = 0 (the conventional defaults).
    pub fn with_scale_gamma(kind: KernelKind, x: &[Vec<f64>]) -> Self {
        let gamma = scale_gamma(x);
        match kind {
            KernelKind::Linear => KernelSpec::linear(),
            KernelKind::Poly => KernelSpec::poly(gamma, 3, 0.0),
            KernelKind::Rbf => KernelSpec::rbf(gamma),
            KernelKind::Sigmoid => KernelSpec::sigmoid(gamma, 0.0),
        }
    }
}

/// The "scale" heuristic: `1 / (d * Var(X))` over all matrix entries, with
/// gamma falling back to `1/d` when the variance vanishes.
pub fn scale_gamma(x: &[Vec<f64>]) -> f64 {
    let d = x.first().map_or(1, Vec::len).max(1);
    let count = (x.len() * d) as f64;
    if count == 0.0 {
        return 1.0 / d as f64;
    }
    let mean: f64 = x.iter().flatten().sum::<f64>() / count;
    let var: f64 = x.iter().flatten().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count;
    if var > 0.0 {
        1.0 / (d as f64 * var)
    } else {
        1.0 / d as f64
    }
}

pub fn kernel_eval(spec: &KernelSpec, x: &[f64], z: &[f64]) -> Result<f64, ModelError> {
    if x.len() != z.len() {
        return Err(ModelError::DimensionMismatch {
            expected: x.len(),
            got: z.len(),
        });
    }
    let dot = || x.iter().zip(z).map(|(a, b)| a * b).sum::<f64>();
    Ok(match spec.kind {
        KernelKind::Linear => dot(),
        KernelKind::Poly => (spec.gamma * dot() + spec.coef0).powi(spec.degree as i32),
        KernelKind::Rbf => {
            let dist_sq: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
            (-spec.gamma * dist_sq).exp()
        }
        KernelKind::Sigmoid => (spec.gamma * dot() + spec.coef0).tanh(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rbf_of_identical_points_is_one() {
        let spec = KernelSpec::rbf(0.7);
        for x in [vec![0.0], vec![1.0, -2.0, 3.0], vec![1e6, -1e6]] {
            assert_eq!(kernel_eval(&spec, &x, &x).unwrap(), 1.0);
        }
    }

    #[test]
    fn linear_dot_product() {
        let spec = KernelSpec::linear();
        assert_eq!(
            kernel_eval(&spec, &[1.0, 2.0], &[3.0, 4.0]).unwrap(),
            11.0
        );
    }

    #[test]
    fn cubic_poly_of_orthogonal_vectors_is_zero() {
        let spec = KernelSpec::poly(1.0, 3, 0.0);
        assert_eq!(
            kernel_eval(&spec, &[1.0, 0.0], &[0.0, 1.0]).unwrap(),
            0.0
        );
        assert_eq!(
            kernel_eval(&spec, &[2.0, 0.0], &[3.0, 0.0]).unwrap(),
            216.0
        );
    }

    #[test]
    fn sigmoid_is_tanh_of_scaled_dot() {
        let spec = KernelSpec::sigmoid(0.5, 0.25);
        let got = kernel_eval(&spec, &[2.0], &[3.0]).unwrap();
        assert!((got - (0.5 * 6.0 + 0.25f64).tanh()).abs() < 1e-15);
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let spec = KernelSpec::linear();
        assert!(kernel_eval(&spec, &[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn scale_gamma_matches_direct_formula() {
        let x = vec![vec![0.0, 2.0], vec![4.0, 6.0]];
        // Entries 0,2,4,6: mean 3, var 5.
        assert!((scale_gamma(&x) - 1.0 / (2.0 * 5.0)).abs() < 1e-12);
        // Constant matrix falls back to 1/d.
        let flat = vec![vec![3.0, 3.0, 3.0]];
        assert_eq!(scale_gamma(&flat), 1.0 / 3.0);
    }
}
