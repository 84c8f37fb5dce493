//! Dataset front ends: standard-score normalization, two-class Fisher LDA
//! projection to one dimension, and name-based feature selection.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Dataset;

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("need at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("expected exactly 2 classes, found {0}")]
    NotTwoClasses(usize),
    #[error("class {0} has fewer than 2 rows")]
    DegenerateClass(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unknown feature name `{0}`")]
    UnknownFeatureName(String),
    #[error("selected {selected} features but only {rows} rows; selection must stay below the row count")]
    TooManyFeatures { selected: usize, rows: usize },
    #[error("within-class scatter solve failed")]
    SolveFailed,
    #[error("class means coincide; no discriminant direction exists")]
    IdenticalClassMeans,
}

/// Per-column affine transform to zero mean and unit population std.
/// Constant columns keep scale 1 so they map to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename = "standardizer")]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

pub fn fit_standardizer(x: &[Vec<f64>]) -> Result<Standardizer, PreprocessError> {
    let n = x.len();
    if n < 2 {
        return Err(PreprocessError::TooFewRows(n));
    }
    let d = x[0].len();
    let mut mean = vec![0.0; d];
    for row in x {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n as f64;
    }
    let mut scale = vec![0.0; d];
    for row in x {
        for ((s, v), m) in scale.iter_mut().zip(row).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    for s in scale.iter_mut() {
        *s = (*s / n as f64).sqrt();
        if *s <= 0.0 {
            *s = 1.0;
        }
    }
    Ok(Standardizer { mean, scale })
}

pub fn apply_standardizer(s: &Standardizer, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, PreprocessError> {
    let d = s.mean.len();
    x.iter()
        .map(|row| {
            if row.len() != d {
                return Err(PreprocessError::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            Ok(row
                .iter()
                .zip(&s.mean)
                .zip(&s.scale)
                .map(|((v, m), sc)| (v - m) / sc)
                .collect())
        })
        .collect()
}

/// One-dimensional Fisher discriminant direction for a two-class problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename = "lda")]
pub struct LdaProjection {
    /// Unit-norm discriminant direction, signed so that class 1 projects
    /// above class 0.
    pub w: Vec<f64>,
    /// Ridge added to the within-class scatter before solving.
    pub lambda: f64,
}

impl LdaProjection {
    pub fn n_components(&self) -> usize {
        1
    }
}

/// Fit `w ∝ (S_w + λI)^{-1} (μ₁ - μ₀)` with `λ = 1e-6 · trace(S_w)/d`.
/// The ridge keeps the solve well-posed when the scatter is singular
/// (fewer rows than features).
pub fn fit_lda(x: &[Vec<f64>], y: &[usize]) -> Result<LdaProjection, PreprocessError> {
    let n = x.len();
    assert_eq!(n, y.len(), "row/label count mismatch");
    let n_classes = y.iter().max().map_or(0, |m| m + 1);
    if n_classes != 2 {
        return Err(PreprocessError::NotTwoClasses(n_classes));
    }
    for class in 0..2 {
        if y.iter().filter(|&&l| l == class).count() < 2 {
            return Err(PreprocessError::DegenerateClass(class));
        }
    }
    let d = x[0].len();

    let mut means = [vec![0.0; d], vec![0.0; d]];
    let mut counts = [0usize; 2];
    for (row, &label) in x.iter().zip(y) {
        counts[label] += 1;
        for (m, v) in means[label].iter_mut().zip(row) {
            *m += v;
        }
    }
    for (mean, count) in means.iter_mut().zip(counts) {
        for m in mean.iter_mut() {
            *m /= count as f64;
        }
    }

    // Pooled within-class scatter.
    let mut scatter = DMatrix::<f64>::zeros(d, d);
    for (row, &label) in x.iter().zip(y) {
        let centered: Vec<f64> = row.iter().zip(&means[label]).map(|(v, m)| v - m).collect();
        for i in 0..d {
            for j in i..d {
                let v = centered[i] * centered[j];
                scatter[(i, j)] += v;
                if i != j {
                    scatter[(j, i)] += v;
                }
            }
        }
    }

    let mut lambda = 1e-6 * scatter.trace() / d as f64;
    if lambda <= 0.0 {
        // Zero scatter (every row equals its class mean): fall back to a
        // tiny absolute ridge so the system stays solvable.
        lambda = 1e-12;
    }
    for i in 0..d {
        scatter[(i, i)] += lambda;
    }

    let diff = DVector::from_iterator(d, means[1].iter().zip(&means[0]).map(|(a, b)| a - b));
    let w = Cholesky::new(scatter)
        .ok_or(PreprocessError::SolveFailed)?
        .solve(&diff);

    let norm = w.norm();
    if norm <= 0.0 || !norm.is_finite() {
        return Err(PreprocessError::IdenticalClassMeans);
    }
    let mut w: Vec<f64> = w.iter().map(|v| v / norm).collect();
    // Sign convention: class 1 projects above class 0.
    let toward: f64 = w.iter().zip(diff.iter()).map(|(a, b)| a * b).sum();
    if toward < 0.0 {
        for v in w.iter_mut() {
            *v = -*v;
        }
    }

    Ok(LdaProjection { w, lambda })
}

/// Project rows onto the discriminant direction, giving one score per row.
pub fn project(p: &LdaProjection, x: &[Vec<f64>]) -> Result<Vec<f64>, PreprocessError> {
    x.iter()
        .map(|row| {
            if row.len() != p.w.len() {
                return Err(PreprocessError::DimensionMismatch {
                    expected: p.w.len(),
                    got: row.len(),
                });
            }
            Ok(row.iter().zip(&p.w).map(|(a, b)| a * b).sum())
        })
        .collect()
}

/// Column subset by name, in the order given; labels are untouched.
/// The selection must stay below the row count.
pub fn select_features(ds: &Dataset, names: &[String]) -> Result<Dataset, PreprocessError> {
    if names.len() >= ds.n_rows() {
        return Err(PreprocessError::TooManyFeatures {
            selected: names.len(),
            rows: ds.n_rows(),
        });
    }
    let indices: Vec<usize> = names
        .iter()
        .map(|name| {
            ds.feature_names
                .iter()
                .position(|f| f == name)
                .ok_or_else(|| PreprocessError::UnknownFeatureName(name.clone()))
        })
        .collect::<Result<_, _>>()?;
    Ok(Dataset {
        x: ds
            .x
            .iter()
            .map(|row| indices.iter().map(|&i| row[i]).collect())
            .collect(),
        y: ds.y.clone(),
        class_names: ds.class_names.clone(),
        feature_names: names.to_vec(),
        paths: ds.paths.clone(),
    })
}
