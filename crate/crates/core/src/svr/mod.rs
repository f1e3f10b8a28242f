//! Epsilon-insensitive support vector regression.
//!
//! Inputs are standardized with training statistics, the dual is solved by
//! [`smo`](self) and the model keeps only points with nonzero dual
//! coefficient. Targets are never rescaled, so predictions stay on the MOS
//! scale.

mod grid;
mod smo;
mod standardize;

use std::path::Path;

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

pub use grid::{grid_search, GridCriterion, GridPoint, GridSearchResult, GridSpec};
pub use smo::WorkingSet;
pub use standardize::Standardizer;

#[derive(Debug, thiserror::Error)]
pub enum SvrError {
    #[error("SMO did not converge after {iterations} iterations (KKT violation {violation:.3e})")]
    Convergence { iterations: usize, violation: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("expected {expected} features, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("feature names do not match the names the model was trained on ({0})")]
    FeatureNames(String),
    #[error("linear weights are only defined for the linear kernel")]
    KernelMismatch,
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = SvrError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

impl Kernel {
    pub fn gamma(&self) -> Option<f64> {
        match self {
            Kernel::Linear => None,
            Kernel::Rbf { gamma } => Some(*gamma),
        }
    }

    fn eval(&self, a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
        match self {
            Kernel::Linear => a.dot(&b),
            Kernel::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y).powi(2)).sum();
                (-gamma * d2).exp()
            }
        }
    }

    /// Kernel matrix between the rows of `a` and the rows of `b`.
    pub fn matrix(&self, a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> Array2<f64> {
        let dots = a.dot(&b.t());
        match self {
            Kernel::Linear => dots,
            Kernel::Rbf { gamma } => {
                let na: Vec<f64> = a.axis_iter(Axis(0)).map(|r| r.dot(&r)).collect();
                let nb: Vec<f64> = b.axis_iter(Axis(0)).map(|r| r.dot(&r)).collect();
                let mut k = dots;
                for ((i, j), v) in k.indexed_iter_mut() {
                    *v = (-gamma * (na[i] + nb[j] - 2.0 * *v).max(0.0)).exp();
                }
                k
            }
        }
    }
}

/// Solver hyperparameters other than the kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvrParams {
    pub c: f64,
    pub epsilon: f64,
    /// Stopping tolerance on the maximal KKT violation.
    pub tolerance: f64,
    pub max_iter: usize,
    pub working_set: WorkingSet,
}

impl Default for SvrParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            epsilon: 0.1,
            tolerance: 1e-3,
            max_iter: 1_000_000,
            working_set: WorkingSet::default(),
        }
    }
}

impl SvrParams {
    pub fn with_c(&self, c: f64) -> Self {
        Self { c, ..self.clone() }
    }
}

/// A trained epsilon-SVR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrModel {
    pub kernel: Kernel,
    pub c: f64,
    pub epsilon: f64,
    pub standardizer: Standardizer,
    /// Standardized support vectors, one per row.
    pub support_vectors: Array2<f64>,
    /// `alpha_i - alpha*_i` of each support vector.
    pub dual_coeffs: Vec<f64>,
    pub bias: f64,
    /// Training-row index of each support vector.
    pub support_indices: Vec<usize>,
    /// Names of the input features; empty when trained without names.
    #[serde(default)]
    pub feature_names: Vec<String>,
    /// Maximal KKT violation at termination.
    pub kkt_violation: f64,
    pub iterations: usize,
    /// Dual objective (minimization form) at the solution.
    pub objective: f64,
}

fn check_inputs(x: ArrayView2<'_, f64>, y: &[f64], kernel: &Kernel, params: &SvrParams) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(SvrError::InvalidInput(format!(
            "{} rows but {} targets",
            x.nrows(),
            y.len()
        )));
    }
    if y.len() < 2 {
        return Err(SvrError::InvalidInput("need at least two training points".into()));
    }
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(SvrError::InvalidInput(format!("C must be positive, got {}", params.c)));
    }
    if !(params.epsilon >= 0.0 && params.epsilon.is_finite()) {
        return Err(SvrError::InvalidInput(format!(
            "epsilon must be non-negative, got {}",
            params.epsilon
        )));
    }
    if let Kernel::Rbf { gamma } = kernel {
        if !(*gamma > 0.0 && gamma.is_finite()) {
            return Err(SvrError::InvalidInput(format!("gamma must be positive, got {gamma}")));
        }
    }
    if x.iter().chain(y.iter()).any(|v| v.is_nan()) {
        return Err(SvrError::InvalidInput("NaN in training data".into()));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(SvrError::InvalidInput("infinite value in training data".into()));
    }
    Ok(())
}

/// Trains an epsilon-SVR on raw (unstandardized) features.
pub fn train_svr(x: ArrayView2<'_, f64>, y: &[f64], kernel: Kernel, params: &SvrParams) -> Result<SvrModel> {
    check_inputs(x, y, &kernel, params)?;
    let standardizer = Standardizer::fit(x);
    let xs = standardizer.apply(x);
    let gram = kernel.matrix(xs.view(), xs.view());
    let out = smo::solve(
        gram.view(),
        y,
        &smo::SolverSettings {
            c: params.c,
            epsilon: params.epsilon,
            tolerance: params.tolerance,
            max_iter: params.max_iter,
            working_set: params.working_set,
        },
    )?;
    let support_indices: Vec<usize> = (0..y.len()).filter(|&i| out.beta[i] != 0.0).collect();
    Ok(SvrModel {
        kernel,
        c: params.c,
        epsilon: params.epsilon,
        standardizer,
        support_vectors: xs.select(Axis(0), &support_indices),
        dual_coeffs: support_indices.iter().map(|&i| out.beta[i]).collect(),
        bias: out.bias,
        support_indices,
        feature_names: Vec::new(),
        kkt_violation: out.violation,
        iterations: out.iterations,
        objective: out.objective,
    })
}

impl SvrModel {
    pub fn with_feature_names(mut self, names: Vec<String>) -> Self {
        self.feature_names = names;
        self
    }

    pub fn width(&self) -> usize {
        self.standardizer.width()
    }

    /// `f(x) = sum_i dual_i K(sv_i, x) + bias` on standardized `x`.
    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        if x.nrows() == 0 {
            return Ok(Vec::new());
        }
        if x.ncols() != self.width() {
            return Err(SvrError::Shape {
                expected: self.width(),
                got: x.ncols(),
            });
        }
        let xs = self.standardizer.apply(x);
        if self.dual_coeffs.is_empty() {
            return Ok(vec![self.bias; x.nrows()]);
        }
        let k = self.kernel.matrix(xs.view(), self.support_vectors.view());
        Ok(k
            .axis_iter(Axis(0))
            .map(|row| row.iter().zip(&self.dual_coeffs).map(|(k, b)| k * b).sum::<f64>() + self.bias)
            .collect())
    }

    /// Like [`predict`](Self::predict), but first checks that `names` match
    /// the training feature names.
    pub fn predict_named(&self, names: &[String], x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        if !self.feature_names.is_empty() && self.feature_names != names {
            let first = self
                .feature_names
                .iter()
                .zip(names)
                .position(|(a, b)| a != b)
                .unwrap_or(self.feature_names.len().min(names.len()));
            return Err(SvrError::FeatureNames(format!(
                "first difference at column {first}"
            )));
        }
        self.predict(x)
    }

    /// Primal weights `w = sum_i dual_i sv_i` in standardized feature space.
    pub fn linear_weights(&self) -> Result<Vec<f64>> {
        if self.kernel != Kernel::Linear {
            return Err(SvrError::KernelMismatch);
        }
        let mut w = vec![0.0; self.width()];
        for (sv, b) in self.support_vectors.axis_iter(Axis(0)).zip(&self.dual_coeffs) {
            for (wk, v) in w.iter_mut().zip(sv.iter()) {
                *wk += b * v;
            }
        }
        Ok(w)
    }

    /// Decision value of one standardized row.
    pub fn decision_standardized(&self, xs: ArrayView1<'_, f64>) -> f64 {
        self.support_vectors
            .axis_iter(Axis(0))
            .zip(&self.dual_coeffs)
            .map(|(sv, b)| b * self.kernel.eval(sv, xs))
            .sum::<f64>()
            + self.bias
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |message: String| SvrError::Io {
            path: path.display().to_string(),
            message,
        };
        let text = serde_json::to_string_pretty(self).map_err(|e| io(e.to_string()))?;
        std::fs::write(path, text).map_err(|e| io(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let io = |message: String| SvrError::Io {
            path: path.display().to_string(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| io(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| io(e.to_string()))
    }
}
