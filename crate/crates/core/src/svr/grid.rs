//! Hyperparameter search on a held-out random 20% of the training data.

use ndarray::{ArrayView2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{train_svr, Kernel, Result, SvrError, SvrParams};
use crate::evaluation::{plcc, rmse};
use crate::rng::random_holdout;

/// Fraction of the training data held out for validation.
pub const VALIDATION_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub c: Vec<f64>,
    /// Ignored by the linear kernel.
    pub gamma: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            c: vec![0.1, 1.0, 10.0, 100.0, 1000.0],
            gamma: vec![1e-4, 1e-3, 1e-2, 1e-1, 1.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridCriterion {
    /// Highest validation PLCC.
    Plcc,
    /// Lowest validation RMSE; used when PLCC is undefined on the
    /// validation subset (constant targets or constant predictions).
    Rmse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub c: f64,
    pub gamma: Option<f64>,
    pub plcc: Option<f64>,
    pub rmse: Option<f64>,
    /// Training failure at this point, if any.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub best_c: f64,
    pub best_gamma: Option<f64>,
    pub criterion: GridCriterion,
    /// True when the RMSE criterion replaced PLCC.
    pub fallback: bool,
    pub validation_size: usize,
    pub points: Vec<GridPoint>,
}

impl GridSearchResult {
    pub fn best_kernel(&self) -> Kernel {
        match self.best_gamma {
            Some(gamma) => Kernel::Rbf { gamma },
            None => Kernel::Linear,
        }
    }
}

/// Evaluates every grid point on one seeded train/validation split and
/// returns the best. The caller retrains on all data with the result.
///
/// Ties are broken towards the smaller `C`, then the smaller `gamma`.
pub fn grid_search(
    x: ArrayView2<'_, f64>,
    y: &[f64],
    rbf: bool,
    grid: &GridSpec,
    params: &SvrParams,
    seed: u64,
) -> Result<GridSearchResult> {
    if grid.c.is_empty() || (rbf && grid.gamma.is_empty()) {
        return Err(SvrError::InvalidInput("empty hyperparameter grid".into()));
    }
    if y.len() < 5 || x.nrows() != y.len() {
        return Err(SvrError::InvalidInput(format!(
            "grid search needs at least 5 aligned rows, got {} rows and {} targets",
            x.nrows(),
            y.len()
        )));
    }
    let (train, val) = random_holdout(y.len(), VALIDATION_FRACTION, seed);
    let xt = x.select(Axis(0), &train);
    let yt: Vec<f64> = train.iter().map(|&i| y[i]).collect();
    let xv = x.select(Axis(0), &val);
    let yv: Vec<f64> = val.iter().map(|&i| y[i]).collect();

    let mut candidates: Vec<(f64, Option<f64>)> = Vec::new();
    for &c in &grid.c {
        if rbf {
            candidates.extend(grid.gamma.iter().map(|&g| (c, Some(g))));
        } else {
            candidates.push((c, None));
        }
    }

    let points: Vec<GridPoint> = candidates
        .par_iter()
        .map(|&(c, gamma)| {
            let kernel = gamma.map_or(Kernel::Linear, |gamma| Kernel::Rbf { gamma });
            match train_svr(xt.view(), &yt, kernel, &params.with_c(c))
                .and_then(|m| m.predict(xv.view()))
            {
                Ok(pred) => GridPoint {
                    c,
                    gamma,
                    plcc: plcc(&pred, &yv).ok(),
                    rmse: rmse(&pred, &yv).ok(),
                    error: None,
                },
                Err(e) => GridPoint {
                    c,
                    gamma,
                    plcc: None,
                    rmse: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let pick = |criterion: GridCriterion| -> Option<usize> {
        let score = |p: &GridPoint| match criterion {
            GridCriterion::Plcc => p.plcc,
            GridCriterion::Rmse => p.rmse.map(|r| -r),
        };
        let mut best: Option<usize> = None;
        for (k, p) in points.iter().enumerate() {
            let Some(s) = score(p) else { continue };
            let better = match best {
                None => true,
                Some(b) => {
                    let bp = &points[b];
                    let bs = score(bp).expect("best has a score");
                    s > bs
                        || (s == bs
                            && (p.c, p.gamma.unwrap_or(0.0)) < (bp.c, bp.gamma.unwrap_or(0.0)))
                }
            };
            if better {
                best = Some(k);
            }
        }
        best
    };

    let (criterion, best) = match pick(GridCriterion::Plcc) {
        Some(b) => (GridCriterion::Plcc, b),
        None => {
            let b = pick(GridCriterion::Rmse).ok_or_else(|| {
                SvrError::InvalidInput(format!(
                    "every grid point failed: {}",
                    points[0].error.clone().unwrap_or_default()
                ))
            })?;
            (GridCriterion::Rmse, b)
        }
    };
    Ok(GridSearchResult {
        best_c: points[best].c,
        best_gamma: points[best].gamma,
        criterion,
        fallback: criterion == GridCriterion::Rmse,
        validation_size: val.len(),
        points,
    })
}
