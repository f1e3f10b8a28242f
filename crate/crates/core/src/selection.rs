//! Two-stage feature selection driven by linear-SVR weight magnitudes.
//!
//! Stage 1 scans the number of kept features `k` in fixed steps and keeps
//! the value with the best mean test PLCC over seeded random splits. Stage 2
//! re-ranks on many more splits with that `k` and keeps the `k` features that
//! entered the top-`k` most often.

use log::warn;
use ndarray::{ArrayView2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::evaluation::plcc;
use crate::fusion::Dataset;
use crate::rng::random_holdout;
use crate::svr::{train_svr, Kernel, SvrError, SvrParams};

#[derive(Debug, thiserror::Error)]
pub enum SelectionError {
    #[error("invalid selection input: {0}")]
    InvalidInput(String),
    #[error("every stage-1 split was degenerate (constant test targets)")]
    AllSkipped,
    #[error("selected index {index} is outside a {width}-column table")]
    IndexOutOfRange { index: usize, width: usize },
    #[error("feature names differ from the selection's: {0}")]
    NameMismatch(String),
    #[error(transparent)]
    Svr(#[from] SvrError),
}

pub type Result<T, E = SelectionError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionConfig {
    pub step: usize,
    pub stage1_iterations: usize,
    pub stage2_iterations: usize,
    pub seed_base: u64,
    pub test_fraction: f64,
    pub svr: SvrParams,
    /// Tables at most this wide pass through unselected.
    pub min_dims: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            step: 20,
            stage1_iterations: 10,
            stage2_iterations: 100,
            seed_base: 0,
            test_fraction: 0.2,
            // Only the weight direction matters for ranking. Strong
            // regularization keeps SMO on the low-rank linear Gram matrix
            // fast without changing the order of strong columns.
            svr: SvrParams {
                c: 0.01,
                ..SvrParams::default()
            },
            min_dims: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage1Point {
    pub k: usize,
    /// `None` when every split was skipped for this `k`.
    pub mean_plcc: Option<f64>,
    pub valid_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub k: usize,
    /// Ascending.
    pub selected_indices: Vec<usize>,
    /// Names of the selected columns, empty if unknown.
    #[serde(default)]
    pub selected_names: Vec<String>,
    /// Stage-2 top-`k` counts for every input column.
    pub frequency: Vec<u32>,
    #[serde(default)]
    pub stage1_scores: Vec<Stage1Point>,
    pub iterations: usize,
    pub seed_base: u64,
}

fn check(x: ArrayView2<'_, f64>, y: &[f64]) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(SelectionError::InvalidInput(format!(
            "{} rows but {} targets",
            x.nrows(),
            y.len()
        )));
    }
    if y.len() < 5 {
        return Err(SelectionError::InvalidInput(format!(
            "ranking needs at least 5 rows, got {}",
            y.len()
        )));
    }
    if x.ncols() == 0 {
        return Err(SelectionError::InvalidInput("no feature columns".into()));
    }
    Ok(())
}

/// Column indices by descending absolute linear-SVR weight, ties by index.
pub fn rank_by_importance(x: ArrayView2<'_, f64>, y: &[f64], params: &SvrParams) -> Result<Vec<usize>> {
    check(x, y)?;
    let w = train_svr(x, y, Kernel::Linear, params)?.linear_weights()?;
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[b].abs().total_cmp(&w[a].abs()).then(a.cmp(&b)));
    Ok(order)
}

/// `step, 2*step, ...` up to `d`, always ending with `d`.
pub fn candidate_ks(d: usize, step: usize) -> Vec<usize> {
    let mut ks: Vec<usize> = (1..).map(|m| m * step).take_while(|&k| k < d).collect();
    ks.push(d);
    ks
}

fn top_k_sorted(order: &[usize], k: usize) -> Vec<usize> {
    let mut top = order[..k].to_vec();
    top.sort_unstable();
    top
}

fn rows(x: ArrayView2<'_, f64>, y: &[f64], idx: &[usize]) -> (ndarray::Array2<f64>, Vec<f64>) {
    (x.select(Axis(0), idx), idx.iter().map(|&i| y[i]).collect())
}

/// Stage 1: returns the best `k` and the mean-PLCC curve over candidates.
pub fn stage1_select_k(
    x: ArrayView2<'_, f64>,
    y: &[f64],
    cfg: &SelectionConfig,
) -> Result<(usize, Vec<Stage1Point>)> {
    check(x, y)?;
    let d = x.ncols();
    if cfg.step == 0 || d < cfg.step {
        return Err(SelectionError::InvalidInput(format!(
            "{d} features cannot be scanned in steps of {}",
            cfg.step
        )));
    }
    let ks = candidate_ks(d, cfg.step);

    let per_iter: Vec<Option<Vec<Option<f64>>>> = (0..cfg.stage1_iterations)
        .into_par_iter()
        .map(|it| -> Result<Option<Vec<Option<f64>>>> {
            let seed = cfg.seed_base + it as u64;
            let (train, test) = random_holdout(y.len(), cfg.test_fraction, seed);
            let (xt, yt) = rows(x, y, &train);
            let (xv, yv) = rows(x, y, &test);
            if yv.iter().all(|&v| v == yv[0]) {
                warn!("stage 1 split {seed}: constant test targets, skipped");
                return Ok(None);
            }
            let order = rank_by_importance(xt.view(), &yt, &cfg.svr)?;
            let mut scores = Vec::with_capacity(ks.len());
            for &k in &ks {
                let cols = top_k_sorted(&order, k);
                let model = train_svr(xt.select(Axis(1), &cols).view(), &yt, Kernel::Linear, &cfg.svr)?;
                let pred = model.predict(xv.select(Axis(1), &cols).view())?;
                scores.push(plcc(&pred, &yv).ok());
            }
            Ok(Some(scores))
        })
        .collect::<Result<_>>()?;

    if per_iter.iter().all(Option::is_none) {
        return Err(SelectionError::AllSkipped);
    }
    let curve: Vec<Stage1Point> = ks
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let vals: Vec<f64> = per_iter.iter().flatten().filter_map(|s| s[j]).collect();
            Stage1Point {
                k,
                mean_plcc: (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64),
                valid_iterations: vals.len(),
            }
        })
        .collect();
    let mut best: Option<(usize, f64)> = None;
    for p in &curve {
        if let Some(m) = p.mean_plcc {
            if best.is_none_or(|(_, b)| m > b) {
                best = Some((p.k, m));
            }
        }
    }
    let (k, _) = best.ok_or(SelectionError::AllSkipped)?;
    Ok((k, curve))
}

/// Stage 2: the `k` columns most often ranked in the top `k`.
pub fn stage2_select(x: ArrayView2<'_, f64>, y: &[f64], k: usize, cfg: &SelectionConfig) -> Result<SelectionResult> {
    check(x, y)?;
    let d = x.ncols();
    if k == 0 || k > d {
        return Err(SelectionError::InvalidInput(format!("k = {k} is outside 1..={d}")));
    }
    let tops: Vec<Vec<usize>> = (0..cfg.stage2_iterations)
        .into_par_iter()
        .map(|it| -> Result<Vec<usize>> {
            let seed = cfg.seed_base + it as u64;
            let (train, _) = random_holdout(y.len(), cfg.test_fraction, seed);
            let (xt, yt) = rows(x, y, &train);
            let order = rank_by_importance(xt.view(), &yt, &cfg.svr)?;
            Ok(order[..k].to_vec())
        })
        .collect::<Result<_>>()?;
    let mut frequency = vec![0u32; d];
    for top in &tops {
        for &j in top {
            frequency[j] += 1;
        }
    }
    let mut by_freq: Vec<usize> = (0..d).collect();
    by_freq.sort_by(|&a, &b| frequency[b].cmp(&frequency[a]).then(a.cmp(&b)));
    Ok(SelectionResult {
        k,
        selected_indices: top_k_sorted(&by_freq, k),
        selected_names: Vec::new(),
        frequency,
        stage1_scores: Vec::new(),
        iterations: cfg.stage2_iterations,
        seed_base: cfg.seed_base,
    })
}

/// Both stages on `data`, with column names recorded.
pub fn select_features(data: &Dataset, cfg: &SelectionConfig) -> Result<SelectionResult> {
    let (k, curve) = stage1_select_k(data.x.view(), &data.y, cfg)?;
    let mut result = stage2_select(data.x.view(), &data.y, k, cfg)?;
    result.stage1_scores = curve;
    result.selected_names = result
        .selected_indices
        .iter()
        .map(|&i| data.feature_names[i].clone())
        .collect();
    Ok(result)
}

/// Keeps the selected columns in ascending index order.
///
/// When the result carries names they must match the table's names at
/// those indices.
pub fn apply_selection(data: &Dataset, result: &SelectionResult) -> Result<Dataset> {
    let width = data.width();
    if let Some(&index) = result.selected_indices.iter().find(|&&i| i >= width) {
        return Err(SelectionError::IndexOutOfRange { index, width });
    }
    let mut idx = result.selected_indices.clone();
    idx.sort_unstable();
    idx.dedup();
    if !result.selected_names.is_empty() {
        for (&i, name) in idx.iter().zip(&result.selected_names) {
            if &data.feature_names[i] != name {
                return Err(SelectionError::NameMismatch(format!(
                    "column {i} is `{}`, expected `{name}`",
                    data.feature_names[i]
                )));
            }
        }
    }
    Ok(data.columns(&idx))
}
