use std::collections::BTreeMap;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{make_split, method_aggregate, plcc, remap, rmse, srcc, EvalError, Logistic4, MetricError, Protocol, RemapFallback};
use crate::fusion::Dataset;
use crate::rng::SplitMix64;
use crate::selection::{apply_selection, select_features, SelectionConfig, SelectionResult};
use crate::svr::{grid_search, train_svr, GridCriterion, GridSpec, Kernel, SvrParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regressor {
    Svr,
    /// Uniform guesses on `[1, 5]`; a chance-level reference.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    Rbf,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub protocol: Protocol,
    pub iterations: usize,
    /// Iteration `i` uses seed `seed_base + i` for its split and grid search.
    pub seed_base: u64,
    pub kernel: KernelFamily,
    pub svr: SvrParams,
    pub grid: GridSpec,
    pub selection: SelectionConfig,
    pub regressor: Regressor,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            protocol: Protocol::FacialId,
            iterations: 100,
            seed_base: 0,
            kernel: KernelFamily::Rbf,
            svr: SvrParams::default(),
            grid: GridSpec::default(),
            selection: SelectionConfig::default(),
            regressor: Regressor::Svr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelMetrics {
    pub n: usize,
    /// On raw predictions.
    pub srcc: f64,
    /// On remapped predictions.
    pub plcc: f64,
    /// On remapped predictions.
    pub rmse: f64,
    pub logistic: Option<Logistic4>,
    pub remap_fallback: Option<RemapFallback>,
}

impl LevelMetrics {
    pub fn compute(pred: &[f64], gt: &[f64]) -> Result<Self, MetricError> {
        let s = srcc(pred, gt)?;
        let r = remap(pred, gt);
        if let Some(reason) = r.fallback {
            if reason == RemapFallback::NonConvergence {
                warn!("logistic fit failed; identity remap used");
            }
        }
        Ok(Self {
            n: pred.len(),
            srcc: s,
            plcc: plcc(&r.values, gt)?,
            rmse: rmse(&r.values, gt)?,
            logistic: r.fit,
            remap_fallback: r.fallback,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub c: f64,
    pub gamma: Option<f64>,
    pub criterion: Option<GridCriterion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub seed: u64,
    pub held_out: Vec<String>,
    pub n_train: usize,
    pub n_test: usize,
    pub hyperparameters: Option<Hyperparameters>,
    pub video: Option<LevelMetrics>,
    pub method: Option<LevelMetrics>,
    /// Why the iteration has no video-level metrics.
    pub skipped: Option<String>,
    /// Why the iteration has no method-level metrics.
    pub method_skipped: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub std: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, std })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub srcc: Stat,
    pub plcc: Stat,
    pub rmse: Stat,
    pub iterations: usize,
}

impl Aggregate {
    pub fn of<'a>(levels: impl IntoIterator<Item = &'a LevelMetrics>) -> Option<Self> {
        let levels: Vec<&LevelMetrics> = levels.into_iter().collect();
        let col = |f: fn(&LevelMetrics) -> f64| -> Vec<f64> { levels.iter().map(|m| f(m)).collect() };
        Some(Self {
            srcc: Stat::of(&col(|m| m.srcc))?,
            plcc: Stat::of(&col(|m| m.plcc))?,
            rmse: Stat::of(&col(|m| m.rmse))?,
            iterations: levels.len(),
        })
    }
}

/// Run-specific information kept apart from the reproducible content.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub created_unix: u64,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub protocol: Protocol,
    pub feature_model: String,
    pub n_videos: usize,
    pub n_features: usize,
    pub config: BenchConfig,
    pub selection: Option<SelectionResult>,
    pub iterations: Vec<IterationRecord>,
    pub aggregate: Option<Aggregate>,
    pub method_aggregate: Option<Aggregate>,
    pub skipped: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

impl EvaluationReport {
    fn assemble(
        protocol: Protocol,
        feature_model: &str,
        data: &Dataset,
        config: BenchConfig,
        selection: Option<SelectionResult>,
        iterations: Vec<IterationRecord>,
    ) -> Self {
        let aggregate = Aggregate::of(iterations.iter().filter_map(|r| r.video.as_ref()));
        let method_aggregate = Aggregate::of(iterations.iter().filter_map(|r| r.method.as_ref()));
        let skipped = iterations.iter().filter(|r| r.video.is_none()).count();
        Self {
            protocol,
            feature_model: feature_model.to_string(),
            n_videos: data.len(),
            n_features: data.width(),
            config,
            selection,
            iterations,
            aggregate,
            method_aggregate,
            skipped,
            metadata: None,
        }
    }

    /// Most frequent grid-search choice; ties go to the smaller `C`, then
    /// the smaller `gamma`.
    pub fn modal_hyperparameters(&self) -> Option<(f64, Option<f64>)> {
        let mut counts: BTreeMap<(u64, u64), (usize, f64, Option<f64>)> = BTreeMap::new();
        for h in self.iterations.iter().filter_map(|r| r.hyperparameters.as_ref()) {
            // ordered keys: positive floats sort like their bit patterns
            let key = (h.c.to_bits(), h.gamma.map_or(0, f64::to_bits));
            counts.entry(key).or_insert((0, h.c, h.gamma)).0 += 1;
        }
        let mut best: Option<(usize, f64, Option<f64>)> = None;
        for (_, v) in counts {
            if best.is_none_or(|b| v.0 > b.0) {
                best = Some(v);
            }
        }
        best.map(|(_, c, g)| (c, g))
    }
}

fn random_guesses(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::new(seed);
    (0..n).map(|_| 1.0 + 4.0 * rng.next_f64()).collect()
}

fn predict_test(
    train: &Dataset,
    test: &Dataset,
    cfg: &BenchConfig,
    seed: u64,
) -> Result<(Vec<f64>, Option<Hyperparameters>), String> {
    match cfg.regressor {
        Regressor::Random => Ok((random_guesses(test.len(), seed), None)),
        Regressor::Svr => {
            let rbf = cfg.kernel == KernelFamily::Rbf;
            let g = grid_search(train.x.view(), &train.y, rbf, &cfg.grid, &cfg.svr, seed)
                .map_err(|e| format!("grid search failed: {e}"))?;
            let model = train_svr(train.x.view(), &train.y, g.best_kernel(), &cfg.svr.with_c(g.best_c))
                .map_err(|e| format!("training failed: {e}"))?;
            let pred = model
                .predict(test.x.view())
                .map_err(|e| format!("prediction failed: {e}"))?;
            let h = Hyperparameters {
                c: g.best_c,
                gamma: g.best_gamma,
                criterion: Some(g.criterion),
            };
            Ok((pred, Some(h)))
        }
    }
}

fn evaluate(
    seed: u64,
    held_out: Vec<String>,
    train: &Dataset,
    test: &Dataset,
    outcome: Result<(Vec<f64>, Option<Hyperparameters>), String>,
) -> IterationRecord {
    let mut record = IterationRecord {
        seed,
        held_out,
        n_train: train.len(),
        n_test: test.len(),
        hyperparameters: None,
        video: None,
        method: None,
        skipped: None,
        method_skipped: None,
    };
    let pred = match outcome {
        Ok((pred, h)) => {
            record.hyperparameters = h;
            pred
        }
        Err(reason) => {
            warn!("iteration {seed} skipped: {reason}");
            record.skipped = Some(reason);
            return record;
        }
    };
    match LevelMetrics::compute(&pred, &test.y) {
        Ok(m) => record.video = Some(m),
        Err(e) => {
            warn!("iteration {seed} skipped: {e}");
            record.skipped = Some(e.to_string());
        }
    }
    let groups: Vec<&str> = test.records.iter().map(|r| r.submit_id.as_str()).collect();
    match method_aggregate(&pred, &test.y, &groups)
        .map_err(|e| e.to_string())
        .and_then(|m| LevelMetrics::compute(&m.pred, &m.gt).map_err(|e| e.to_string()))
    {
        Ok(m) => record.method = Some(m),
        Err(e) => record.method_skipped = Some(e),
    }
    record
}

fn maybe_select(
    data: &Dataset,
    cfg: &SelectionConfig,
    given: Option<&SelectionResult>,
) -> Result<(Dataset, Option<SelectionResult>), EvalError> {
    let selection = match given {
        Some(s) => Some(s.clone()),
        None if data.width() > cfg.min_dims => {
            info!("selecting features from {} columns", data.width());
            Some(select_features(data, cfg)?)
        }
        None => None,
    };
    match selection {
        Some(s) => Ok((apply_selection(data, &s)?, Some(s))),
        None => Ok((data.clone(), None)),
    }
}

/// Repeated grouped train/test evaluation of one feature table.
///
/// Feature selection (when the table is wide, or when `selection` is given)
/// happens once on the whole table before the iterations.
pub fn run_benchmark(
    data: &Dataset,
    feature_model: &str,
    cfg: &BenchConfig,
    selection: Option<&SelectionResult>,
) -> Result<EvaluationReport, EvalError> {
    if cfg.iterations == 0 {
        return Err(EvalError::Config("iterations must be positive".into()));
    }
    let (data, selection) = maybe_select(data, &cfg.selection, selection)?;
    // surfaces protocol errors before any training
    make_split(&data.records, cfg.protocol, cfg.seed_base)?;

    let iterations: Vec<IterationRecord> = (0..cfg.iterations as u64)
        .into_par_iter()
        .map(|i| -> Result<IterationRecord, EvalError> {
            let seed = cfg.seed_base + i;
            let (spec, train_idx, test_idx) = make_split(&data.records, cfg.protocol, seed)?;
            let train = data.rows(&train_idx);
            let test = data.rows(&test_idx);
            let outcome = predict_test(&train, &test, cfg, seed);
            Ok(evaluate(seed, spec.held_out, &train, &test, outcome))
        })
        .collect::<Result<_, _>>()?;
    Ok(EvaluationReport::assemble(cfg.protocol, feature_model, &data, cfg.clone(), selection, iterations))
}

/// Hyperparameters and feature subset carried over from an intra-subset run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrozenModel {
    pub kernel: Kernel,
    pub c: f64,
    pub selection: Option<SelectionResult>,
}

/// Train once on `train` with frozen settings and evaluate on `test`.
pub fn run_inter_subset(
    train: &Dataset,
    test: &Dataset,
    feature_model: &str,
    frozen: &FrozenModel,
    cfg: &BenchConfig,
) -> Result<EvaluationReport, EvalError> {
    if train.feature_names != test.feature_names {
        let first = train
            .feature_names
            .iter()
            .zip(&test.feature_names)
            .position(|(a, b)| a != b)
            .unwrap_or(train.width().min(test.width()));
        return Err(EvalError::Schema(format!(
            "train has {} features, test has {}; first difference at column {first}",
            train.width(),
            test.width()
        )));
    }
    let (train, test) = match &frozen.selection {
        Some(s) => (apply_selection(train, s)?, apply_selection(test, s)?),
        None => (train.clone(), test.clone()),
    };
    let seed = cfg.seed_base;
    let outcome = match cfg.regressor {
        Regressor::Random => Ok((random_guesses(test.len(), seed), None)),
        Regressor::Svr => train_svr(train.x.view(), &train.y, frozen.kernel, &cfg.svr.with_c(frozen.c))
            .and_then(|m| m.predict(test.x.view()))
            .map(|p| {
                let h = Hyperparameters {
                    c: frozen.c,
                    gamma: frozen.kernel.gamma(),
                    criterion: None,
                };
                (p, Some(h))
            })
            .map_err(|e| e.to_string()),
    };
    let mut subsets: Vec<String> = test.records.iter().map(|r| r.subset.to_string()).collect();
    subsets.sort();
    subsets.dedup();
    let record = evaluate(seed, subsets, &train, &test, outcome);
    let config = BenchConfig {
        protocol: Protocol::InterSubset,
        iterations: 1,
        ..cfg.clone()
    };
    Ok(EvaluationReport::assemble(
        Protocol::InterSubset,
        feature_model,
        &test,
        config,
        frozen.selection.clone(),
        vec![record],
    ))
}
