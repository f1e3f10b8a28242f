//! Metrics, logistic remapping, grouped splits and the benchmark runner.

mod benchmark;
mod logistic;
mod metrics;
pub mod optim;
mod split;

pub use benchmark::{
    run_benchmark, run_inter_subset, Aggregate, BenchConfig, EvaluationReport, FrozenModel,
    Hyperparameters, IterationRecord, KernelFamily, LevelMetrics, Metadata, Regressor, Stat,
};
pub use logistic::{fit_logistic4, remap, Logistic4, Remap, RemapFallback, LOGISTIC_MIN_POINTS};
pub use metrics::{average_ranks, plcc, rmse, srcc};
pub use split::{make_split, method_aggregate, MethodLevel, Protocol, SplitSpec};

use crate::selection::SelectionError;
use crate::svr::SvrError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("length mismatch: {pred} predictions vs {gt} targets")]
    Length { pred: usize, gt: usize },
    #[error("{n} points is too few (need at least {min})")]
    TooShort { n: usize, min: usize },
    #[error("metric undefined: {0} is constant")]
    Constant(&'static str),
    #[error("non-finite value in metric input")]
    NonFinite,
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("{0}")]
    Config(String),
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Svr(#[from] SvrError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
}
