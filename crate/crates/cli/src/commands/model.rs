use std::path::Path;

use serde::Serialize;
use serde_json::json;
use vra::evaluation::{method_aggregate, EvalError, KernelFamily, LevelMetrics};
use vra::fusion::Dataset;
use vra::selection::{apply_selection, select_features, SelectionResult};
use vra::svr::{grid_search, train_svr, SvrModel};

use super::{load_table, summary, write_json, FeatureSource};
use crate::args::{EvalArgs, Level, SelectArgs, TrainArgs};
use crate::config::Config;
use crate::error::{CliError, Result};

fn table(manifest: &Path, features: &Path) -> Result<Dataset> {
    let source = FeatureSource::parse(&features.to_string_lossy())?;
    if let FeatureSource::Model(m) = source {
        return Err(CliError::config(
            format!("`{m}` names an extractor, not a feature table"),
            "run `vra extract` and `vra fuse`, then pass the consolidated CSV",
        ));
    }
    load_table(manifest, &source, None, 1)
}

pub fn read_selection(path: &Path) -> Result<SelectionResult> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::config(
            format!("{}: not a selection file: {e}", path.display()),
            "pass the JSON written by `vra select`",
        )
    })
}

pub fn select(args: &SelectArgs, cfg: &Config) -> Result<()> {
    let data = table(&args.manifest, &args.features)?;
    let mut sc = cfg.bench.selection.clone();
    if let Some(seed) = args.seed_base {
        sc.seed_base = seed;
    }
    if data.width() <= sc.min_dims {
        log::info!(
            "{} columns is within min_dims = {}; the benchmark would not select, selecting as asked",
            data.width(),
            sc.min_dims
        );
    }
    let result = select_features(&data, &sc)?;
    write_json(&result, Some(&args.out))?;
    summary(json!({"command": "select", "width": data.width(), "k": result.k}))?;
    Ok(())
}

pub fn train(args: &TrainArgs, cfg: &Config) -> Result<()> {
    let mut data = table(&args.manifest, &args.features)?;
    if let Some(path) = &args.selection {
        data = apply_selection(&data, &read_selection(path)?)?;
    }
    let kernel: KernelFamily = args.kernel.map_or(cfg.bench.kernel, Into::into);
    let seed = args.seed_base.unwrap_or(cfg.bench.seed_base);
    let svr = &cfg.bench.svr;
    let g = grid_search(data.x.view(), &data.y, kernel == KernelFamily::Rbf, &cfg.bench.grid, svr, seed)?;
    let model = train_svr(data.x.view(), &data.y, g.best_kernel(), &svr.with_c(g.best_c))?
        .with_feature_names(data.feature_names.clone());
    model.save(&args.out)?;
    summary(json!({
        "command": "train",
        "n_train": data.len(),
        "width": data.width(),
        "c": g.best_c,
        "gamma": g.best_gamma,
        "support_vectors": model.support_indices.len(),
    }))?;
    Ok(())
}

#[derive(Serialize)]
struct Prediction {
    id: String,
    pred: f64,
    gt: f64,
}

#[derive(Serialize)]
struct EvalReport {
    level: &'static str,
    metrics: LevelMetrics,
    predictions: Vec<Prediction>,
}

/// Columns of `data` in the order of `names`.
fn columns_by_name(data: &Dataset, names: &[String]) -> Result<Dataset> {
    let idx = names
        .iter()
        .map(|n| {
            data.feature_names.iter().position(|f| f == n).ok_or_else(|| {
                CliError::Eval(EvalError::Schema(format!("the table has no column `{n}` the model was trained on")))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(data.columns(&idx))
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    let data = table(&args.manifest, &args.features)?;
    let model = SvrModel::load(&args.model)?;
    let data = if model.feature_names.is_empty() {
        data
    } else {
        columns_by_name(&data, &model.feature_names)?
    };
    let pred = model.predict_named(&data.feature_names, data.x.view())?;
    let (ids, pred, gt): (Vec<String>, Vec<f64>, Vec<f64>) = match args.level {
        Level::Video => (data.records.iter().map(|r| r.video_id.clone()).collect(), pred, data.y.clone()),
        Level::Method => {
            let groups: Vec<&str> = data.records.iter().map(|r| r.submit_id.as_str()).collect();
            let m = method_aggregate(&pred, &data.y, &groups)?;
            (m.labels, m.pred, m.gt)
        }
    };
    let metrics = LevelMetrics::compute(&pred, &gt).map_err(EvalError::from)?;
    let report = EvalReport {
        level: match args.level {
            Level::Video => "video",
            Level::Method => "method",
        },
        metrics,
        predictions: ids
            .into_iter()
            .zip(pred.iter().zip(&gt))
            .map(|(id, (&pred, &gt))| Prediction { id, pred, gt })
            .collect(),
    };
    write_json(&report, args.out.as_deref())
}
