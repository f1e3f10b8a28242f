use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use vra::evaluation::{
    run_benchmark, run_inter_subset, BenchConfig, EvaluationReport, FrozenModel, Metadata, Protocol, Regressor,
};
use vra::svr::Kernel;

use super::model::read_selection;
use super::{load_table, summary, write_json, FeatureSource};
use crate::args::{Baseline, BenchArgs};
use crate::config::Config;
use crate::error::{CliError, Result};

fn bench_config(args: &BenchArgs, cfg: &Config) -> BenchConfig {
    let mut bc = cfg.bench.clone();
    if let Some(p) = args.protocol {
        bc.protocol = p;
    }
    if let Some(n) = args.iterations {
        bc.iterations = n;
    }
    if let Some(s) = args.seed_base {
        bc.seed_base = s;
    }
    if let Some(k) = args.kernel {
        bc.kernel = k.into();
    }
    if let Some(Baseline::Random) = args.baseline {
        bc.regressor = Regressor::Random;
    }
    bc
}

fn read_report(path: &Path) -> Result<EvaluationReport> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::config(
            format!("{}: not a benchmark report: {e}", path.display()),
            "pass the JSON written by an intra-subset `vra bench` run",
        )
    })
}

/// Hyperparameters and selection carried over from the intra-subset run.
fn frozen_from(args: &BenchArgs, bc: &BenchConfig) -> Result<FrozenModel> {
    let Some(path) = &args.intra_report else {
        if bc.regressor == Regressor::Random {
            return Ok(FrozenModel {
                kernel: Kernel::Linear,
                c: 1.0,
                selection: None,
            });
        }
        return Err(CliError::config(
            "the inter-subset protocol reuses the intra-subset hyperparameters and selection",
            "pass --intra-report <report.json> from a facial-id or submit-id run on the training subset",
        ));
    };
    let intra = read_report(path)?;
    let Some((c, gamma)) = intra.modal_hyperparameters() else {
        return Err(CliError::config(
            format!("{}: no iteration recorded hyperparameters", path.display()),
            "use a report of an SVR run (not a random baseline)",
        ));
    };
    Ok(FrozenModel {
        kernel: gamma.map_or(Kernel::Linear, |gamma| Kernel::Rbf { gamma }),
        c,
        selection: intra.selection,
    })
}

pub fn bench(args: &BenchArgs, cfg: &Config) -> Result<()> {
    let bc = bench_config(args, cfg);
    let stride = cfg.extract.stride;
    let source = FeatureSource::parse(&args.features)?;
    let data = load_table(&args.manifest, &source, args.frames.as_deref(), stride)?;

    let mut report = if bc.protocol == Protocol::InterSubset {
        let (Some(train_manifest), Some(train_features)) = (&args.train_manifest, &args.train_features) else {
            return Err(CliError::config(
                "the inter-subset protocol needs a training subset",
                "pass --train-manifest and --train-features (e.g. the C3 files); --manifest/--features are the test side",
            ));
        };
        let train_source = FeatureSource::parse(train_features)?;
        let train = load_table(train_manifest, &train_source, args.frames.as_deref(), stride)?;
        let frozen = frozen_from(args, &bc)?;
        run_inter_subset(&train, &data, &source.label(), &frozen, &bc)?
    } else {
        let selection = args.selection.as_deref().map(read_selection).transpose()?;
        run_benchmark(&data, &source.label(), &bc, selection.as_ref())?
    };
    report.metadata = Some(Metadata {
        created_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    });
    write_json(&report, args.out.as_deref())?;
    if args.out.is_some() {
        let srcc = |a: Option<vra::evaluation::Aggregate>| a.map(|a| a.srcc.mean);
        summary(serde_json::json!({
            "command": "bench",
            "protocol": report.protocol,
            "iterations": report.iterations.len(),
            "video_srcc": srcc(report.aggregate),
            "method_srcc": srcc(report.method_aggregate),
        }))?;
    }
    Ok(())
}
