mod bench;
mod model;
mod prep;

use std::collections::HashSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use vra::datamodel::{load_consolidated, load_features, load_manifest, VideoRecord};
use vra::fusion::{consolidate, fuse_mean_std, Dataset};
use vra::handcrafted::{extract_video, FeatureModel};
use vra::preprocess::read_frame_dir;

use crate::args::Command;
use crate::config::Config;
use crate::error::{CliError, Result};

pub fn run(command: Command, cfg: &Config) -> Result<()> {
    match command {
        Command::Crop(a) => prep::crop(&a, cfg),
        Command::Extract(a) => prep::extract(&a, cfg),
        Command::Fuse(a) => prep::fuse(&a),
        Command::Synth(a) => prep::synth(&a, cfg),
        Command::Select(a) => model::select(&a, cfg),
        Command::Train(a) => model::train(&a, cfg),
        Command::Eval(a) => model::eval(&a),
        Command::Bench(a) => bench::bench(&a, cfg),
    }
}

/// Where a feature table comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureSource {
    /// Extract with a native model from cropped frame directories.
    Model(FeatureModel),
    /// Directory of `<video_id>.csv` frame feature files.
    FrameDir(PathBuf),
    /// Consolidated video-level CSV.
    Consolidated(PathBuf),
}

impl FeatureSource {
    pub fn parse(arg: &str) -> Result<Self> {
        let path = PathBuf::from(arg);
        if path.is_dir() {
            return Ok(FeatureSource::FrameDir(path));
        }
        if path.is_file() {
            return Ok(FeatureSource::Consolidated(path));
        }
        match arg.parse::<FeatureModel>() {
            Ok(m) => Ok(FeatureSource::Model(m)),
            Err(_) => Err(CliError::Missing(path)),
        }
    }

    /// Short label recorded in reports.
    pub fn label(&self) -> String {
        let stem = |p: &Path| {
            p.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string())
        };
        match self {
            FeatureSource::Model(m) => m.name().to_string(),
            FeatureSource::FrameDir(p) | FeatureSource::Consolidated(p) => stem(p),
        }
    }
}

/// Joins a manifest with its features into a fused table.
///
/// Consolidated files may hold more videos than the manifest (e.g. every
/// subset in one file); only the manifest's videos are kept.
pub fn load_table(
    manifest: &Path,
    source: &FeatureSource,
    frames: Option<&Path>,
    stride: usize,
) -> Result<Dataset> {
    let records = load_manifest(manifest)?;
    let vectors = match source {
        FeatureSource::Consolidated(path) => {
            let ids: HashSet<&str> = records.iter().map(|r| r.video_id.as_str()).collect();
            load_consolidated(path)?
                .into_iter()
                .filter(|v| ids.contains(v.video_id.as_str()))
                .collect()
        }
        FeatureSource::FrameDir(dir) => records
            .par_iter()
            .map(|r| Ok(fuse_mean_std(&load_features(feature_file(dir, r))?)?))
            .collect::<Result<Vec<_>>>()?,
        FeatureSource::Model(model) => {
            let Some(root) = frames else {
                return Err(CliError::config(
                    format!("extracting {model} features needs the cropped frames"),
                    "pass --frames <dir> (the output of `vra crop`), or a feature file/directory to --features",
                ));
            };
            records
                .par_iter()
                .map(|r| {
                    let frames = read_frame_dir(root.join(&r.video_id))?;
                    Ok(fuse_mean_std(&extract_video(&r.video_id, &frames, *model, stride)?)?)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(consolidate(&vectors, &records)?)
}

pub fn feature_file(dir: &Path, record: &VideoRecord) -> PathBuf {
    dir.join(format!("{}.csv", record.video_id))
}

pub fn media_root(explicit: Option<&Path>, manifest: &Path) -> PathBuf {
    explicit.map(Path::to_path_buf).unwrap_or_else(|| {
        manifest
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."))
    })
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("report types serialize");
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                ensure_dir(parent)?;
            }
            std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
        }
        None => stdout_line(&text),
    }
}

/// One-line JSON summary on stdout.
pub fn summary(value: serde_json::Value) -> Result<()> {
    stdout_line(&value.to_string())
}

// A closed pipe (`vra ... | head`) is not an error.
fn stdout_line(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::io("<stdout>", e)),
        _ => Ok(()),
    }
}
