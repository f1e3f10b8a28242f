use std::collections::{BTreeMap, BTreeSet};

use log::warn;
use rayon::prelude::*;
use serde_json::json;
use vra::datamodel::{load_boxes, load_features, load_manifest, read_box_file, write_consolidated, write_features};
use vra::fusion::fuse_mean_std;
use vra::handcrafted::extract_video;
use vra::preprocess::{build_crop_region, crop_video, read_frame_dir, write_frame_dir, CropOrder, CropRegion};
use vra::synth::{generate, write_dataset};

use super::{ensure_dir, feature_file, media_root, summary, write_json};
use crate::args::{CropArgs, ExtractArgs, FuseArgs, SynthArgs};
use crate::config::Config;
use crate::error::{CliError, Result};

pub fn crop(args: &CropArgs, cfg: &Config) -> Result<()> {
    let records = load_manifest(&args.manifest)?;
    let root = media_root(args.media_root.as_deref(), &args.manifest);
    let factor = args.factor.unwrap_or(cfg.crop.factor);
    let order: CropOrder = args.order.map_or(cfg.crop.order, Into::into);

    let pairs: BTreeSet<&str> = records.iter().map(|r| r.facial_id_pair.as_str()).collect();
    let mut boxes = BTreeMap::new();
    for pair in pairs {
        let path = args.boxes.join(format!("{pair}.json"));
        if !path.is_file() {
            return Err(CliError::Missing(path));
        }
        let source = read_box_file(&path)?.video_id;
        boxes.insert(pair, (source, load_boxes(&path)?));
    }
    ensure_dir(&args.out)?;

    let outcomes: Vec<Option<(String, CropRegion)>> = records
        .par_iter()
        .map(|r| {
            let src = root.join(&r.path);
            if !src.is_dir() {
                if args.skip_missing {
                    warn!("{}: no media at {}, skipped", r.video_id, src.display());
                    return Ok(None);
                }
                return Err(CliError::Missing(src));
            }
            let frames = read_frame_dir(&src)?;
            let (w, h) = frames[0].dimensions();
            let (source, b) = &boxes[r.facial_id_pair.as_str()];
            let region = build_crop_region(source, b, factor, i64::from(w), i64::from(h), order)?;
            write_frame_dir(&crop_video(&frames, &region)?, args.out.join(&r.video_id))?;
            Ok(Some((r.facial_id_pair.clone(), region)))
        })
        .collect::<Result<_>>()?;

    let cropped = outcomes.iter().flatten().count();
    let regions: BTreeMap<String, CropRegion> = outcomes.into_iter().flatten().collect();
    write_json(&regions, Some(&args.out.join("regions.json")))?;
    summary(json!({"command": "crop", "cropped": cropped, "skipped": records.len() - cropped}))?;
    Ok(())
}

pub fn extract(args: &ExtractArgs, cfg: &Config) -> Result<()> {
    let stride = args.stride.unwrap_or(cfg.extract.stride);
    let Some(manifest) = &args.manifest else {
        let id = args
            .frames
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "video".into());
        let frames = read_frame_dir(&args.frames)?;
        let m = extract_video(&id, &frames, args.model, stride)?;
        if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
            ensure_dir(parent)?;
        }
        write_features(&m, &args.out)?;
        summary(json!({"command": "extract", "videos": 1, "frames": m.n_frames(), "width": m.width()}))?;
        return Ok(());
    };

    let records = load_manifest(manifest)?;
    ensure_dir(&args.out)?;
    let done: Vec<bool> = records
        .par_iter()
        .map(|r| {
            let dir = args.frames.join(&r.video_id);
            if !dir.is_dir() {
                if args.skip_missing {
                    warn!("{}: no cropped frames at {}, skipped", r.video_id, dir.display());
                    return Ok(false);
                }
                return Err(CliError::Missing(dir));
            }
            let m = extract_video(&r.video_id, &read_frame_dir(&dir)?, args.model, stride)?;
            write_features(&m, feature_file(&args.out, r))?;
            Ok(true)
        })
        .collect::<Result<_>>()?;
    let n = done.iter().filter(|d| **d).count();
    summary(json!({
        "command": "extract",
        "model": args.model.name(),
        "videos": n,
        "skipped": records.len() - n,
        "width": args.model.dim(),
    }))?;
    Ok(())
}

pub fn fuse(args: &FuseArgs) -> Result<()> {
    let records = load_manifest(&args.manifest)?;
    let fused: Vec<Option<_>> = records
        .par_iter()
        .map(|r| {
            let path = feature_file(&args.features, r);
            if !path.is_file() {
                if args.skip_missing {
                    warn!("{}: no frame features at {}, skipped", r.video_id, path.display());
                    return Ok(None);
                }
                return Err(CliError::Missing(path));
            }
            Ok(Some(fuse_mean_std(&load_features(&path)?)?))
        })
        .collect::<Result<_>>()?;
    let vectors: Vec<_> = fused.into_iter().flatten().collect();
    if vectors.is_empty() {
        return Err(CliError::config(
            "no feature files to fuse",
            "run `vra extract` first or point --features at its output directory",
        ));
    }
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    write_consolidated(&vectors, &args.out)?;
    summary(json!({
        "command": "fuse",
        "videos": vectors.len(),
        "skipped": records.len() - vectors.len(),
        "width": vectors[0].values.len(),
    }))?;
    Ok(())
}

pub fn synth(args: &SynthArgs, cfg: &Config) -> Result<()> {
    let mut sc = cfg.synth.clone();
    if let Some(v) = args.seed {
        sc.seed = v;
    }
    if let Some(v) = args.frames {
        sc.frames = v;
    }
    if let Some(v) = args.dims {
        sc.dims = v;
        sc.informative = sc.informative.min(v);
    }
    if let Some(v) = args.media_videos {
        sc.media_videos = v;
    }
    if sc.frames == 0 || sc.dims == 0 || sc.informative > sc.dims {
        return Err(CliError::config(
            format!(
                "synthetic data needs frames >= 1 and 0 < informative <= dims (got frames {}, dims {}, informative {})",
                sc.frames, sc.dims, sc.informative
            ),
            "adjust --frames/--dims or [synth] in the config",
        ));
    }
    let data = generate(&sc);
    write_dataset(&data, &args.out)?;
    write_json(&sc, Some(&args.out.join("synth.json")))?;
    summary(json!({"command": "synth", "videos": data.videos.len(), "seed": sc.seed}))?;
    Ok(())
}
