//! Seeded synthetic dataset shaped like a three-subset face-swap benchmark.
//!
//! Every video has a latent realism score. Submissions are spread over a
//! range of quality levels, identity pairs add a small offset, and each video
//! adds its own deviation. Five simulated raters score the latent value on
//! the 1-5 scale. Frame features are monotone functions of the latent score
//! plus frame noise, mixed with pure-noise columns; optional PNG media
//! degrade with decreasing realism.

use std::path::Path;

use image::{Rgb, RgbImage};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::datamodel::{
    write_box_file, write_features, write_manifest, BoxEntry, BoxFile, DataError, FrameFeatureMatrix,
    Subset, VideoRecord,
};
use crate::fusion::{consolidate, fuse_mean_std, Dataset, FusionError};
use crate::preprocess::write_frame_dir;
use crate::rng::SplitMix64;

pub const PAIRS: usize = 20;
pub const CLIPS_PER_PAIR: usize = 2;
pub const RATERS: usize = 5;
/// Submissions per subset.
pub const SUBSET_SUBMITS: [(Subset, usize); 3] = [(Subset::C1, 6), (Subset::C2, 13), (Subset::C3, 16)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub seed: u64,
    pub frames: usize,
    /// Frame-feature columns; the first `informative` carry signal.
    pub dims: usize,
    pub informative: usize,
    /// Frames with media are generated for this many C3 videos.
    pub media_videos: usize,
    pub media_width: u32,
    pub media_height: u32,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            frames: 8,
            dims: 16,
            informative: 8,
            media_videos: 0,
            media_width: 128,
            media_height: 96,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthVideo {
    pub record: VideoRecord,
    pub latent: f64,
    pub frames: FrameFeatureMatrix,
}

#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub config: SynthConfig,
    pub videos: Vec<SynthVideo>,
}

impl SynthDataset {
    pub fn records(&self, subset: Subset) -> Vec<VideoRecord> {
        self.videos
            .iter()
            .filter(|v| v.record.subset == subset)
            .map(|v| v.record.clone())
            .collect()
    }

    /// Fused feature table of one subset, as `fuse` would build it from the
    /// written files.
    pub fn dataset(&self, subset: Subset) -> Result<Dataset, FusionError> {
        let videos: Vec<&SynthVideo> = self.videos.iter().filter(|v| v.record.subset == subset).collect();
        let vectors = videos
            .iter()
            .map(|v| fuse_mean_std(&v.frames))
            .collect::<Result<Vec<_>, _>>()?;
        let records: Vec<VideoRecord> = videos.iter().map(|v| v.record.clone()).collect();
        consolidate(&vectors, &records)
    }
}

fn subset_tag(subset: Subset) -> String {
    subset.to_string().to_ascii_lowercase()
}

pub fn feature_names(dims: usize) -> Vec<String> {
    (0..dims).map(|j| format!("synth.f{j:02}")).collect()
}

/// Value of informative column `j` for standardized latent `t`.
fn informative(j: usize, t: f64, latent: f64) -> f64 {
    match j % 8 {
        0 => t,
        1 => (0.8 * t).exp(),
        2 => t.tanh(),
        3 => -(t + 0.25 * t.powi(3)),
        4 => (latent + 1.0).ln(),
        5 => 1.0 / (1.0 + (-2.0 * t).exp()),
        6 => 0.5 * t + 0.1 * t.powi(3),
        _ => -2.0 * t,
    }
}

pub fn generate(cfg: &SynthConfig) -> SynthDataset {
    let mut rng = SplitMix64::new(cfg.seed);
    let pair_offset: Vec<f64> = (0..PAIRS).map(|_| 0.15 * rng.next_normal()).collect();
    let names = feature_names(cfg.dims);
    let mut videos = Vec::new();

    for (subset, n_submits) in SUBSET_SUBMITS {
        let tag = subset_tag(subset);
        let mut levels: Vec<f64> = (0..n_submits)
            .map(|j| 1.8 + 2.4 * j as f64 / (n_submits - 1) as f64)
            .collect();
        rng.shuffle(&mut levels);
        for (s, &level) in levels.iter().enumerate() {
            let submit = format!("{tag}-s{:02}", s + 1);
            for (p, &offset) in pair_offset.iter().enumerate() {
                let pair = format!("p{:02}", p + 1);
                for clip in 0..CLIPS_PER_PAIR {
                    let video_id = format!("{submit}-{pair}-{clip}");
                    let latent = (level + offset + 0.6 * rng.next_normal()).clamp(1.0, 5.0);
                    let ratings: Vec<u8> = (0..RATERS)
                        .map(|_| (latent + 0.25 * rng.next_normal()).round().clamp(1.0, 5.0) as u8)
                        .collect();
                    let record = VideoRecord::new(
                        video_id.clone(),
                        subset,
                        pair.clone(),
                        submit.clone(),
                        format!("media/{video_id}"),
                        ratings,
                    )
                    .expect("ratings are clamped to 1..=5");

                    let t = (latent - 3.0) / 1.2;
                    let nuisance: Vec<f64> = (0..cfg.dims)
                        .map(|j| if j < cfg.informative { 0.1 } else { 1.0 } * rng.next_normal())
                        .collect();
                    let mut rows = Array2::zeros((cfg.frames, cfg.dims));
                    for f in 0..cfg.frames {
                        for j in 0..cfg.dims {
                            let e = rng.next_normal();
                            rows[[f, j]] = if j < cfg.informative {
                                informative(j, t, latent) + nuisance[j] + 0.3 * e
                            } else {
                                nuisance[j] + e
                            };
                        }
                    }
                    let frames = FrameFeatureMatrix::new(video_id, names.clone(), rows)
                        .expect("synthetic features are finite");
                    videos.push(SynthVideo { record, latent, frames });
                }
            }
        }
    }
    SynthDataset {
        config: cfg.clone(),
        videos,
    }
}

fn face_box(pair: usize, frame: usize, cfg: &SynthConfig) -> BoxEntry {
    let (w, h) = (cfg.media_width as i64, cfg.media_height as i64);
    let bw = w * 2 / 5;
    let bh = h / 2;
    let jitter = ((pair * 7 + frame * 3) % 5) as i64 - 2;
    BoxEntry {
        frame: frame as u32,
        x: (w - bw) / 2 + jitter,
        y: (h - bh) / 2 - jitter / 2,
        w: bw,
        h: bh,
    }
}

/// Frames whose noise grows as realism drops.
fn render_frames(video: &SynthVideo, pair: usize, cfg: &SynthConfig, seed: u64) -> Vec<RgbImage> {
    let mut rng = SplitMix64::new(seed);
    let noise = 4.0 + 10.0 * (5.0 - video.latent);
    (0..cfg.frames)
        .map(|f| {
            let b = face_box(pair, f, cfg);
            RgbImage::from_fn(cfg.media_width, cfg.media_height, |x, y| {
                let (xf, yf) = (x as f64, y as f64);
                let mut v = 60.0 + 80.0 * yf / cfg.media_height as f64;
                let cx = b.x as f64 + b.w as f64 / 2.0;
                let cy = b.y as f64 + b.h as f64 / 2.0;
                let r = ((xf - cx) / (b.w as f64 / 2.0)).powi(2) + ((yf - cy) / (b.h as f64 / 2.0)).powi(2);
                if r <= 1.0 {
                    v = 170.0 + 25.0 * (xf * 0.35).sin() * (yf * 0.27).cos() - 30.0 * r;
                }
                v += noise * rng.next_normal();
                let g = v.round().clamp(0.0, 255.0) as u8;
                Rgb([g, g.saturating_sub(10), g.saturating_sub(20)])
            })
        })
        .collect()
}

/// Writes the dataset below `dir`:
///
/// * `manifest_c1.csv`, `manifest_c2.csv`, `manifest_c3.csv`,
/// * `features/<video_id>.csv` frame features,
/// * with media: `media/<video_id>/frame_*.png` and `boxes/<pair>.json`.
pub fn write_dataset(data: &SynthDataset, dir: impl AsRef<Path>) -> Result<(), DataError> {
    let dir = dir.as_ref();
    let features = dir.join("features");
    std::fs::create_dir_all(&features).map_err(|e| DataError::io(&features, e))?;
    for (subset, _) in SUBSET_SUBMITS {
        let path = dir.join(format!("manifest_{}.csv", subset_tag(subset)));
        write_manifest(&data.records(subset), path)?;
    }
    for v in &data.videos {
        write_features(&v.frames, features.join(format!("{}.csv", v.record.video_id)))?;
    }

    let cfg = &data.config;
    if cfg.media_videos == 0 {
        return Ok(());
    }
    let boxes = dir.join("boxes");
    std::fs::create_dir_all(&boxes).map_err(|e| DataError::io(&boxes, e))?;
    for p in 0..PAIRS {
        let pair = format!("p{:02}", p + 1);
        let file = BoxFile {
            video_id: format!("target-{pair}"),
            boxes: (0..cfg.frames).map(|f| face_box(p, f, cfg)).collect(),
        };
        write_box_file(&file, boxes.join(format!("{pair}.json")))?;
    }
    let media: Vec<&SynthVideo> = data
        .videos
        .iter()
        .filter(|v| v.record.subset == Subset::C3)
        .take(cfg.media_videos)
        .collect();
    for (i, v) in media.into_iter().enumerate() {
        let pair: usize = v.record.facial_id_pair[1..].parse::<usize>().unwrap_or(1) - 1;
        let frames = render_frames(v, pair, cfg, cfg.seed.wrapping_add(1 + i as u64));
        write_frame_dir(&frames, dir.join(&v.record.path)).map_err(|e| match e {
            crate::preprocess::PreprocessError::Data(d) => d,
            other => DataError::Validation(other.to_string()),
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subset_shapes() {
        let d = generate(&SynthConfig::default());
        assert_eq!(d.records(Subset::C3).len(), 640);
        assert_eq!(d.records(Subset::C1).len(), 240);
        assert_eq!(d.records(Subset::C2).len(), 520);
        assert!(d.videos.iter().all(|v| v.frames.rows.dim() == (8, 16)));
    }

    #[test]
    fn seeded() {
        let a = generate(&SynthConfig::default());
        let b = generate(&SynthConfig::default());
        assert_eq!(a.videos[17].frames, b.videos[17].frames);
        assert_eq!(a.videos[17].record, b.videos[17].record);
        let c = generate(&SynthConfig {
            seed: 1,
            ..Default::default()
        });
        assert_ne!(a.videos[17].frames, c.videos[17].frames);
    }

    #[test]
    fn fused_table() {
        let d = generate(&SynthConfig::default()).dataset(Subset::C1).unwrap();
        assert_eq!(d.x.dim(), (240, 32));
        assert!(d.y.iter().all(|&y| (1.0..=5.0).contains(&y)));
    }
}
