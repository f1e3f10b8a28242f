//! Native per-frame feature extractors.
//!
//! | model    | per frame | after mean/std fusion |
//! |----------|-----------|-----------------------|
//! | BRISQUE  | 36        | 72                    |
//! | GM-LOG   | 40        | 80                    |

mod brisque;
pub mod filter;
mod gmlog;
mod nss;

use std::fmt;
use std::str::FromStr;

use image::RgbImage;
use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datamodel::{DataError, FrameFeatureMatrix};

pub use brisque::{brisque_feature_names, brisque_frame, pairwise_products, BRISQUE_DIM};
pub use gmlog::{
    gmlog_feature_names, gmlog_frame, joint_histogram, GMLOG_DIM, GMLOG_EPSILON, GMLOG_LEVELS,
    GMLOG_NORM_SIGMA, GMLOG_QUANT_MAX, GMLOG_SIGMA,
};
pub use nss::{fit_aggd, fit_ggd, mscn, AggdFit, GgdFit, MIN_SAMPLES, MIN_SIDE, MSCN_C, MSCN_SIGMA};

#[derive(Debug, thiserror::Error)]
pub enum FeatureError {
    #[error("image {w}x{h} is too small; both sides must be at least {min}")]
    TooSmall { w: usize, h: usize, min: usize },
    #[error("distribution fit needs at least 100 samples, got {0}")]
    InsufficientSamples(usize),
    #[error("all samples are identical; the distribution fit is degenerate")]
    Degenerate,
    #[error("non-finite sample")]
    NonFinite,
    #[error("no frame of video `{0}` produced features")]
    NoUsableFrames(String),
    #[error(transparent)]
    Data(#[from] DataError),
}

pub type Result<T, E = FeatureError> = std::result::Result<T, E>;

/// Luminance on [0, 255] with ITU-R BT.601 weights.
pub fn luminance(frame: &RgbImage) -> Array2<f64> {
    let (w, h) = frame.dimensions();
    Array2::from_shape_fn((h as usize, w as usize), |(y, x)| {
        let [r, g, b] = frame.get_pixel(x as u32, y as u32).0;
        0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b)
    })
}

/// Natively implemented frame feature models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureModel {
    Brisque,
    Gmlog,
}

impl FeatureModel {
    pub fn name(self) -> &'static str {
        match self {
            FeatureModel::Brisque => "brisque",
            FeatureModel::Gmlog => "gmlog",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            FeatureModel::Brisque => BRISQUE_DIM,
            FeatureModel::Gmlog => GMLOG_DIM,
        }
    }

    pub fn feature_names(self) -> Vec<String> {
        match self {
            FeatureModel::Brisque => brisque_feature_names(),
            FeatureModel::Gmlog => gmlog_feature_names(),
        }
    }

    pub fn extract(self, luma: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        match self {
            FeatureModel::Brisque => brisque_frame(luma),
            FeatureModel::Gmlog => gmlog_frame(luma),
        }
    }
}

impl FromStr for FeatureModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "brisque" => Ok(FeatureModel::Brisque),
            "gmlog" | "gm-log" => Ok(FeatureModel::Gmlog),
            other => Err(format!("unknown feature model `{other}` (expected brisque or gmlog)")),
        }
    }
}

impl fmt::Display for FeatureModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Extracts per-frame features of one video, keeping every `stride`-th frame.
///
/// Frames whose statistics are degenerate (e.g. a flat black frame, where
/// the MSCN map is identically zero) are skipped with a warning; the video
/// fails only if no frame survives.
pub fn extract_video(
    video_id: &str,
    frames: &[RgbImage],
    model: FeatureModel,
    stride: usize,
) -> Result<FrameFeatureMatrix> {
    let sampled: Vec<&RgbImage> = frames.iter().step_by(stride.max(1)).collect();
    let per_frame: Vec<Result<Vec<f64>>> = sampled
        .par_iter()
        .map(|f| model.extract(luminance(f).view()))
        .collect();
    let mut rows = Vec::new();
    for (i, r) in per_frame.into_iter().enumerate() {
        match r {
            Ok(v) => rows.push(v),
            Err(FeatureError::Degenerate) => {
                log::warn!("{video_id}: sampled frame {i} is degenerate, skipped");
            }
            Err(e) => return Err(e),
        }
    }
    if rows.is_empty() {
        return Err(FeatureError::NoUsableFrames(video_id.to_string()));
    }
    let n = rows.len();
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    let rows = Array2::from_shape_vec((n, model.dim()), flat)
        .expect("extractors return fixed-width vectors");
    Ok(FrameFeatureMatrix::new(video_id, model.feature_names(), rows)?)
}
