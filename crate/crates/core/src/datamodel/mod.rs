//! Dataset records, feature matrices, bounding boxes and their file formats.
//!
//! Three on-disk formats are shared with every producer and consumer of the
//! pipeline:
//!
//! * the manifest CSV (`video_id,subset,facial_id_pair,submit_id,path,r1..r5[,mos]`),
//! * frame feature CSVs (header = feature names, one row per frame) and the
//!   consolidated video-level CSV (same, with a leading `video_id` column),
//! * per-video box JSON (`{"video_id": .., "boxes": [{"frame", "x", "y", "w", "h"}]}`).

mod boxes;
mod features;
mod manifest;

use std::path::PathBuf;

pub use boxes::{load_boxes, read_box_file, write_box_file, BoundingBox, BoxEntry, BoxFile};
pub use features::{
    load_consolidated, load_features, write_consolidated, write_features, FrameFeatureMatrix,
    VideoFeatureVector,
};
pub use manifest::{load_manifest, write_manifest, Subset, VideoRecord, MANIFEST_COLUMNS};

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}, line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("duplicate video_id `{0}` in manifest")]
    Duplicate(String),
    #[error("feature format error: {0}")]
    Format(String),
    #[error("invalid value: {0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl DataError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DataError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = DataError> = std::result::Result<T, E>;
