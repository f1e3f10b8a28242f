use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DataError, Result};

/// Detected face box on one frame, in integer pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub frame_index: u32,
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
}

/// One entry of the box JSON file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxEntry {
    pub frame: u32,
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxFile {
    pub video_id: String,
    pub boxes: Vec<BoxEntry>,
}

pub fn read_box_file(path: impl AsRef<Path>) -> Result<BoxFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| DataError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| DataError::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_box_file(file: &BoxFile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(file).map_err(|source| DataError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    std::fs::write(path, text).map_err(|e| DataError::io(path, e))
}

/// Loads and validates the boxes of one video, sorted by frame index.
pub fn load_boxes(path: impl AsRef<Path>) -> Result<Vec<BoundingBox>> {
    let path = path.as_ref();
    let file = read_box_file(path)?;
    validate_entries(&file)
}

fn validate_entries(file: &BoxFile) -> Result<Vec<BoundingBox>> {
    if file.boxes.is_empty() {
        return Err(DataError::Validation(format!(
            "no boxes for video `{}`",
            file.video_id
        )));
    }
    let mut boxes = file
        .boxes
        .iter()
        .map(|b| {
            if b.w <= 0 || b.h <= 0 {
                Err(DataError::Validation(format!(
                    "video `{}`, frame {}: box extent {}x{} must be positive",
                    file.video_id, b.frame, b.w, b.h
                )))
            } else {
                Ok(BoundingBox {
                    frame_index: b.frame,
                    x: b.x,
                    y: b.y,
                    w: b.w,
                    h: b.h,
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    boxes.sort_by_key(|b| b.frame_index);
    Ok(boxes)
}
