//! Stable face cropping.
//!
//! Face boxes are detected on the original target video only. Each box is
//! enlarged about its center, the enlarged boxes are merged into the smallest
//! enclosing rectangle, and that single region crops every frame of every
//! face-swap video derived from the target. A fixed region per video avoids
//! frame-to-frame jitter of the crop.

use std::path::{Path, PathBuf};

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::datamodel::{BoundingBox, DataError};

/// Default box enlargement, wide enough to take in the whole head.
pub const DEFAULT_ENLARGE_FACTOR: f64 = 1.3;

#[derive(Debug, thiserror::Error)]
pub enum PreprocessError {
    #[error("cannot build a crop region from an empty box list")]
    NoBoxes,
    #[error("enlargement factor must be positive and finite, got {0}")]
    InvalidFactor(f64),
    #[error("frame dimensions must be positive, got {0}x{1}")]
    InvalidFrame(i64, i64),
    #[error("box ({x},{y},{w},{h}) lies entirely outside the {frame_w}x{frame_h} frame")]
    OutsideFrame {
        x: i64,
        y: i64,
        w: i64,
        h: i64,
        frame_w: i64,
        frame_h: i64,
    },
    #[error("crop region ({x},{y},{w},{h}) exceeds frame {index} of size {frame_w}x{frame_h}")]
    RegionOutOfBounds {
        index: usize,
        x: i64,
        y: i64,
        w: i64,
        h: i64,
        frame_w: u32,
        frame_h: u32,
    },
    #[error("frame {index} ({path}): {message}")]
    Media {
        index: usize,
        path: PathBuf,
        message: String,
    },
    #[error(transparent)]
    Data(#[from] DataError),
}

pub type Result<T, E = PreprocessError> = std::result::Result<T, E>;

/// Axis-aligned integer rectangle; `w` and `h` are positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
}

impl Rect {
    pub const fn new(x: i64, y: i64, w: i64, h: i64) -> Self {
        Self { x, y, w, h }
    }

    pub fn right(&self) -> i64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> i64 {
        self.y + self.h
    }
}

impl From<&BoundingBox> for Rect {
    fn from(b: &BoundingBox) -> Self {
        Rect::new(b.x, b.y, b.w, b.h)
    }
}

/// Crop rectangle shared by every swap video of one target video.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CropRegion {
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
    pub source_video_id: String,
}

impl CropRegion {
    pub fn rect(&self) -> Rect {
        Rect::new(self.x, self.y, self.w, self.h)
    }
}

/// Order in which per-frame boxes are enlarged and merged.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CropOrder {
    /// Enlarge every box, then take the union of the enlarged boxes.
    #[default]
    EnlargeThenUnion,
    /// Take the union first, then enlarge it once.
    UnionThenEnlarge,
}

/// Smallest rectangle containing every input rectangle.
pub fn union_boxes<'a, I>(boxes: I) -> Result<Rect>
where
    I: IntoIterator<Item = &'a Rect>,
{
    let mut iter = boxes.into_iter();
    let first = iter.next().ok_or(PreprocessError::NoBoxes)?;
    let (mut x0, mut y0, mut x1, mut y1) = (first.x, first.y, first.right(), first.bottom());
    for b in iter {
        x0 = x0.min(b.x);
        y0 = y0.min(b.y);
        x1 = x1.max(b.right());
        y1 = y1.max(b.bottom());
    }
    Ok(Rect::new(x0, y0, x1 - x0, y1 - y0))
}

/// Scales `rect` about its center by `factor`, rounds the edges to whole
/// pixels and intersects the result with the frame `[0, frame_w] x [0, frame_h]`.
pub fn enlarge_box(rect: Rect, factor: f64, frame_w: i64, frame_h: i64) -> Result<Rect> {
    if !(factor.is_finite() && factor > 0.0) {
        return Err(PreprocessError::InvalidFactor(factor));
    }
    if frame_w <= 0 || frame_h <= 0 {
        return Err(PreprocessError::InvalidFrame(frame_w, frame_h));
    }
    let outside = || PreprocessError::OutsideFrame {
        x: rect.x,
        y: rect.y,
        w: rect.w,
        h: rect.h,
        frame_w,
        frame_h,
    };
    let scale = |origin: i64, extent: i64| {
        let center = origin as f64 + extent as f64 / 2.0;
        let half = extent as f64 * factor / 2.0;
        ((center - half).round() as i64, (center + half).round() as i64)
    };
    let (x0, x1) = scale(rect.x, rect.w);
    let (y0, y1) = scale(rect.y, rect.h);
    let (x0, x1) = (x0.max(0), x1.min(frame_w));
    let (y0, y1) = (y0.max(0), y1.min(frame_h));
    if x1 <= x0 || y1 <= y0 {
        return Err(outside());
    }
    Ok(Rect::new(x0, y0, x1 - x0, y1 - y0))
}

/// Crop region of a target video from its detected boxes.
pub fn build_crop_region(
    source_video_id: &str,
    boxes: &[BoundingBox],
    factor: f64,
    frame_w: i64,
    frame_h: i64,
    order: CropOrder,
) -> Result<CropRegion> {
    let rects: Vec<Rect> = boxes.iter().map(Rect::from).collect();
    let rect = match order {
        CropOrder::EnlargeThenUnion => {
            let enlarged = rects
                .iter()
                .map(|r| enlarge_box(*r, factor, frame_w, frame_h))
                .collect::<Result<Vec<_>>>()?;
            union_boxes(&enlarged)?
        }
        CropOrder::UnionThenEnlarge => {
            enlarge_box(union_boxes(&rects)?, factor, frame_w, frame_h)?
        }
    };
    Ok(CropRegion {
        x: rect.x,
        y: rect.y,
        w: rect.w,
        h: rect.h,
        source_video_id: source_video_id.to_string(),
    })
}

/// Crops every frame to `region`. Output frames are all `w x h`.
pub fn crop_video(frames: &[RgbImage], region: &CropRegion) -> Result<Vec<RgbImage>> {
    frames
        .iter()
        .enumerate()
        .map(|(index, frame)| {
            let (fw, fh) = frame.dimensions();
            let fits = region.x >= 0
                && region.y >= 0
                && region.w > 0
                && region.h > 0
                && region.x + region.w <= i64::from(fw)
                && region.y + region.h <= i64::from(fh);
            if !fits {
                return Err(PreprocessError::RegionOutOfBounds {
                    index,
                    x: region.x,
                    y: region.y,
                    w: region.w,
                    h: region.h,
                    frame_w: fw,
                    frame_h: fh,
                });
            }
            Ok(image::imageops::crop_imm(
                frame,
                region.x as u32,
                region.y as u32,
                region.w as u32,
                region.h as u32,
            )
            .to_image())
        })
        .collect()
}

/// Keeps every `stride`-th frame, starting with the first.
pub fn sample_frames<T: Clone>(frames: &[T], stride: usize) -> Vec<T> {
    frames.iter().step_by(stride.max(1)).cloned().collect()
}

/// Lists the PNG frames of a frame directory in name order.
pub fn frame_paths(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let entries = std::fs::read_dir(dir).map_err(|e| DataError::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| DataError::io(dir, e))?.path();
        let is_png = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if is_png {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

/// Decodes a directory of PNG frames, in name order, to RGB.
pub fn read_frame_dir(dir: impl AsRef<Path>) -> Result<Vec<RgbImage>> {
    let paths = frame_paths(dir.as_ref())?;
    if paths.is_empty() {
        return Err(PreprocessError::Media {
            index: 0,
            path: dir.as_ref().to_path_buf(),
            message: "directory contains no PNG frames".into(),
        });
    }
    paths
        .iter()
        .enumerate()
        .map(|(index, p)| {
            image::open(p)
                .map(|img| img.to_rgb8())
                .map_err(|e| PreprocessError::Media {
                    index,
                    path: p.clone(),
                    message: e.to_string(),
                })
        })
        .collect()
}

/// Writes frames as `frame_00000.png`, `frame_00001.png`, ...
pub fn write_frame_dir(frames: &[RgbImage], dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| DataError::io(dir, e))?;
    for (index, frame) in frames.iter().enumerate() {
        let path = dir.join(format!("frame_{index:05}.png"));
        frame.save(&path).map_err(|e| PreprocessError::Media {
            index,
            path: path.clone(),
            message: e.to_string(),
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bb(x: i64, y: i64, w: i64, h: i64) -> BoundingBox {
        BoundingBox { frame_index: 0, x, y, w, h }
    }

    #[test]
    fn union_examples() {
        let r = |x, y, w, h| Rect::new(x, y, w, h);
        assert_eq!(union_boxes(&[r(0, 0, 10, 10)]).unwrap(), r(0, 0, 10, 10));
        assert_eq!(
            union_boxes(&[r(0, 0, 10, 10), r(5, 5, 10, 10)]).unwrap(),
            r(0, 0, 15, 15)
        );
        assert_eq!(union_boxes(&[r(2, 3, 4, 4), r(0, 0, 1, 1)]).unwrap(), r(0, 0, 6, 7));
        assert!(matches!(union_boxes(&[]), Err(PreprocessError::NoBoxes)));
    }

    #[test]
    fn enlarge_examples() {
        let r = Rect::new(100, 100, 100, 100);
        assert_eq!(enlarge_box(r, 1.3, 1080, 1920).unwrap(), Rect::new(85, 85, 130, 130));
        let r = Rect::new(0, 0, 100, 100);
        assert_eq!(enlarge_box(r, 1.3, 1080, 1920).unwrap(), Rect::new(0, 0, 115, 115));
        let r = Rect::new(17, 3, 41, 77);
        assert_eq!(enlarge_box(r, 1.0, 1080, 1920).unwrap(), r);
    }

    #[test]
    fn enlarge_errors() {
        let r = Rect::new(2000, 2000, 10, 10);
        assert!(matches!(
            enlarge_box(r, 1.3, 1080, 1920),
            Err(PreprocessError::OutsideFrame { .. })
        ));
        assert!(enlarge_box(Rect::new(0, 0, 1, 1), 0.0, 10, 10).is_err());
        assert!(enlarge_box(Rect::new(0, 0, 1, 1), 1.0, 0, 10).is_err());
    }

    #[test]
    fn region_examples() {
        let one = build_crop_region("t", &[bb(100, 100, 100, 100)], 1.3, 1080, 1920, CropOrder::default())
            .unwrap();
        assert_eq!(one.rect(), Rect::new(85, 85, 130, 130));

        let two = build_crop_region(
            "t",
            &[bb(100, 100, 100, 100), bb(500, 600, 100, 100)],
            1.3,
            1080,
            1920,
            CropOrder::EnlargeThenUnion,
        )
        .unwrap();
        // (85,85,130,130) and (485,585,130,130)
        assert_eq!(two.rect(), Rect::new(85, 85, 530, 630));

        let full = build_crop_region("t", &[bb(0, 0, 64, 48)], 1.3, 64, 48, CropOrder::default())
            .unwrap();
        assert_eq!(full.rect(), Rect::new(0, 0, 64, 48));
    }

    #[test]
    fn crop_order_switch() {
        let boxes = [bb(100, 100, 100, 100), bb(300, 100, 100, 100)];
        let a = build_crop_region("t", &boxes, 1.3, 1000, 1000, CropOrder::EnlargeThenUnion).unwrap();
        let b = build_crop_region("t", &boxes, 1.3, 1000, 1000, CropOrder::UnionThenEnlarge).unwrap();
        assert_eq!(a.rect(), Rect::new(85, 85, 330, 130));
        assert_eq!(b.rect(), Rect::new(55, 85, 390, 130));
    }

    fn frames(n: usize, w: u32, h: u32) -> Vec<RgbImage> {
        (0..n)
            .map(|k| RgbImage::from_fn(w, h, |x, y| image::Rgb([(x + k as u32) as u8, y as u8, 7])))
            .collect()
    }

    #[test]
    fn crop_shapes() {
        let fr = frames(3, 40, 30);
        let full = CropRegion { x: 0, y: 0, w: 40, h: 30, source_video_id: "t".into() };
        assert_eq!(crop_video(&fr, &full).unwrap(), fr);

        let tiny = CropRegion { x: 5, y: 6, w: 1, h: 1, source_video_id: "t".into() };
        let out = crop_video(&fr, &tiny).unwrap();
        assert_eq!(out.len(), 3);
        assert!(out.iter().all(|f| f.dimensions() == (1, 1)));
        assert_eq!(out[2].get_pixel(0, 0), fr[2].get_pixel(5, 6));

        let bad = CropRegion { x: 30, y: 0, w: 20, h: 10, source_video_id: "t".into() };
        assert!(matches!(
            crop_video(&fr, &bad),
            Err(PreprocessError::RegionOutOfBounds { index: 0, .. })
        ));
    }

    #[test]
    fn frame_dir_roundtrip_and_decode_error() {
        let dir = tempfile::tempdir().unwrap();
        let fr = frames(2, 8, 8);
        write_frame_dir(&fr, dir.path()).unwrap();
        assert_eq!(read_frame_dir(dir.path()).unwrap(), fr);
        std::fs::write(dir.path().join("frame_00002.png"), b"not a png").unwrap();
        let err = read_frame_dir(dir.path()).unwrap_err();
        assert!(matches!(err, PreprocessError::Media { index: 2, .. }), "{err}");
    }

    #[test]
    fn stride_sampling() {
        let v: Vec<u32> = (0..10).collect();
        assert_eq!(sample_frames(&v, 3), [0, 3, 6, 9]);
        assert_eq!(sample_frames(&v, 1), v);
    }
}
