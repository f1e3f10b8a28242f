//! Video-level feature fusion and the design-matrix join with MOS labels.

use std::collections::HashMap;

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::datamodel::{DataError, FrameFeatureMatrix, VideoFeatureVector, VideoRecord};

#[derive(Debug, thiserror::Error)]
pub enum FusionError {
    #[error("video `{0}` has no frames to fuse")]
    Empty(String),
    #[error("feature schema mismatch: {0}")]
    Schema(String),
    #[error("join error: {0}")]
    Join(String),
    #[error(transparent)]
    Data(#[from] DataError),
}

pub type Result<T, E = FusionError> = std::result::Result<T, E>;

/// Mean pooling followed by sample (n - 1) standard deviation pooling,
/// concatenated. Names get `.mean` / `.std` suffixes. A single frame has
/// zero deviation.
pub fn fuse_mean_std(matrix: &FrameFeatureMatrix) -> Result<VideoFeatureVector> {
    let n = matrix.rows.nrows();
    if n == 0 {
        return Err(FusionError::Empty(matrix.video_id.clone()));
    }
    let mean = matrix
        .rows
        .mean_axis(Axis(0))
        .expect("non-empty matrix has a mean");
    let std: Vec<f64> = if n == 1 {
        vec![0.0; matrix.width()]
    } else {
        matrix
            .rows
            .axis_iter(Axis(1))
            .zip(mean.iter())
            .map(|(col, m)| {
                (col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            })
            .collect()
    };
    let mut names: Vec<String> = matrix
        .feature_names
        .iter()
        .map(|n| format!("{n}.mean"))
        .collect();
    names.extend(matrix.feature_names.iter().map(|n| format!("{n}.std")));
    let mut values = mean.to_vec();
    values.extend(std);
    Ok(VideoFeatureVector::new(matrix.video_id.clone(), names, values)?)
}

/// Features arriving either per frame (fused here) or already at video level
/// (passed through untouched, e.g. temporal VQA models).
#[derive(Debug, Clone)]
pub enum VideoFeatures {
    Frames(Vec<FrameFeatureMatrix>),
    VideoLevel(Vec<VideoFeatureVector>),
}

impl VideoFeatures {
    pub fn into_vectors(self) -> Result<Vec<VideoFeatureVector>> {
        match self {
            VideoFeatures::Frames(m) => m.iter().map(fuse_mean_std).collect(),
            VideoFeatures::VideoLevel(v) => Ok(v),
        }
    }
}

/// Design matrix joined with manifest records; row `i` belongs to `records[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub x: Array2<f64>,
    pub y: Vec<f64>,
    pub records: Vec<VideoRecord>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn width(&self) -> usize {
        self.feature_names.len()
    }

    /// Rows at `idx`, in the given order.
    pub fn rows(&self, idx: &[usize]) -> Dataset {
        Dataset {
            feature_names: self.feature_names.clone(),
            x: self.x.select(Axis(0), idx),
            y: idx.iter().map(|&i| self.y[i]).collect(),
            records: idx.iter().map(|&i| self.records[i].clone()).collect(),
        }
    }

    /// Columns at `idx`, in the given order.
    pub fn columns(&self, idx: &[usize]) -> Dataset {
        Dataset {
            feature_names: idx.iter().map(|&i| self.feature_names[i].clone()).collect(),
            x: self.x.select(Axis(1), idx),
            y: self.y.clone(),
            records: self.records.clone(),
        }
    }
}

/// Joins video feature vectors with manifest records in manifest order;
/// targets are the MOS values.
pub fn consolidate(vectors: &[VideoFeatureVector], records: &[VideoRecord]) -> Result<Dataset> {
    let Some(first) = vectors.first() else {
        return Err(FusionError::Join("no feature vectors".into()));
    };
    let names = first.feature_names.clone();
    let mut by_id: HashMap<&str, &VideoFeatureVector> = HashMap::with_capacity(vectors.len());
    for v in vectors {
        if v.feature_names != names {
            return Err(FusionError::Schema(format!(
                "`{}` has feature names that differ from `{}`",
                v.video_id, first.video_id
            )));
        }
        if by_id.insert(v.video_id.as_str(), v).is_some() {
            return Err(FusionError::Join(format!("duplicate features for `{}`", v.video_id)));
        }
    }
    let known: HashMap<&str, ()> = records.iter().map(|r| (r.video_id.as_str(), ())).collect();
    if let Some(orphan) = vectors.iter().find(|v| !known.contains_key(v.video_id.as_str())) {
        return Err(FusionError::Join(format!(
            "features for `{}` have no manifest record",
            orphan.video_id
        )));
    }
    let mut flat = Vec::with_capacity(records.len() * names.len());
    for r in records {
        let v = by_id.get(r.video_id.as_str()).ok_or_else(|| {
            FusionError::Join(format!("manifest record `{}` has no features", r.video_id))
        })?;
        flat.extend_from_slice(&v.values);
    }
    let x = Array2::from_shape_vec((records.len(), names.len()), flat)
        .map_err(|e| FusionError::Schema(e.to_string()))?;
    Ok(Dataset {
        feature_names: names,
        x,
        y: records.iter().map(|r| r.mos).collect(),
        records: records.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::Subset;
    use ndarray::array;

    fn frames(rows: Array2<f64>) -> FrameFeatureMatrix {
        let names = (0..rows.ncols()).map(|i| format!("f{i}")).collect();
        FrameFeatureMatrix::new("v", names, rows).unwrap()
    }

    #[test]
    fn two_frames() {
        let v = fuse_mean_std(&frames(array![[1.0, 2.0], [3.0, 4.0]])).unwrap();
        let s = 2f64.sqrt();
        assert_eq!(v.values[..2], [2.0, 3.0]);
        assert!((v.values[2] - s).abs() < 1e-12 && (v.values[3] - s).abs() < 1e-12);
        assert_eq!(v.feature_names, ["f0.mean", "f1.mean", "f0.std", "f1.std"]);
    }

    #[test]
    fn single_frame_has_zero_std() {
        let v = fuse_mean_std(&frames(array![[5.0, 7.0]])).unwrap();
        assert_eq!(v.values, [5.0, 7.0, 0.0, 0.0]);
    }

    fn record(id: &str, r: u8) -> VideoRecord {
        VideoRecord::new(id, Subset::C3, "p", "s", "x", vec![r; 5]).unwrap()
    }

    fn vector(id: &str, names: &[&str], values: Vec<f64>) -> VideoFeatureVector {
        VideoFeatureVector::new(id, names.iter().map(|s| s.to_string()).collect(), values).unwrap()
    }

    #[test]
    fn consolidate_follows_manifest_order() {
        let names = ["a", "b", "c", "d"];
        let vs = vec![
            vector("v3", &names, vec![3.0; 4]),
            vector("v1", &names, vec![1.0; 4]),
            vector("v2", &names, vec![2.0; 4]),
        ];
        let recs = vec![record("v1", 1), record("v2", 2), record("v3", 3)];
        let ds = consolidate(&vs, &recs).unwrap();
        assert_eq!(ds.x.dim(), (3, 4));
        assert_eq!(ds.y, [1.0, 2.0, 3.0]);
        assert_eq!(ds.x.column(0).to_vec(), [1.0, 2.0, 3.0]);
    }

    #[test]
    fn permuted_names_are_a_schema_error() {
        let vs = vec![
            vector("v1", &["a", "b"], vec![1.0, 2.0]),
            vector("v2", &["b", "a"], vec![1.0, 2.0]),
        ];
        let recs = vec![record("v1", 1), record("v2", 2)];
        assert!(matches!(consolidate(&vs, &recs), Err(FusionError::Schema(_))));
    }

    #[test]
    fn missing_record_is_a_join_error() {
        let vs = vec![vector("v9", &["a"], vec![1.0])];
        assert!(matches!(consolidate(&vs, &[record("v1", 1)]), Err(FusionError::Join(_))));
        let vs = vec![vector("v1", &["a"], vec![1.0])];
        assert!(matches!(
            consolidate(&vs, &[record("v1", 1), record("v2", 2)]),
            Err(FusionError::Join(_))
        ));
    }
}
