use std::collections::HashSet;
use std::path::Path;

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use super::{DataError, Result};

/// Per-frame feature vectors of one video, one row per sampled frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameFeatureMatrix {
    pub video_id: String,
    pub feature_names: Vec<String>,
    pub rows: Array2<f64>,
}

impl FrameFeatureMatrix {
    pub fn new(
        video_id: impl Into<String>,
        feature_names: Vec<String>,
        rows: Array2<f64>,
    ) -> Result<Self> {
        let m = Self {
            video_id: video_id.into(),
            feature_names,
            rows,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn n_frames(&self) -> usize {
        self.rows.nrows()
    }

    pub fn width(&self) -> usize {
        self.feature_names.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows.nrows() == 0 {
            return Err(DataError::Format(format!(
                "{}: feature matrix has no frames",
                self.video_id
            )));
        }
        if self.rows.ncols() != self.feature_names.len() {
            return Err(DataError::Format(format!(
                "{}: {} feature names but rows of width {}",
                self.video_id,
                self.feature_names.len(),
                self.rows.ncols()
            )));
        }
        check_unique(&self.feature_names)?;
        if self.rows.iter().any(|v| !v.is_finite()) {
            return Err(DataError::Format(format!(
                "{}: non-finite feature value",
                self.video_id
            )));
        }
        Ok(())
    }
}

/// Video-level feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoFeatureVector {
    pub video_id: String,
    pub feature_names: Vec<String>,
    pub values: Vec<f64>,
}

impl VideoFeatureVector {
    pub fn new(
        video_id: impl Into<String>,
        feature_names: Vec<String>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let v = Self {
            video_id: video_id.into(),
            feature_names,
            values,
        };
        if v.feature_names.len() != v.values.len() {
            return Err(DataError::Format(format!(
                "{}: {} names for {} values",
                v.video_id,
                v.feature_names.len(),
                v.values.len()
            )));
        }
        if v.values.iter().any(|x| !x.is_finite()) {
            return Err(DataError::Format(format!(
                "{}: non-finite feature value",
                v.video_id
            )));
        }
        Ok(v)
    }
}

fn check_unique(names: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(names.len());
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(DataError::Format(format!("duplicate feature name `{n}`")));
        }
    }
    Ok(())
}

// `f64`'s Display is the shortest representation that parses back to the
// same bits, so files round-trip exactly.
fn format_row(values: ArrayView1<'_, f64>) -> Result<Vec<String>> {
    values
        .iter()
        .map(|v| {
            if v.is_finite() {
                Ok(v.to_string())
            } else {
                Err(DataError::Format(format!("non-finite value {v}")))
            }
        })
        .collect()
}

fn parse_value(field: &str, path: &Path, line: u64) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| DataError::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("`{field}` is not a number"),
    })?;
    if !v.is_finite() {
        return Err(DataError::Format(format!(
            "{}, line {line}: non-finite value",
            path.display()
        )));
    }
    Ok(v)
}

/// Writes a frame feature CSV: header of feature names, one row per frame.
pub fn write_features(matrix: &FrameFeatureMatrix, path: impl AsRef<Path>) -> Result<()> {
    matrix.validate()?;
    let path = path.as_ref();
    let io = |e: csv::Error| DataError::io(path, e.into());
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(&matrix.feature_names).map_err(io)?;
    for row in matrix.rows.rows() {
        w.write_record(format_row(row)?).map_err(io)?;
    }
    w.flush().map_err(|e| DataError::io(path, e))
}

/// Reads a frame feature CSV. The video id is taken from the file stem.
pub fn load_features(path: impl AsRef<Path>) -> Result<FrameFeatureMatrix> {
    let path = path.as_ref();
    let video_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let (names, rows) = read_table(path, false)?;
    let width = names.len();
    let n = rows.len();
    let flat: Vec<f64> = rows.into_iter().flat_map(|(_, r)| r).collect();
    let rows = Array2::from_shape_vec((n, width), flat)
        .map_err(|e| DataError::Format(e.to_string()))?;
    FrameFeatureMatrix::new(video_id, names, rows)
}

/// Writes the consolidated video-level table (`video_id` column first).
pub fn write_consolidated(vectors: &[VideoFeatureVector], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let Some(first) = vectors.first() else {
        return Err(DataError::Format("no feature vectors to write".into()));
    };
    let io = |e: csv::Error| DataError::io(path, e.into());
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    let mut header = vec!["video_id".to_string()];
    header.extend(first.feature_names.iter().cloned());
    w.write_record(&header).map_err(io)?;
    for v in vectors {
        if v.feature_names != first.feature_names {
            return Err(DataError::Format(format!(
                "{}: feature names differ from `{}`",
                v.video_id, first.video_id
            )));
        }
        let mut row = vec![v.video_id.clone()];
        row.extend(format_row(ArrayView1::from(&v.values))?);
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| DataError::io(path, e))
}

pub fn load_consolidated(path: impl AsRef<Path>) -> Result<Vec<VideoFeatureVector>> {
    let path = path.as_ref();
    let (names, rows) = read_table(path, true)?;
    rows.into_iter()
        .map(|(id, values)| VideoFeatureVector::new(id, names.clone(), values))
        .collect()
}

type Rows = Vec<(String, Vec<f64>)>;

fn read_table(path: &Path, keyed: bool) -> Result<(Vec<String>, Rows)> {
    let file = std::fs::File::open(path).map_err(|e| DataError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(file);
    let header = reader
        .headers()
        .map_err(|e| DataError::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let mut names: Vec<String> = header.iter().map(str::to_string).collect();
    if keyed {
        if names.first().map(String::as_str) != Some("video_id") {
            return Err(DataError::Format(format!(
                "{}: consolidated table must start with a `video_id` column",
                path.display()
            )));
        }
        names.remove(0);
    }
    check_unique(&names)?;
    let offset = usize::from(keyed);
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| DataError::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != names.len() + offset {
            return Err(DataError::Format(format!(
                "{}, line {line}: {} values under a header of {} names",
                path.display(),
                rec.len() - offset,
                names.len()
            )));
        }
        let id = if keyed { rec[0].to_string() } else { String::new() };
        let values = rec
            .iter()
            .skip(offset)
            .map(|f| parse_value(f, path, line))
            .collect::<Result<Vec<_>>>()?;
        rows.push((id, values));
    }
    Ok((names, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn small_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vid.csv");
        let m = FrameFeatureMatrix::new("vid", vec!["a".into(), "b".into()], array![[1.5, -2.25]])
            .unwrap();
        write_features(&m, &path).unwrap();
        assert_eq!(load_features(&path).unwrap(), m);
    }

    #[test]
    fn row_wider_than_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.csv");
        std::fs::write(&path, "a,b\n1,2,3\n").unwrap();
        assert!(matches!(load_features(&path), Err(DataError::Format(_))));
    }

    #[test]
    fn non_finite_rejected_both_ways() {
        let bad = FrameFeatureMatrix {
            video_id: "v".into(),
            feature_names: vec!["a".into()],
            rows: array![[f64::NAN]],
        };
        let dir = tempfile::tempdir().unwrap();
        assert!(write_features(&bad, dir.path().join("v.csv")).is_err());
        let path = dir.path().join("w.csv");
        std::fs::write(&path, "a\ninf\n").unwrap();
        assert!(matches!(load_features(&path), Err(DataError::Format(_))));
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(FrameFeatureMatrix::new("v", vec!["a".into(), "a".into()], array![[1.0, 2.0]])
            .is_err());
    }

    #[test]
    fn consolidated_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("all.csv");
        let names = vec!["x.mean".to_string(), "x.std".to_string()];
        let vs = vec![
            VideoFeatureVector::new("a", names.clone(), vec![0.1, 1e-300]).unwrap(),
            VideoFeatureVector::new("b", names, vec![-3.0, 12345.678901234]).unwrap(),
        ];
        write_consolidated(&vs, &path).unwrap();
        assert_eq!(load_consolidated(&path).unwrap(), vs);
    }
}
