use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{DataError, Result};

/// Required manifest columns, in order. An optional trailing `mos` column may
/// follow.
pub const MANIFEST_COLUMNS: [&str; 10] = [
    "video_id",
    "subset",
    "facial_id_pair",
    "submit_id",
    "path",
    "r1",
    "r2",
    "r3",
    "r4",
    "r5",
];

const MOS_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Subset {
    C1,
    C2,
    C3,
}

impl FromStr for Subset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "C1" => Ok(Subset::C1),
            "C2" => Ok(Subset::C2),
            "C3" => Ok(Subset::C3),
            other => Err(format!("unknown subset `{other}` (expected C1, C2 or C3)")),
        }
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subset::C1 => "C1",
            Subset::C2 => "C2",
            Subset::C3 => "C3",
        })
    }
}

/// One annotated face-swap clip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoRecord {
    pub video_id: String,
    pub subset: Subset,
    pub facial_id_pair: String,
    pub submit_id: String,
    pub path: String,
    pub ratings: Vec<u8>,
    pub mos: f64,
    pub mos_std: f64,
}

impl VideoRecord {
    /// Builds a record from raw ratings, deriving MOS (mean) and its sample
    /// standard deviation (n - 1 denominator).
    pub fn new(
        video_id: impl Into<String>,
        subset: Subset,
        facial_id_pair: impl Into<String>,
        submit_id: impl Into<String>,
        path: impl Into<String>,
        ratings: Vec<u8>,
    ) -> Result<Self> {
        if ratings.is_empty() {
            return Err(DataError::Validation("record has no ratings".into()));
        }
        if let Some(r) = ratings.iter().find(|r| !(1..=5).contains(*r)) {
            return Err(DataError::Validation(format!(
                "rating {r} outside [1, 5]"
            )));
        }
        let (mos, mos_std) = rating_stats(&ratings);
        Ok(Self {
            video_id: video_id.into(),
            subset,
            facial_id_pair: facial_id_pair.into(),
            submit_id: submit_id.into(),
            path: path.into(),
            ratings,
            mos,
            mos_std,
        })
    }
}

fn rating_stats(ratings: &[u8]) -> (f64, f64) {
    let n = ratings.len() as f64;
    let mean = ratings.iter().map(|&r| f64::from(r)).sum::<f64>() / n;
    if ratings.len() < 2 {
        return (mean, 0.0);
    }
    let ss = ratings
        .iter()
        .map(|&r| (f64::from(r) - mean).powi(2))
        .sum::<f64>();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Reads a manifest CSV. Rows keep file order.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<VideoRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| DataError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .has_headers(true)
        .from_reader(file);

    let parse_err = |line: u64, message: String| DataError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let header = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    let has_mos = match header.len() {
        10 => false,
        11 if &header[10] == "mos" => true,
        _ => {
            return Err(parse_err(
                1,
                format!(
                    "header must be `{}[,mos]`",
                    MANIFEST_COLUMNS.join(",")
                ),
            ))
        }
    };
    if header.iter().zip(MANIFEST_COLUMNS).any(|(h, want)| h != want) {
        return Err(parse_err(
            1,
            format!("header must be `{}[,mos]`", MANIFEST_COLUMNS.join(",")),
        ));
    }

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != header.len() {
            return Err(parse_err(
                line,
                format!("expected {} columns, found {}", header.len(), row.len()),
            ));
        }
        let subset: Subset = row[1].trim().parse().map_err(|m| parse_err(line, m))?;
        let mut ratings = Vec::with_capacity(5);
        for field in row.iter().skip(5).take(5) {
            let r: u8 = field
                .trim()
                .parse()
                .map_err(|_| parse_err(line, format!("rating `{field}` is not an integer")))?;
            if !(1..=5).contains(&r) {
                return Err(parse_err(line, format!("rating {r} outside [1, 5]")));
            }
            ratings.push(r);
        }
        let record = VideoRecord::new(&row[0], subset, &row[2], &row[3], &row[4], ratings)
            .map_err(|e| parse_err(line, e.to_string()))?;
        if has_mos && !row[10].trim().is_empty() {
            let given: f64 = row[10]
                .trim()
                .parse()
                .map_err(|_| parse_err(line, format!("mos `{}` is not a number", &row[10])))?;
            if !given.is_finite() || (given - record.mos).abs() > MOS_TOLERANCE {
                return Err(parse_err(
                    line,
                    format!(
                        "mos {given} disagrees with mean of ratings {}",
                        record.mos
                    ),
                ));
            }
        }
        if !seen.insert(record.video_id.clone()) {
            return Err(DataError::Duplicate(record.video_id));
        }
        records.push(record);
    }
    Ok(records)
}

/// Writes records with the optional `mos` column populated.
pub fn write_manifest(records: &[VideoRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io = |e: csv::Error| DataError::io(path, e.into());
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    let mut header: Vec<&str> = MANIFEST_COLUMNS.to_vec();
    header.push("mos");
    w.write_record(&header).map_err(io)?;
    for r in records {
        if r.ratings.len() != 5 {
            return Err(DataError::Validation(format!(
                "{}: manifest rows carry exactly 5 ratings, found {}",
                r.video_id,
                r.ratings.len()
            )));
        }
        let mut row = vec![
            r.video_id.clone(),
            r.subset.to_string(),
            r.facial_id_pair.clone(),
            r.submit_id.clone(),
            r.path.clone(),
        ];
        row.extend(r.ratings.iter().map(u8::to_string));
        row.push(r.mos.to_string());
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| DataError::io(path, e))
}
