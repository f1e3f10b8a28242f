use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::datamodel::VideoRecord;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    /// Hold out 4 facial-id pairs.
    FacialId,
    /// Hold out 3 submissions.
    SubmitId,
    /// Train on one subset, test on another.
    #[serde(rename = "inter")]
    InterSubset,
}

impl Protocol {
    pub fn held_out_groups(self) -> Option<usize> {
        match self {
            Protocol::FacialId => Some(4),
            Protocol::SubmitId => Some(3),
            Protocol::InterSubset => None,
        }
    }

    pub fn group_of(self, record: &VideoRecord) -> &str {
        match self {
            Protocol::FacialId => &record.facial_id_pair,
            Protocol::SubmitId | Protocol::InterSubset => &record.submit_id,
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::FacialId => "facial-id",
            Protocol::SubmitId => "submit-id",
            Protocol::InterSubset => "inter",
        })
    }
}

impl FromStr for Protocol {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "facial-id" => Ok(Protocol::FacialId),
            "submit-id" => Ok(Protocol::SubmitId),
            "inter" | "inter-subset" => Ok(Protocol::InterSubset),
            other => Err(EvalError::Config(format!(
                "unknown protocol `{other}` (expected facial-id, submit-id or inter)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub protocol: Protocol,
    pub seed: u64,
    /// Held-out group labels in ascending order.
    pub held_out: Vec<String>,
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
}

/// Grouped split: the sorted distinct group labels are shuffled by a
/// SplitMix64 stream seeded with `seed` and the first few are held out.
///
/// Returns the `SplitSpec` together with the train and test row indices (in
/// record order).
pub fn make_split(
    records: &[VideoRecord],
    protocol: Protocol,
    seed: u64,
) -> Result<(SplitSpec, Vec<usize>, Vec<usize>), EvalError> {
    let Some(n_out) = protocol.held_out_groups() else {
        return Err(EvalError::Config(
            "the inter-subset protocol takes explicit train and test sets".into(),
        ));
    };
    if let Some(first) = records.first() {
        if let Some(other) = records.iter().find(|r| r.subset != first.subset) {
            return Err(EvalError::Config(format!(
                "intra-subset protocols need one subset, found {} and {}",
                first.subset, other.subset
            )));
        }
    }
    let groups: BTreeSet<&str> = records.iter().map(|r| protocol.group_of(r)).collect();
    if groups.len() <= n_out {
        return Err(EvalError::Config(format!(
            "{protocol} split holds out {n_out} groups but only {} exist",
            groups.len()
        )));
    }
    let mut labels: Vec<&str> = groups.into_iter().collect();
    SplitMix64::new(seed).shuffle(&mut labels);
    let held: BTreeSet<&str> = labels[..n_out].iter().copied().collect();

    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (i, r) in records.iter().enumerate() {
        if held.contains(protocol.group_of(r)) {
            test.push(i);
        } else {
            train.push(i);
        }
    }
    let spec = SplitSpec {
        protocol,
        seed,
        held_out: held.iter().map(|s| s.to_string()).collect(),
        train_ids: train.iter().map(|&i| records[i].video_id.clone()).collect(),
        test_ids: test.iter().map(|&i| records[i].video_id.clone()).collect(),
    };
    Ok((spec, train, test))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodLevel {
    pub labels: Vec<String>,
    pub pred: Vec<f64>,
    pub gt: Vec<f64>,
}

/// Per-group means of predictions and targets, ordered by label.
pub fn method_aggregate<S: AsRef<str>>(
    pred: &[f64],
    gt: &[f64],
    groups: &[S],
) -> Result<MethodLevel, EvalError> {
    if pred.len() != gt.len() || pred.len() != groups.len() {
        return Err(EvalError::Config(format!(
            "method aggregation needs aligned vectors, got {}, {} and {}",
            pred.len(),
            gt.len(),
            groups.len()
        )));
    }
    let mut acc: BTreeMap<&str, (f64, f64, usize)> = BTreeMap::new();
    for ((p, g), label) in pred.iter().zip(gt).zip(groups) {
        let e = acc.entry(label.as_ref()).or_default();
        e.0 += p;
        e.1 += g;
        e.2 += 1;
    }
    let mut out = MethodLevel {
        labels: Vec::with_capacity(acc.len()),
        pred: Vec::with_capacity(acc.len()),
        gt: Vec::with_capacity(acc.len()),
    };
    for (label, (p, g, n)) in acc {
        out.labels.push(label.to_string());
        out.pred.push(p / n as f64);
        out.gt.push(g / n as f64);
    }
    Ok(out)
}
