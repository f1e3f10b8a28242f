use std::cmp::Ordering;

use super::MetricError;

fn check_pair(pred: &[f64], gt: &[f64], min: usize) -> Result<(), MetricError> {
    if pred.len() != gt.len() {
        return Err(MetricError::Length {
            pred: pred.len(),
            gt: gt.len(),
        });
    }
    if pred.len() < min {
        return Err(MetricError::TooShort { n: pred.len(), min });
    }
    if pred.iter().chain(gt).any(|v| !v.is_finite()) {
        return Err(MetricError::NonFinite);
    }
    Ok(())
}

fn is_constant(v: &[f64]) -> bool {
    v.iter().all(|&x| x == v[0])
}

/// Ranks starting at 1; tied values share the mean of their positions.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![0.0; v.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && v[order[end]] == v[order[start]] {
            end += 1;
        }
        // positions start..end (0-based) hold ranks start+1..=end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0)
}

/// Spearman rank-order correlation: Pearson correlation of average ranks.
pub fn srcc(pred: &[f64], gt: &[f64]) -> Result<f64, MetricError> {
    check_pair(pred, gt, 3)?;
    if is_constant(gt) {
        return Err(MetricError::Constant("ground truth"));
    }
    if is_constant(pred) {
        return Err(MetricError::Constant("prediction"));
    }
    Ok(pearson(&average_ranks(pred), &average_ranks(gt)))
}

/// Pearson linear correlation.
pub fn plcc(pred: &[f64], gt: &[f64]) -> Result<f64, MetricError> {
    check_pair(pred, gt, 2)?;
    if is_constant(gt) {
        return Err(MetricError::Constant("ground truth"));
    }
    if is_constant(pred) {
        return Err(MetricError::Constant("prediction"));
    }
    Ok(pearson(pred, gt))
}

/// Root mean squared error with `1/n` inside the root.
pub fn rmse(pred: &[f64], gt: &[f64]) -> Result<f64, MetricError> {
    check_pair(pred, gt, 1)?;
    let ss: f64 = pred.iter().zip(gt).map(|(p, g)| (p - g).powi(2)).sum();
    Ok((ss / pred.len() as f64).sqrt())
}
