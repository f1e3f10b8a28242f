//! Four-parameter logistic remapping of predictions onto the ground-truth scale.

use serde::{Deserialize, Serialize};

use super::optim::NelderMead;
use super::MetricError;

pub const LOGISTIC_MIN_POINTS: usize = 5;
const RESTARTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Logistic4 {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub beta4: f64,
}

impl Logistic4 {
    pub fn eval(&self, x: f64) -> f64 {
        let z = -(x - self.beta3) / self.beta4.abs();
        self.beta2 + (self.beta1 - self.beta2) / (1.0 + z.exp())
    }

    fn from_slice(b: &[f64]) -> Self {
        Self {
            beta1: b[0],
            beta2: b[1],
            beta3: b[2],
            beta4: b[3],
        }
    }

    fn as_array(&self) -> [f64; 4] {
        [self.beta1, self.beta2, self.beta3, self.beta4]
    }
}

/// Why a remap was not the fitted logistic curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RemapFallback {
    /// Fewer than five points, or a constant prediction vector.
    TooFewPoints,
    /// The optimizer produced a non-finite or degenerate curve.
    NonConvergence,
    /// The identity had a lower squared error than the best fitted curve.
    IdentityBetter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Remap {
    pub fit: Option<Logistic4>,
    pub fallback: Option<RemapFallback>,
    #[serde(skip)]
    pub values: Vec<f64>,
}

fn sse(curve: &Logistic4, pred: &[f64], gt: &[f64]) -> f64 {
    pred.iter()
        .zip(gt)
        .map(|(&p, &g)| (curve.eval(p) - g).powi(2))
        .sum()
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

fn sample_std(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Least-squares fit of the logistic curve by restarted Nelder-Mead.
///
/// The result is the best curve found; `converged` is false if no restart
/// reached the simplex tolerance.
pub fn fit_logistic4(pred: &[f64], gt: &[f64]) -> Result<(Logistic4, bool), MetricError> {
    if pred.len() != gt.len() {
        return Err(MetricError::Length {
            pred: pred.len(),
            gt: gt.len(),
        });
    }
    if pred.len() < LOGISTIC_MIN_POINTS {
        return Err(MetricError::TooShort {
            n: pred.len(),
            min: LOGISTIC_MIN_POINTS,
        });
    }
    if pred.iter().chain(gt).any(|v| !v.is_finite()) {
        return Err(MetricError::NonFinite);
    }
    if pred.iter().all(|&p| p == pred[0]) {
        return Err(MetricError::Constant("prediction"));
    }

    let gmax = gt.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let gmin = gt.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = sample_std(pred);
    let init = Logistic4 {
        beta1: gmax,
        beta2: gmin,
        beta3: median(pred),
        beta4: spread,
    };
    let objective = |b: &[f64]| sse(&Logistic4::from_slice(b), pred, gt);
    let optimizer = NelderMead::default();
    let gt_range = (gmax - gmin).max(1e-3);

    let mut best = init;
    let mut best_f = objective(&init.as_array());
    let mut any_converged = false;
    for restart in 0..RESTARTS {
        // shrink the exploration scale on later restarts
        let scale = 0.5f64.powi(restart as i32);
        let steps = [
            gt_range * 0.25 * scale,
            gt_range * 0.25 * scale,
            spread * 0.5 * scale,
            spread * 0.5 * scale,
        ];
        let start = if restart == 0 { init } else { best };
        let m = optimizer.minimize(objective, &start.as_array(), &steps);
        any_converged |= m.converged;
        if m.f < best_f {
            best_f = m.f;
            best = Logistic4::from_slice(&m.x);
        }
    }
    Ok((best, any_converged))
}

/// Remaps predictions before computing PLCC and RMSE.
///
/// Never fails: short or constant inputs and failed fits fall back to the
/// identity with the reason recorded.
pub fn remap(pred: &[f64], gt: &[f64]) -> Remap {
    let identity = |fallback| Remap {
        fit: None,
        fallback: Some(fallback),
        values: pred.to_vec(),
    };
    let (curve, _) = match fit_logistic4(pred, gt) {
        Ok(r) => r,
        Err(MetricError::TooShort { .. }) | Err(MetricError::Constant(_)) => {
            return identity(RemapFallback::TooFewPoints)
        }
        Err(_) => return identity(RemapFallback::NonConvergence),
    };
    let values: Vec<f64> = pred.iter().map(|&p| curve.eval(p)).collect();
    if values.iter().any(|v| !v.is_finite()) || curve.beta4 == 0.0 {
        return identity(RemapFallback::NonConvergence);
    }
    let fitted: f64 = values.iter().zip(gt).map(|(v, g)| (v - g).powi(2)).sum();
    let raw: f64 = pred.iter().zip(gt).map(|(v, g)| (v - g).powi(2)).sum();
    if raw < fitted {
        return identity(RemapFallback::IdentityBetter);
    }
    Remap {
        fit: Some(curve),
        fallback: None,
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_curve() {
        let truth = Logistic4 {
            beta1: 5.0,
            beta2: 1.0,
            beta3: 0.3,
            beta4: 0.8,
        };
        let pred: Vec<f64> = (0..40).map(|i| -2.0 + i as f64 * 0.1).collect();
        let gt: Vec<f64> = pred.iter().map(|&p| truth.eval(p)).collect();
        let r = remap(&pred, &gt);
        assert_eq!(r.fallback, None);
        let err = super::super::rmse(&r.values, &gt).unwrap();
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn identity_when_already_calibrated() {
        let pred = [1.0, 2.0, 3.0, 4.0, 5.0, 2.5];
        let r = remap(&pred, &pred);
        assert_eq!(r.fallback, Some(RemapFallback::IdentityBetter));
        assert_eq!(r.values, pred);
    }

    #[test]
    fn short_input_is_identity() {
        let r = remap(&[1.0, 2.0, 3.0], &[2.0, 1.0, 3.0]);
        assert_eq!(r.fallback, Some(RemapFallback::TooFewPoints));
        assert!(matches!(
            fit_logistic4(&[1.0, 2.0, 3.0], &[2.0, 1.0, 3.0]),
            Err(MetricError::TooShort { .. })
        ));
    }
}
