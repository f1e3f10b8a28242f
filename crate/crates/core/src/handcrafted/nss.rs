//! Natural-scene-statistics building blocks: MSCN coefficients and
//! moment-matching fits of generalized Gaussian distributions.

use std::sync::OnceLock;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::filter::{gaussian_taps, separable};
use super::{FeatureError, Result};

/// Local window of the MSCN transform: 7x7 Gaussian, sigma 7/6.
pub const MSCN_SIGMA: f64 = 7.0 / 6.0;
pub const MSCN_RADIUS: usize = 3;
/// Divisive stabilizer on the [0, 255] luminance scale.
pub const MSCN_C: f64 = 1.0;
/// Smallest image side accepted by [`mscn`].
pub const MIN_SIDE: usize = 16;
/// Fewest samples accepted by the distribution fits.
pub const MIN_SAMPLES: usize = 100;

const SHAPE_MIN: f64 = 0.2;
const SHAPE_MAX: f64 = 10.0;
const SHAPE_STEP: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GgdFit {
    pub shape: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggdFit {
    pub shape: f64,
    pub mean: f64,
    pub sigma_left: f64,
    pub sigma_right: f64,
}

/// Mean-subtracted contrast-normalized coefficients
/// `(I - mu) / (sigma + C)` with Gaussian-weighted local mean and deviation.
pub fn mscn(image: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let (h, w) = image.dim();
    if h < MIN_SIDE || w < MIN_SIDE {
        return Err(FeatureError::TooSmall { w, h, min: MIN_SIDE });
    }
    // The transform is shift invariant; offsetting by one pixel value makes a
    // constant image exactly zero before any rounding can creep in.
    let offset = image[[0, 0]];
    let centered = image.mapv(|v| v - offset);
    let taps = gaussian_taps(MSCN_SIGMA, MSCN_RADIUS);
    let mu = separable(centered.view(), &taps);
    let mu_sq = separable(centered.mapv(|v| v * v).view(), &taps);
    let mut out = centered;
    ndarray::Zip::from(&mut out)
        .and(&mu)
        .and(&mu_sq)
        .for_each(|v, &m, &m2| {
            let sigma = (m2 - m * m).max(0.0).sqrt();
            *v = (*v - m) / (sigma + MSCN_C);
        });
    Ok(out)
}

/// `(shape, r(shape))` with `r(a) = G(2/a)^2 / (G(1/a) G(3/a))`, increasing in `a`.
fn shape_table() -> &'static [(f64, f64)] {
    static TABLE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = ((SHAPE_MAX - SHAPE_MIN) / SHAPE_STEP).round() as usize + 1;
        (0..n)
            .map(|i| {
                let a = SHAPE_MIN + i as f64 * SHAPE_STEP;
                let r = (2.0 * libm::lgamma(2.0 / a) - libm::lgamma(1.0 / a) - libm::lgamma(3.0 / a))
                    .exp();
                (a, r)
            })
            .collect()
    })
}

/// Grid shape whose moment ratio is nearest to `ratio` (ties to the smaller shape).
fn lookup_shape(ratio: f64) -> f64 {
    let table = shape_table();
    let pos = table.partition_point(|&(_, r)| r < ratio);
    let candidates = [pos.saturating_sub(1), pos.min(table.len() - 1)];
    let mut best = candidates[0];
    for &c in &candidates[1..] {
        if (table[c].1 - ratio).abs() < (table[best].1 - ratio).abs() {
            best = c;
        }
    }
    table[best].0
}

fn check_samples(samples: &[f64]) -> Result<()> {
    if samples.len() < MIN_SAMPLES {
        return Err(FeatureError::InsufficientSamples(samples.len()));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(FeatureError::NonFinite);
    }
    let first = samples[0];
    if samples.iter().all(|&v| v == first) {
        return Err(FeatureError::Degenerate);
    }
    Ok(())
}

/// Zero-mean generalized Gaussian fit by moment matching.
pub fn fit_ggd(samples: &[f64]) -> Result<GgdFit> {
    check_samples(samples)?;
    let n = samples.len() as f64;
    let variance = samples.iter().map(|v| v * v).sum::<f64>() / n;
    let mean_abs = samples.iter().map(|v| v.abs()).sum::<f64>() / n;
    let shape = lookup_shape(mean_abs * mean_abs / variance);
    Ok(GgdFit { shape, variance })
}

/// Asymmetric generalized Gaussian fit by moment matching. Samples equal to
/// zero count towards the moments but towards neither side's deviation.
pub fn fit_aggd(samples: &[f64]) -> Result<AggdFit> {
    check_samples(samples)?;
    let n = samples.len() as f64;
    let (mut left_ss, mut left_n, mut right_ss, mut right_n) = (0.0, 0usize, 0.0, 0usize);
    for &v in samples {
        if v < 0.0 {
            left_ss += v * v;
            left_n += 1;
        } else if v > 0.0 {
            right_ss += v * v;
            right_n += 1;
        }
    }
    let side = |ss: f64, k: usize| if k > 0 { (ss / k as f64).sqrt() } else { 0.0 };
    let sigma_left = side(left_ss, left_n);
    let sigma_right = side(right_ss, right_n);

    let mean_abs = samples.iter().map(|v| v.abs()).sum::<f64>() / n;
    let mean_sq = samples.iter().map(|v| v * v).sum::<f64>() / n;
    // The asymmetry correction is symmetric under g -> 1/g, so use the ratio
    // in [0, 1] to stay finite when one side is empty.
    let g = sigma_left.min(sigma_right) / sigma_left.max(sigma_right);
    let correction = (g.powi(3) + 1.0) * (g + 1.0) / (g * g + 1.0).powi(2);
    let shape = lookup_shape(mean_abs * mean_abs / mean_sq * correction);

    let g1 = libm::tgamma(1.0 / shape);
    let g2 = libm::tgamma(2.0 / shape);
    let g3 = libm::tgamma(3.0 / shape);
    let scale = (g1 / g3).sqrt();
    let mean = (sigma_right - sigma_left) * scale * g2 / g1;
    Ok(AggdFit {
        shape,
        mean,
        sigma_left,
        sigma_right,
    })
}
