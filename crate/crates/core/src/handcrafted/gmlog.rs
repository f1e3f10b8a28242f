//! GM-LOG features: joint statistics of gradient magnitude and
//! Laplacian-of-Gaussian responses.
//!
//! Both responses are jointly normalized by a local energy map, quantized to
//! [`GMLOG_LEVELS`] levels each, and summarized by the joint histogram's two
//! marginals plus two "independency" distributions (conditional
//! distributions averaged over the other variable's occupied levels).

use ndarray::{Array2, ArrayView2};

use super::filter::{correlate, gaussian_taps, separable};
use super::nss::MIN_SIDE;
use super::{FeatureError, Result};

pub const GMLOG_DIM: usize = 40;
/// Scale of the Gaussian derivative and LOG filters.
pub const GMLOG_SIGMA: f64 = 0.5;
/// Scale of the Gaussian window of the joint normalization map.
pub const GMLOG_NORM_SIGMA: f64 = 2.5 * GMLOG_SIGMA;
/// Stabilizer added to the normalization map ([0, 255] luminance scale).
pub const GMLOG_EPSILON: f64 = 0.2;
/// Quantization levels per response.
pub const GMLOG_LEVELS: usize = 10;
/// Normalized responses are quantized uniformly on `[0, GMLOG_QUANT_MAX)`;
/// larger values fall in the top level.
pub const GMLOG_QUANT_MAX: f64 = 1.2;

pub fn gmlog_feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(GMLOG_DIM);
    for (map, stat) in [("gm", "p"), ("log", "p"), ("gm", "q"), ("log", "q")] {
        for level in 0..GMLOG_LEVELS {
            names.push(format!("gmlog.{map}.{stat}{level}"));
        }
    }
    names
}

fn filter_radius(sigma: f64) -> usize {
    (3.0 * sigma).ceil() as usize
}

/// Gaussian partial-derivative kernels `(d/dx, d/dy)`.
fn derivative_kernels() -> (Array2<f64>, Array2<f64>) {
    let r = filter_radius(GMLOG_SIGMA) as isize;
    let n = (2 * r + 1) as usize;
    let s2 = GMLOG_SIGMA * GMLOG_SIGMA;
    let g = |x: f64, y: f64| (-(x * x + y * y) / (2.0 * s2)).exp() / (2.0 * std::f64::consts::PI * s2);
    let gx = Array2::from_shape_fn((n, n), |(a, b)| {
        let (y, x) = ((a as isize - r) as f64, (b as isize - r) as f64);
        -x / s2 * g(x, y)
    });
    let gy = gx.t().to_owned();
    (gx, gy)
}

/// Zero-sum Laplacian-of-Gaussian kernel.
fn log_kernel() -> Array2<f64> {
    let r = filter_radius(GMLOG_SIGMA) as isize;
    let n = (2 * r + 1) as usize;
    let s2 = GMLOG_SIGMA * GMLOG_SIGMA;
    let mut k = Array2::from_shape_fn((n, n), |(a, b)| {
        let (y, x) = ((a as isize - r) as f64, (b as isize - r) as f64);
        let q = x * x + y * y;
        (q - 2.0 * s2) / (s2 * s2) * (-q / (2.0 * s2)).exp() / (2.0 * std::f64::consts::PI * s2)
    });
    let mean = k.mean().unwrap_or(0.0);
    k.mapv_inplace(|v| v - mean);
    k
}

fn quantize(v: f64) -> usize {
    let level = (v / GMLOG_QUANT_MAX * GMLOG_LEVELS as f64).floor();
    (level.max(0.0) as usize).min(GMLOG_LEVELS - 1)
}

/// Normalized joint histogram `K[gm_level][log_level]`, summing to 1.
pub fn joint_histogram(image: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let (h, w) = image.dim();
    if h < MIN_SIDE || w < MIN_SIDE {
        return Err(FeatureError::TooSmall { w, h, min: MIN_SIDE });
    }
    let (kx, ky) = derivative_kernels();
    let dx = correlate(image, kx.view());
    let dy = correlate(image, ky.view());
    let lap = correlate(image, log_kernel().view());
    let gm = ndarray::Zip::from(&dx).and(&dy).map_collect(|a, b| a.hypot(*b));

    let energy = ndarray::Zip::from(&gm).and(&lap).map_collect(|g, l| g * g + l * l);
    let taps = gaussian_taps(GMLOG_NORM_SIGMA, filter_radius(GMLOG_NORM_SIGMA));
    let norm = separable(energy.view(), &taps).mapv(|e| e.max(0.0).sqrt() + GMLOG_EPSILON);

    let mut hist = Array2::<f64>::zeros((GMLOG_LEVELS, GMLOG_LEVELS));
    ndarray::Zip::from(&gm)
        .and(&lap)
        .and(&norm)
        .for_each(|g, l, n| hist[[quantize(g / n), quantize(l.abs() / n)]] += 1.0);
    let total = (h * w) as f64;
    hist.mapv_inplace(|c| c / total);
    Ok(hist)
}

/// 40-dimensional GM-LOG vector: GM marginal, LOG marginal, GM independency,
/// LOG independency (10 values each, each block summing to 1).
pub fn gmlog_frame(image: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    let k = joint_histogram(image)?;
    let levels = GMLOG_LEVELS;
    let p_gm: Vec<f64> = (0..levels).map(|m| k.row(m).sum()).collect();
    let p_log: Vec<f64> = (0..levels).map(|n| k.column(n).sum()).collect();

    let occupied_log: Vec<usize> = (0..levels).filter(|&n| p_log[n] > 0.0).collect();
    let occupied_gm: Vec<usize> = (0..levels).filter(|&m| p_gm[m] > 0.0).collect();
    let q_gm: Vec<f64> = (0..levels)
        .map(|m| {
            occupied_log.iter().map(|&n| k[[m, n]] / p_log[n]).sum::<f64>()
                / occupied_log.len() as f64
        })
        .collect();
    let q_log: Vec<f64> = (0..levels)
        .map(|n| {
            occupied_gm.iter().map(|&m| k[[m, n]] / p_gm[m]).sum::<f64>()
                / occupied_gm.len() as f64
        })
        .collect();

    let mut out = Vec::with_capacity(GMLOG_DIM);
    out.extend(p_gm);
    out.extend(p_log);
    out.extend(q_gm);
    out.extend(q_log);
    Ok(out)
}
