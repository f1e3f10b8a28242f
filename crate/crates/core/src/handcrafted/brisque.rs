//! BRISQUE spatial NSS features: 18 per scale, two scales, 36 per frame.
//!
//! Per scale, in this order:
//! `ggd.shape, ggd.var` of the MSCN map, then for each neighbour product
//! orientation `h, v, d1, d2` the AGGD `shape, mean, left_var, right_var`.
//! Scale 2 is the 2x2 box-averaged image.

use ndarray::{s, Array2, ArrayView2};

use super::filter::downsample2;
use super::nss::{fit_aggd, fit_ggd, mscn, MIN_SIDE};
use super::{FeatureError, Result};

pub const BRISQUE_DIM: usize = 36;
const ORIENTATIONS: [&str; 4] = ["h", "v", "d1", "d2"];

/// Frozen feature names, e.g. `brisque.s1.ggd.shape`, `brisque.s2.d2.right_var`.
pub fn brisque_feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(BRISQUE_DIM);
    for scale in 1..=2 {
        names.push(format!("brisque.s{scale}.ggd.shape"));
        names.push(format!("brisque.s{scale}.ggd.var"));
        for o in ORIENTATIONS {
            for p in ["shape", "mean", "left_var", "right_var"] {
                names.push(format!("brisque.s{scale}.{o}.{p}"));
            }
        }
    }
    names
}

/// Products of each MSCN coefficient with its right (`h`), lower (`v`),
/// lower-right (`d1`) and lower-left (`d2`) neighbour.
pub fn pairwise_products(m: ArrayView2<'_, f64>) -> [Vec<f64>; 4] {
    let (h, w) = m.dim();
    let prod = |a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>| -> Vec<f64> {
        ndarray::Zip::from(&a).and(&b).map_collect(|x, y| x * y).into_iter().collect()
    };
    [
        prod(m.slice(s![.., ..w - 1]), m.slice(s![.., 1..])),
        prod(m.slice(s![..h - 1, ..]), m.slice(s![1.., ..])),
        prod(m.slice(s![..h - 1, ..w - 1]), m.slice(s![1.., 1..])),
        prod(m.slice(s![..h - 1, 1..]), m.slice(s![1.., ..w - 1])),
    ]
}

fn scale_features(img: ArrayView2<'_, f64>, out: &mut Vec<f64>) -> Result<()> {
    let m = mscn(img)?;
    let coeffs: Vec<f64> = m.iter().copied().collect();
    let g = fit_ggd(&coeffs)?;
    out.push(g.shape);
    out.push(g.variance);
    for products in pairwise_products(m.view()) {
        let a = fit_aggd(&products)?;
        out.extend([a.shape, a.mean, a.sigma_left.powi(2), a.sigma_right.powi(2)]);
    }
    Ok(())
}

/// 36-dimensional BRISQUE vector of one luminance frame (values on [0, 255]).
pub fn brisque_frame(image: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    let (h, w) = image.dim();
    if h < 2 * MIN_SIDE || w < 2 * MIN_SIDE {
        return Err(FeatureError::TooSmall { w, h, min: 2 * MIN_SIDE });
    }
    let mut out = Vec::with_capacity(BRISQUE_DIM);
    scale_features(image, &mut out)?;
    let half: Array2<f64> = downsample2(image);
    scale_features(half.view(), &mut out)?;
    debug_assert_eq!(out.len(), BRISQUE_DIM);
    Ok(out)
}
