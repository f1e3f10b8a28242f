//! Small convolution helpers on luminance planes. Borders use symmetric
//! (half-sample) reflection, so filtering commutes with image mirroring.

use ndarray::{Array2, ArrayView2};

/// Maps an out-of-range index into `0..n` by symmetric reflection.
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let mut k = i.rem_euclid(period);
    if k >= n {
        k = period - 1 - k;
    }
    k as usize
}

/// Normalized 1-D Gaussian taps over `-radius..=radius`.
pub fn gaussian_taps(sigma: f64, radius: usize) -> Vec<f64> {
    let r = radius as isize;
    let taps: Vec<f64> = (-r..=r)
        .map(|x| (-((x * x) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / sum).collect()
}

/// Correlates rows with `taps` then columns with `taps`.
pub fn separable(img: ArrayView2<'_, f64>, taps: &[f64]) -> Array2<f64> {
    let (h, w) = img.dim();
    let r = (taps.len() / 2) as isize;
    let mut tmp = Array2::<f64>::zeros((h, w));
    for i in 0..h {
        for j in 0..w {
            let mut acc = 0.0;
            for (k, t) in taps.iter().enumerate() {
                acc += t * img[[i, reflect(j as isize + k as isize - r, w)]];
            }
            tmp[[i, j]] = acc;
        }
    }
    let mut out = Array2::<f64>::zeros((h, w));
    for i in 0..h {
        for j in 0..w {
            let mut acc = 0.0;
            for (k, t) in taps.iter().enumerate() {
                acc += t * tmp[[reflect(i as isize + k as isize - r, h), j]];
            }
            out[[i, j]] = acc;
        }
    }
    out
}

/// Full 2-D correlation with an odd-sized kernel.
pub fn correlate(img: ArrayView2<'_, f64>, kernel: ArrayView2<'_, f64>) -> Array2<f64> {
    let (h, w) = img.dim();
    let (kh, kw) = kernel.dim();
    let (ry, rx) = ((kh / 2) as isize, (kw / 2) as isize);
    Array2::from_shape_fn((h, w), |(i, j)| {
        let mut acc = 0.0;
        for a in 0..kh {
            let y = reflect(i as isize + a as isize - ry, h);
            for b in 0..kw {
                let x = reflect(j as isize + b as isize - rx, w);
                acc += kernel[[a, b]] * img[[y, x]];
            }
        }
        acc
    })
}

/// 2x2 box average; odd trailing rows/columns are dropped.
pub fn downsample2(img: ArrayView2<'_, f64>) -> Array2<f64> {
    let (h, w) = img.dim();
    Array2::from_shape_fn((h / 2, w / 2), |(i, j)| {
        let (y, x) = (2 * i, 2 * j);
        0.25 * (img[[y, x]] + img[[y, x + 1]] + img[[y + 1, x]] + img[[y + 1, x + 1]])
    })
}
