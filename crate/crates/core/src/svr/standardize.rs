use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

/// Per-feature `(mean, std)` learned from training rows; `std` uses the
/// n - 1 denominator. Columns without spread map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: ArrayView2<'_, f64>) -> Self {
        let n = x.nrows();
        assert!(n > 0, "cannot standardize an empty matrix");
        let mut mean = Vec::with_capacity(x.ncols());
        let mut std = Vec::with_capacity(x.ncols());
        for col in x.axis_iter(Axis(1)) {
            let m = col.sum() / n as f64;
            let s = if n > 1 {
                (col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            mean.push(m);
            std.push(s);
        }
        Self { mean, std }
    }

    pub fn width(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: ArrayView2<'_, f64>) -> Array2<f64> {
        assert_eq!(x.ncols(), self.width(), "standardizer width mismatch");
        let mut out = x.to_owned();
        for (mut col, (&m, &s)) in out
            .axis_iter_mut(Axis(1))
            .zip(self.mean.iter().zip(self.std.iter()))
        {
            if s > 0.0 {
                col.mapv_inplace(|v| (v - m) / s);
            } else {
                col.fill(0.0);
            }
        }
        out
    }
}
