//! Seeded regression designs with known informative columns.

use ndarray::Array2;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

pub struct Design {
    pub x: Array2<f64>,
    pub y: Vec<f64>,
    /// Ascending.
    pub informative: Vec<usize>,
}

/// `n x d` standard-normal design; `y` is the sum of `k` randomly placed
/// columns (unit weights) plus Gaussian noise, shifted onto a MOS-like range.
pub fn sparse_linear(n: usize, d: usize, k: usize, noise: f64, seed: u64) -> Design {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut cols: Vec<usize> = (0..d).collect();
    cols.shuffle(&mut rng);
    let mut informative = cols[..k].to_vec();
    informative.sort_unstable();
    let x = Array2::from_shape_fn((n, d), |_| StandardNormal.sample(&mut rng));
    let scale = 1.0 / (k as f64).sqrt();
    let y = (0..n)
        .map(|i| {
            let signal: f64 = informative.iter().map(|&j| x[[i, j]]).sum();
            let e: f64 = StandardNormal.sample(&mut rng);
            3.0 + scale * signal + noise * e
        })
        .collect();
    Design { x, y, informative }
}

/// Small random regression problem for solver checks.
pub fn small_problem(n: usize, d: usize, seed: u64) -> (Array2<f64>, Vec<f64>) {
    let mut rng = StdRng::seed_from_u64(seed);
    let x = Array2::from_shape_fn((n, d), |_| StandardNormal.sample(&mut rng));
    let w: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
    let y = (0..n)
        .map(|i| {
            let lin: f64 = (0..d).map(|j| w[j] * x[[i, j]]).sum();
            let e: f64 = StandardNormal.sample(&mut rng);
            lin.sin() + 0.5 * lin + 0.2 * e
        })
        .collect();
    (x, y)
}

/// One seeded solver-comparison instance.
pub struct SvrInstance {
    pub seed: u64,
    pub x: Array2<f64>,
    pub y: Vec<f64>,
    /// Unseen rows for prediction checks.
    pub probe: Array2<f64>,
    pub c: f64,
    pub epsilon: f64,
    /// `None` for the linear kernel, `Some(gamma)` for RBF.
    pub gamma: Option<f64>,
}

/// `count` instances with 5..=20 points, 1..=5 dimensions, alternating
/// linear and RBF kernels, and a spread of `C` and `epsilon`.
pub fn svr_instances(count: usize) -> Vec<SvrInstance> {
    (0..count as u64)
        .map(|seed| {
            let n = 5 + (seed as usize * 7) % 16;
            let d = 1 + seed as usize % 5;
            let (x, y) = small_problem(n, d, seed);
            let mut rng = StdRng::seed_from_u64(1000 + seed);
            let probe = Array2::from_shape_fn((5, d), |_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                1.5 * z
            });
            SvrInstance {
                seed,
                x,
                y,
                probe,
                c: [0.5, 1.0, 5.0, 20.0][(seed % 4) as usize],
                epsilon: [0.0, 0.05, 0.1, 0.3][((seed / 4) % 4) as usize],
                gamma: (seed % 2 == 1).then(|| 0.1 + 0.2 * (seed % 5) as f64),
            }
        })
        .collect()
}
