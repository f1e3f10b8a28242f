use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

/// Zero-mean generalized Gaussian with the given shape and unit scale:
/// `|x| = G^(1/shape)` for `G ~ Gamma(1/shape, 1)`, random sign.
pub fn ggd<R: Rng>(rng: &mut R, shape: f64, n: usize) -> Vec<f64> {
    let gamma = Gamma::new(1.0 / shape, 1.0).expect("positive shape");
    (0..n)
        .map(|_| {
            let m: f64 = gamma.sample(rng).powf(1.0 / shape);
            if rng.random::<bool>() {
                m
            } else {
                -m
            }
        })
        .collect()
}

pub fn normals<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}
