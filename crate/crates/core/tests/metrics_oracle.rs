use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use vra::evaluation::{method_aggregate, plcc, remap, rmse, srcc, Logistic4, RemapFallback};
use vra_testkit::metrics::{brute_pearson, brute_rmse, brute_spearman};

/// Random vector with plenty of ties: values on a coarse grid.
fn tied(rng: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| (rng.random_range(0..12) as f64) * 0.5).collect()
}

fn continuous(rng: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-3.0..3.0)).collect()
}

#[test]
fn agree_with_brute_force_definitions() {
    let mut rng = StdRng::seed_from_u64(20);
    for trial in 0..1000 {
        let n = rng.random_range(3..60);
        let (a, b) = if trial % 2 == 0 {
            (tied(&mut rng, n), tied(&mut rng, n))
        } else {
            (continuous(&mut rng, n), continuous(&mut rng, n))
        };
        let constant = |v: &[f64]| v.iter().all(|&x| x == v[0]);
        if constant(&a) || constant(&b) {
            assert!(srcc(&a, &b).is_err());
            continue;
        }
        assert!((srcc(&a, &b).unwrap() - brute_spearman(&a, &b)).abs() <= 1e-10);
        assert!((plcc(&a, &b).unwrap() - brute_pearson(&a, &b)).abs() <= 1e-10);
        assert!((rmse(&a, &b).unwrap() - brute_rmse(&a, &b)).abs() <= 1e-10);
    }
}

#[test]
fn spearman_with_ties_reference() {
    let r = srcc(&[1.0, 2.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
    assert!((r - 0.9486832980505138).abs() < 1e-15);
}

#[test]
fn spearman_is_exactly_invariant_under_increasing_maps() {
    let mut rng = StdRng::seed_from_u64(4);
    let curve = Logistic4 {
        beta1: 5.0,
        beta2: 1.0,
        beta3: 0.2,
        beta4: 0.7,
    };
    for _ in 0..200 {
        let p = continuous(&mut rng, 40);
        let g = continuous(&mut rng, 40);
        let base = srcc(&p, &g).unwrap();
        let cubed: Vec<f64> = p.iter().map(|v| v.powi(3)).collect();
        let mapped: Vec<f64> = p.iter().map(|&v| curve.eval(v)).collect();
        assert_eq!(srcc(&cubed, &g).unwrap(), base);
        // the logistic can merge distinct inputs when it saturates; only
        // compare when it kept them distinct
        let mut sorted = mapped.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).all(|w| w[0] < w[1]) {
            assert_eq!(srcc(&mapped, &g).unwrap(), base);
        }
    }
}

proptest! {
    #[test]
    fn pearson_affine_invariance(
        a in prop::collection::vec(-10.0f64..10.0, 5..40),
        scale in 0.1f64..10.0,
        shift in -5.0f64..5.0,
    ) {
        let b: Vec<f64> = a.iter().enumerate().map(|(i, v)| v.sin() + i as f64 * 0.01).collect();
        prop_assume!(plcc(&a, &b).is_ok());
        let moved: Vec<f64> = a.iter().map(|v| scale * v + shift).collect();
        prop_assert!((plcc(&moved, &b).unwrap() - plcc(&a, &b).unwrap()).abs() < 1e-9);
        let flipped: Vec<f64> = a.iter().map(|v| -scale * v + shift).collect();
        prop_assert!((plcc(&flipped, &b).unwrap() + plcc(&a, &b).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn rmse_translation_covariance(
        pairs in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..40),
        shift in -100.0f64..100.0,
    ) {
        let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let a2: Vec<f64> = a.iter().map(|v| v + shift).collect();
        let b2: Vec<f64> = b.iter().map(|v| v + shift).collect();
        prop_assert!((rmse(&a2, &b2).unwrap() - rmse(&a, &b).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn spearman_bounded(a in prop::collection::vec(-5.0f64..5.0, 3..30)) {
        let b: Vec<f64> = a.iter().map(|v| (v * 3.0).cos()).collect();
        if let Ok(r) = srcc(&a, &b) {
            prop_assert!((-1.0..=1.0).contains(&r));
        }
    }
}

fn reference_curve() -> Logistic4 {
    Logistic4 {
        beta1: 5.0,
        beta2: 1.0,
        beta3: 0.0,
        beta4: 1.0,
    }
}

#[test]
fn logistic_recovers_noiseless_curve() {
    let curve = reference_curve();
    let pred: Vec<f64> = (0..200).map(|i| -4.0 + 8.0 * i as f64 / 199.0).collect();
    let gt: Vec<f64> = pred.iter().map(|&p| curve.eval(p)).collect();
    let r = remap(&pred, &gt);
    assert_eq!(r.fallback, None);
    assert!(rmse(&r.values, &gt).unwrap() < 1e-6);
    let fit = r.fit.unwrap();
    assert!(fit.beta4.abs() > 0.0);
}

#[test]
fn logistic_noisy_residual_matches_noise() {
    let curve = reference_curve();
    let mut rng = StdRng::seed_from_u64(11);
    let sigma = 0.1;
    let normals = vra_testkit::sampling::normals(&mut rng, 1000);
    let pred: Vec<f64> = (0..1000).map(|_| rng.random_range(-4.0..4.0)).collect();
    let gt: Vec<f64> = pred.iter().zip(&normals).map(|(&p, e)| curve.eval(p) + sigma * e).collect();
    let r = remap(&pred, &gt);
    let e = rmse(&r.values, &gt).unwrap();
    assert!((e - sigma).abs() <= 0.1 * sigma, "{e}");
}

#[test]
fn logistic_remap_never_worse_than_identity() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..20 {
        let gt: Vec<f64> = (0..30).map(|_| rng.random_range(1.0..5.0)).collect();
        let r = remap(&gt, &gt);
        assert!(rmse(&r.values, &gt).unwrap() <= rmse(&gt, &gt).unwrap());
        assert_eq!(r.fallback, Some(RemapFallback::IdentityBetter));
    }
}

#[test]
fn logistic_on_constant_targets_is_flat() {
    let pred: Vec<f64> = (0..20).map(|i| i as f64 * 0.3).collect();
    let gt = vec![3.5; 20];
    let r = remap(&pred, &gt);
    assert!(r.values.iter().all(|v| (v - 3.5).abs() < 1e-6), "{:?}", r.values);
}

#[test]
fn logistic_curve_is_monotone() {
    let mut rng = StdRng::seed_from_u64(9);
    let pred: Vec<f64> = (0..80).map(|_| rng.random_range(0.0..5.0)).collect();
    let gt: Vec<f64> = pred.iter().map(|p| (p * 0.8).tanh() * 2.0 + 3.0 + rng.random_range(-0.3..0.3)).collect();
    let fit = remap(&pred, &gt).fit.expect("logistic fits");
    let grid: Vec<f64> = (0..500).map(|i| -5.0 + i as f64 * 0.03).map(|x| fit.eval(x)).collect();
    let increasing = grid.windows(2).all(|w| w[1] >= w[0]);
    let decreasing = grid.windows(2).all(|w| w[1] <= w[0]);
    assert!(increasing || decreasing);
}

/// Group means average out per-video noise, so method-level rank
/// agreement is higher on average.
#[test]
fn method_level_beats_video_level_on_noisy_predictions() {
    let (mut video, mut method) = (0.0, 0.0);
    for seed in 0..50 {
        let mut rng = StdRng::seed_from_u64(500 + seed);
        let levels: Vec<f64> = (0..16).map(|j| 1.8 + 2.4 * j as f64 / 15.0).collect();
        let (mut pred, mut gt, mut groups) = (Vec::new(), Vec::new(), Vec::new());
        let noise = vra_testkit::sampling::normals(&mut rng, 16 * 8 * 2);
        for (j, level) in levels.iter().enumerate() {
            for k in 0..8 {
                let g = level + 0.5 * noise[2 * (j * 8 + k)];
                gt.push(g);
                pred.push(g + 0.6 * noise[2 * (j * 8 + k) + 1]);
                groups.push(format!("s{j:02}"));
            }
        }
        video += srcc(&pred, &gt).unwrap();
        let m = method_aggregate(&pred, &gt, &groups).unwrap();
        method += srcc(&m.pred, &m.gt).unwrap();
    }
    assert!(method / 50.0 >= video / 50.0, "{method} < {video}");
}
