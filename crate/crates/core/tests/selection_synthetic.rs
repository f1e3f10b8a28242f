use ndarray::{concatenate, Array2, Axis};
use rand::rngs::StdRng;
use rand::SeedableRng;
use vra::selection::{candidate_ks, rank_by_importance, stage1_select_k, stage2_select, SelectionConfig};
use vra::svr::SvrParams;
use vra_testkit::designs::sparse_linear;
use vra_testkit::sampling::normals;

fn hits(selected: &[usize], informative: &[usize]) -> usize {
    selected.iter().filter(|i| informative.contains(i)).count()
}

#[test]
fn dominant_column_ranks_first() {
    let mut first = 0;
    for seed in 0..20 {
        let mut rng = StdRng::seed_from_u64(seed);
        let x = Array2::from_shape_vec((200, 10), normals(&mut rng, 2000)).unwrap();
        let noise = normals(&mut rng, 200);
        let y: Vec<f64> = (0..200).map(|i| 3.0 * x[[i, 0]] + 0.1 * noise[i]).collect();
        let order = rank_by_importance(x.view(), &y, &SvrParams::default()).unwrap();
        first += usize::from(order[0] == 0);
    }
    assert!(first >= 19, "{first}/20");
}

#[test]
fn duplicated_informative_column_ranks_in_top_two() {
    let d = sparse_linear(200, 10, 1, 0.1, 5);
    let j = d.informative[0];
    let x = concatenate(Axis(1), &[d.x.view(), d.x.column(j).insert_axis(Axis(1))]).unwrap();
    let order = rank_by_importance(x.view(), &d.y, &SvrParams::default()).unwrap();
    let mut top = order[..2].to_vec();
    top.sort_unstable();
    assert_eq!(top, vec![j, 10]);
}

#[test]
fn candidate_grid() {
    assert_eq!(candidate_ks(100, 20), vec![20, 40, 60, 80, 100]);
    assert_eq!(candidate_ks(45, 20), vec![20, 40, 45]);
    assert_eq!(candidate_ks(20, 20), vec![20]);
}

#[test]
fn stage1_finds_the_informative_count() {
    let d = sparse_linear(640, 100, 20, 0.3, 1);
    let (k, curve) = stage1_select_k(d.x.view(), &d.y, &SelectionConfig::default()).unwrap();
    assert!(k == 20 || k == 40, "k = {k}, curve {curve:?}");
    assert_eq!(curve.len(), 5);
}

#[test]
fn stage2_recovers_planted_features() {
    let cfg = SelectionConfig::default();
    let mut good = 0;
    for seed in 0..10 {
        let d = sparse_linear(640, 100, 5, 0.3, 100 + seed);
        let r = stage2_select(d.x.view(), &d.y, 10, &cfg).unwrap();
        assert_eq!(r.selected_indices.len(), 10);
        good += usize::from(hits(&r.selected_indices, &d.informative) >= 4);
        // every informative column beats every noise column in frequency
        let min_inf = d.informative.iter().map(|&j| r.frequency[j]).min().unwrap();
        let max_noise = (0..100).filter(|j| !d.informative.contains(j)).map(|j| r.frequency[j]).max().unwrap();
        assert!(min_inf > max_noise, "seed {seed}: {min_inf} <= {max_noise}");
    }
    assert!(good >= 8, "{good}/10");
}

#[test]
fn stage2_selection_comes_from_top_k_sets() {
    let d = sparse_linear(120, 30, 3, 0.5, 9);
    let cfg = SelectionConfig {
        stage2_iterations: 15,
        ..SelectionConfig::default()
    };
    let r = stage2_select(d.x.view(), &d.y, 6, &cfg).unwrap();
    assert_eq!(r.frequency.iter().sum::<u32>(), 6 * 15);
    for &j in &r.selected_indices {
        assert!(r.frequency[j] > 0);
    }
    assert!(r.selected_indices.windows(2).all(|w| w[0] < w[1]));
    let again = stage2_select(d.x.view(), &d.y, 6, &cfg).unwrap();
    assert_eq!(r, again);
}
