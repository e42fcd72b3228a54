mod support;

use proptest::prelude::*;
use qrfsj::forest::{Forest, ForestConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use support::dataset;

fn random_data(seed: u64, n: usize, m: usize) -> qrfsj::dataset::Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.random::<f64>()).collect()).collect();
    let y = x
        .iter()
        .map(|r| r.iter().sum::<f64>() + rng.sample::<f64, _>(StandardNormal) * 0.2)
        .collect();
    dataset(x, y)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        for k in i..=j {
            r[idx[k]] = (i + j) as f64 / 2.0;
        }
        i = j + 1;
    }
    r
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn same_seed_same_forest(seed in any::<u64>(), n in 8usize..60, m in 1usize..5) {
        let data = random_data(seed, n, m);
        let cfg = ForestConfig { ntree: 12, seed, ..Default::default() };
        let a = Forest::fit(&data, &cfg).unwrap();
        let b = Forest::fit(&data, &cfg).unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn weights_are_a_distribution(seed in any::<u64>(), n in 5usize..80, q in prop::collection::vec(0.0f64..1.0, 3)) {
        let data = random_data(seed, n, 3);
        let forest = Forest::fit(&data, &ForestConfig { ntree: 15, seed, ..Default::default() }).unwrap();
        let w = forest.forest_weights(&q).unwrap();
        prop_assert!(w.as_slice().iter().all(|&v| v >= 0.0));
        prop_assert!((w.sum() - 1.0).abs() < 1e-12);
        prop_assert_eq!(w.dot(forest.train_targets()), forest.predict_mean(&q).unwrap());
    }

    #[test]
    fn leaves_hold_in_bag_rows(seed in any::<u64>(), n in 5usize..60) {
        let data = random_data(seed, n, 2);
        let forest = Forest::fit(&data, &ForestConfig { ntree: 5, seed, ..Default::default() }).unwrap();
        for tree in forest.trees() {
            let bag = tree.in_bag_rows();
            for i in 0..n {
                let leaf = tree.leaf(data.row(i));
                prop_assert!(leaf.windows(2).all(|p| p[0] < p[1]));
                prop_assert!(leaf.iter().all(|r| bag.binary_search(r).is_ok()));
            }
        }
    }
}

#[test]
fn oob_fraction_for_larger_samples() {
    for seed in 0..5 {
        let data = random_data(seed, 250, 2);
        let forest = Forest::fit(&data, &ForestConfig { ntree: 30, seed, ..Default::default() }).unwrap();
        for tree in forest.trees() {
            let f = tree.oob_rows(250).len() as f64 / 250.0;
            assert!((0.20..=0.55).contains(&f), "{f}");
        }
    }
}

#[test]
fn pdp_tracks_a_monotone_signal() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 300;
    let x: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]).collect();
    let y: Vec<f64> = x.iter().map(|r| 4.0 * r[0] + rng.sample::<f64, _>(StandardNormal) * 0.3).collect();
    let data = dataset(x, y);
    let forest = Forest::fit(&data, &ForestConfig { ntree: 100, seed: 8, ..Default::default() }).unwrap();
    let grid = qrfsj::forest::default_grid(&data, 0, 25);
    let curve = forest.partial_dependence(&data, 0, &grid).unwrap();
    let g: Vec<f64> = curve.iter().map(|p| p.0).collect();
    let p: Vec<f64> = curve.iter().map(|p| p.1).collect();
    assert!(spearman(&g, &p) >= 0.9, "{}", spearman(&g, &p));
    assert!(p[24] - p[0] > 2.0);
}

#[test]
fn pdp_2d_matches_direct_averaging() {
    let data = random_data(3, 60, 3);
    let forest = Forest::fit(&data, &ForestConfig { ntree: 20, seed: 3, ..Default::default() }).unwrap();
    let ga = [0.0, 0.3, 0.9];
    let gb = [0.1, 0.5];
    let surface = forest.partial_dependence_2d(&data, 0, 2, &ga, &gb).unwrap();
    for (i, &a) in ga.iter().enumerate() {
        for (j, &b) in gb.iter().enumerate() {
            let mut total = 0.0;
            for row in data.features() {
                let mut x = row.clone();
                x[0] = a;
                x[2] = b;
                total += forest.predict_mean(&x).unwrap();
            }
            assert_eq!(surface[i][j], total / data.len() as f64);
        }
    }
    let one = forest.partial_dependence(&data, 1, &[0.4]).unwrap();
    let two = forest.partial_dependence_2d(&data, 1, 1, &[0.4], &[0.4]).unwrap();
    assert_eq!(one[0].1, two[0][0]);
}
