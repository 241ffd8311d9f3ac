mod common;

use common::oracles::{check_nn, random_rows};
use dataproxy::features::Metric;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn matches_linear_scan_on_200_references() {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    let refs = random_rows(&mut rng, 200, 6);
    let queries = random_rows(&mut rng, 50, 6);
    check_nn(&refs, &queries, Metric::Euclidean);
    check_nn(&refs, &queries, Metric::Cosine);
}

#[test]
fn matches_linear_scan_on_50_fuzzed_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for i in 0..50 {
        let d = rng.random_range(1..=10);
        let n = rng.random_range(1..=120);
        let refs = random_rows(&mut rng, n, d);
        let queries = random_rows(&mut rng, 20, d);
        check_nn(&refs, &queries, if i % 2 == 0 { Metric::Euclidean } else { Metric::Cosine });
    }
}

#[test]
fn duplicate_references_resolve_to_first() {
    let refs = vec![vec![1.0, 1.0], vec![0.0, 0.0], vec![1.0, 1.0]];
    check_nn(&refs, &[vec![0.9, 1.1], vec![2.0, 2.0]], Metric::Euclidean);
}
