mod common;

use common::oracles::{check_pca, pca_fuzzed_rows};
use dataproxy::features::{fit_pca, FeatureMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn pca_matches_covariance_eigen_oracle_on_fuzzed_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..50 {
        check_pca(&pca_fuzzed_rows(&mut rng));
    }
}

#[test]
fn pca_matches_oracle_on_fixed_matrix() {
    let rows = vec![
        vec![2.5, 2.4, 0.5, 1.0],
        vec![0.5, 0.7, -1.2, 0.3],
        vec![2.2, 2.9, 0.8, -0.4],
        vec![1.9, 2.2, 0.1, 0.9],
        vec![3.1, 3.0, 1.7, -1.1],
        vec![2.3, 2.7, -0.6, 0.2],
    ];
    check_pca(&rows);
}

#[test]
fn components_are_orthonormal_with_positive_pivot() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rows = pca_fuzzed_rows(&mut rng);
    let d = rows[0].len();
    let fm = FeatureMatrix::from_rows(common::ids("r", rows.len()), &rows).unwrap();
    let model = fit_pca(&fm, d).unwrap();
    for a in 0..d {
        let ca = model.component(a);
        let pivot = ca.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        assert!(pivot > 0.0);
        for b in 0..d {
            let dot: f64 = ca.iter().zip(model.component(b)).map(|(x, y)| x * y).sum();
            assert!((dot - f64::from(u8::from(a == b))).abs() < 1e-9);
        }
    }
}
