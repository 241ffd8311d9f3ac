//! Independent reference implementations shared by the oracle suites and
//! the acceptance target. Check functions panic on mismatch.

use dataproxy::features::{build_nn_index, fit_pca, project, FeatureMatrix, Metric};
use dataproxy::harness::{generate_dataset, LabeledData, Mlp, SyntheticDatasetSpec};
use dataproxy::resample::weighted_sample_positions;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{covariance, ids, jacobi_eigen};

/// Exact inclusion probabilities of successive sampling: draw one item at a
/// time with probability proportional to its weight among the items not
/// yet drawn, `k` times. Enumerates every ordered draw sequence.
pub fn inclusion_oracle(weights: &[f64], k: usize) -> Vec<f64> {
    fn walk(w: &[f64], k: usize, taken: &mut Vec<usize>, p: f64, acc: &mut [f64]) {
        if taken.len() == k {
            for &i in taken.iter() {
                acc[i] += p;
            }
            return;
        }
        let rest: f64 = (0..w.len()).filter(|i| !taken.contains(i)).map(|i| w[i]).sum();
        for i in 0..w.len() {
            if taken.contains(&i) || w[i] == 0.0 {
                continue;
            }
            taken.push(i);
            walk(w, k, taken, p * w[i] / rest, acc);
            taken.pop();
        }
    }
    let mut acc = vec![0.0; weights.len()];
    walk(weights, k, &mut Vec::new(), 1.0, &mut acc);
    acc
}

pub fn empirical(weights: &[f64], k: usize, trials: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = vec![0usize; weights.len()];
    for _ in 0..trials {
        for p in weighted_sample_positions(weights, k, &mut rng).unwrap() {
            hits[p] += 1;
        }
    }
    hits.into_iter().map(|h| h as f64 / trials as f64).collect()
}

pub const PCA_TOL: f64 = 1e-6;

/// Rows with well-separated variances along a random rotation, so that
/// every eigenvector is well defined.
pub fn pca_fuzzed_rows(rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let d = rng.random_range(2..=8);
    let n = rng.random_range(d + 8..=60);
    let scales: Vec<f64> = (0..d).map(|k| 0.5 + 1.5 * k as f64 + rng.random_range(0.0..0.3)).collect();
    let mix: Vec<Vec<f64>> = (0..d).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    (0..n)
        .map(|_| {
            let z: Vec<f64> = scales.iter().map(|s| s * rng.random_range(-1.0..1.0)).collect();
            (0..d).map(|j| (0..d).map(|k| z[k] * mix[k][j]).sum::<f64>() + 3.0).collect()
        })
        .collect()
}

pub fn check_pca(rows: &[Vec<f64>]) {
    let d = rows[0].len();
    let fm = FeatureMatrix::from_rows(ids("r", rows.len()), rows).unwrap();
    let model = fit_pca(&fm, d).unwrap();

    let (values, vectors) = jacobi_eigen(&covariance(rows));
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);

    for (k, &o) in order.iter().enumerate() {
        let ev = model.explained_variance()[k];
        assert!((ev - values[o]).abs() <= PCA_TOL * scale, "eigenvalue {k}: {ev} vs {}", values[o]);
        let got = model.component(k);
        let want = &vectors[o];
        let plus: f64 = got.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let minus: f64 = got.iter().zip(want).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max);
        assert!(plus.min(minus) <= PCA_TOL, "component {k} differs: {got:?} vs {want:?}");
    }

    // Projection of a row equals the dot products with the oracle vectors.
    let p = project(&model, &fm).unwrap();
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / rows.len() as f64).collect();
    for (k, &o) in order.iter().enumerate() {
        let dot: f64 = (0..d).map(|j| (rows[0][j] - mean[j]) * vectors[o][j]).sum();
        assert!((p.row(0)[k].abs() - dot.abs()).abs() <= 1e-6 * (1.0 + dot.abs()));
    }
}

pub fn nn_oracle(refs: &[Vec<f64>], q: &[f64], metric: Metric) -> (usize, f64) {
    let dist = |r: &[f64]| match metric {
        Metric::Euclidean => r.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt(),
        Metric::Cosine => {
            let dot: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
            let nr = r.iter().map(|a| a * a).sum::<f64>().sqrt();
            let nq = q.iter().map(|a| a * a).sum::<f64>().sqrt();
            if nr * nq == 0.0 {
                1.0
            } else {
                1.0 - dot / (nr * nq)
            }
        }
    };
    let mut best = (0, f64::INFINITY);
    for (i, r) in refs.iter().enumerate() {
        let d = dist(r);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

pub fn random_rows(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| rng.random_range(-5.0..5.0)).collect()).collect()
}

pub fn check_nn(refs: &[Vec<f64>], queries: &[Vec<f64>], metric: Metric) {
    let index =
        build_nn_index(&FeatureMatrix::from_rows(ids("t", refs.len()), refs).unwrap(), metric).unwrap();
    let qm = FeatureMatrix::from_rows(ids("q", queries.len()), queries).unwrap();
    let batch = index.nearest_batch(&qm).unwrap();
    for (q, got) in queries.iter().zip(&batch) {
        let (pos, dist) = nn_oracle(refs, q, metric);
        assert_eq!(got.position, pos);
        assert!((got.distance - dist).abs() < 1e-12);
        assert_eq!(index.nearest(q).unwrap(), *got);
    }
}

fn loss(model: &Mlp, data: &LabeledData, rows: &[usize]) -> f64 {
    model.loss_and_gradients(data, rows).0
}

pub fn check_gradient(hidden: usize) {
    let ds = generate_dataset(&SyntheticDatasetSpec {
        num_labels: 3,
        samples_per_label_train: 4,
        samples_per_label_test: 1,
        feature_dim: 5,
        cluster_spread: 1.0,
        label_overlap: 0.3,
        modes_per_label: 1,
        seed: 9,
    })
    .unwrap();
    let rows = [0, 3, 5, 7, 10];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let model = Mlp::new(5, hidden, 3, &mut rng);
    let analytic = model.loss_and_gradients(&ds.train, &rows).1.flatten();
    let h = 1e-6;
    let n = analytic.len();
    for i in 0..n {
        let mut plus = model.clone();
        *plus.parameters_mut().nth(i).unwrap() += h;
        let mut minus = model.clone();
        *minus.parameters_mut().nth(i).unwrap() -= h;
        let numeric = (loss(&plus, &ds.train, &rows) - loss(&minus, &ds.train, &rows)) / (2.0 * h);
        let a = analytic[i];
        let rel = (a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-7);
        assert!(rel < 1e-4, "hidden {hidden}, parameter {i}: analytic {a}, numeric {numeric}, rel {rel}");
    }
}
