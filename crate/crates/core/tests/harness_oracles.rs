mod common;

use std::collections::{BTreeSet, HashMap};

use dataproxy::features::{FeatureMatrix, Metric};
use dataproxy::harness::{run_experiment, ExperimentConfig, Method, SearchSpaceSpec, SyntheticDatasetSpec};
use dataproxy::resample::{aggregate_label_importance, reduce_labels, uniform_proxy, Aggregation};
use dataproxy::{
    assign_test_importance, classify_outcomes, generate_data_proxy, CaseLabel, DatasetManifest,
    ImportanceConstants, ImportanceTable, ProbeOutcomeSet, ProxyOptions, ProxySpec, SampleId, Split,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Case by the agreement definitions: both right, both wrong, or the
/// better probe right (case 3) / wrong (case 4).
fn expected_case(lower: bool, upper: bool, upper_better: bool) -> usize {
    match (lower, upper) {
        (true, true) => 1,
        (false, false) => 2,
        _ => {
            let better_is_right = if upper_better { upper } else { lower };
            if better_is_right {
                3
            } else {
                4
            }
        }
    }
}

fn random_outcomes(rng: &mut ChaCha8Rng, n: usize, p_lower: f64, p_upper: f64) -> ProbeOutcomeSet {
    let lower: Vec<bool> = (0..n).map(|_| rng.random_bool(p_lower)).collect();
    let upper: Vec<bool> = (0..n).map(|_| rng.random_bool(p_upper)).collect();
    ProbeOutcomeSet::from_flags(
        vec!["lo".into(), "hi".into()],
        "lo",
        "hi",
        common::ids("t", n),
        vec![lower, upper],
    )
    .unwrap()
}

#[test]
fn reclassification_of_100_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let constants = ImportanceConstants::default();
    for (pl, pu) in [(0.4, 0.8), (0.8, 0.3)] {
        let o = random_outcomes(&mut rng, 100, pl, pu);
        let upper_better = o.accuracy_of(1) > o.accuracy_of(0);
        let cases = classify_outcomes(&o);
        let imp = assign_test_importance(&o, &constants).unwrap();
        for i in 0..100 {
            let want = expected_case(o.flags(0)[i], o.flags(1)[i], upper_better);
            assert_eq!(cases[i].index() + 1, want);
            assert_eq!(imp.values()[i], [2.0, 1.0, 6.0, 1.0][want - 1]);
        }
    }
}

#[test]
fn four_sample_fixture() {
    // lower: 1 0 1 0 (0.5), upper: 1 0 0 1 (0.5) -> tie, disagreements kept as case 3
    let o = ProbeOutcomeSet::from_flags(
        vec!["lo".into(), "hi".into()],
        "lo",
        "hi",
        common::ids("t", 4),
        vec![vec![true, false, true, false], vec![true, false, false, true]],
    )
    .unwrap();
    assert_eq!(o.accuracies(), &[0.5, 0.5]);
    assert_eq!(
        classify_outcomes(&o),
        vec![CaseLabel::Case1, CaseLabel::Case2, CaseLabel::Case3, CaseLabel::Case3]
    );
    // upper 1 1 0 1 (0.75): sample 2 has only the worse probe right -> case 4
    let o = ProbeOutcomeSet::from_flags(
        vec!["lo".into(), "hi".into()],
        "lo",
        "hi",
        common::ids("t", 4),
        vec![vec![true, false, true, false], vec![true, true, false, true]],
    )
    .unwrap();
    assert_eq!(
        classify_outcomes(&o),
        vec![CaseLabel::Case1, CaseLabel::Case3, CaseLabel::Case4, CaseLabel::Case3]
    );
}

fn manifest(train_labels: &[u32], test_labels: &[u32], num_labels: u32) -> DatasetManifest {
    let train =
        train_labels.iter().enumerate().map(|(i, &l)| (SampleId::new(format!("a{i}")).unwrap(), l)).collect();
    let test =
        test_labels.iter().enumerate().map(|(i, &l)| (SampleId::new(format!("t{i}")).unwrap(), l)).collect();
    DatasetManifest::new(train, test, num_labels).unwrap()
}

#[test]
fn transfer_on_100_train_40_test_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(140);
    let d = 5;
    let train_labels: Vec<u32> = (0..100).map(|i| i % 4).collect();
    let test_labels: Vec<u32> = (0..40).map(|i| i % 4).collect();
    let m = manifest(&train_labels, &test_labels, 4);
    let rows = |n: usize, rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
        (0..n).map(|_| (0..d).map(|_| rng.random_range(-3.0..3.0)).collect()).collect()
    };
    let (train_rows, test_rows) = (rows(100, &mut rng), rows(40, &mut rng));
    let train = FeatureMatrix::from_rows(m.train_ids().to_vec(), &train_rows).unwrap();
    let test = FeatureMatrix::from_rows(m.test_ids().to_vec(), &test_rows).unwrap();
    let o = ProbeOutcomeSet::from_flags(
        vec!["lo".into(), "hi".into()],
        "lo",
        "hi",
        m.test_ids().to_vec(),
        vec![
            (0..40).map(|_| rng.random_bool(0.5)).collect(),
            (0..40).map(|_| rng.random_bool(0.8)).collect(),
        ],
    )
    .unwrap();
    let test_importance = assign_test_importance(&o, &ImportanceConstants::default()).unwrap();

    // A full-rank PCA is a rigid motion, so Euclidean neighbours in the
    // projected space are the neighbours in the raw space.
    let mut options = ProxyOptions::new(ProxySpec::new(0.3, 5));
    options.pca_dim = Some(d);
    options.metric = Metric::Euclidean;
    let art = generate_data_proxy(&m, &o, &train, &test, &options).unwrap();
    for (i, r) in train_rows.iter().enumerate() {
        let nn = (0..40)
            .min_by(|&a, &b| {
                let da: f64 = test_rows[a].iter().zip(r).map(|(x, y)| (x - y).powi(2)).sum();
                let db: f64 = test_rows[b].iter().zip(r).map(|(x, y)| (x - y).powi(2)).sum();
                da.total_cmp(&db)
            })
            .unwrap();
        assert_eq!(art.nearest[i].position, nn, "train row {i}");
        assert_eq!(art.train_importance.values()[i], test_importance.values()[nn]);
    }
    let total: f64 = art.train_importance.values().iter().sum();
    for (v, k) in art.train_importance.values().iter().zip(art.train_importance.keep_prob().unwrap()) {
        assert!((k - v / total).abs() < 1e-15);
    }
    assert_eq!(art.selection.len(), 30);
}

#[test]
fn label_aggregation_matches_group_by() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let labels: Vec<u32> = (0..200).map(|_| rng.random_range(0..7)).collect();
    let mut labels_full = labels.clone();
    labels_full.extend(0..7); // every label present
    let m = manifest(&labels_full, &[0], 7);
    let values: Vec<f64> = (0..labels_full.len()).map(|_| rng.random_range(0.0..5.0)).collect();
    let table = ImportanceTable::new(Split::Train, m.train_ids().to_vec(), values.clone()).unwrap();
    let mut sums: HashMap<u32, (f64, usize)> = HashMap::new();
    for (l, v) in labels_full.iter().zip(&values) {
        let e = sums.entry(*l).or_default();
        e.0 += v;
        e.1 += 1;
    }
    let sum = aggregate_label_importance(&table, &m, Aggregation::Sum).unwrap();
    let mean = aggregate_label_importance(&table, &m, Aggregation::Mean).unwrap();
    for l in 0..7u32 {
        let (s, c) = sums[&l];
        assert!((sum[l as usize] - s).abs() < 1e-9);
        assert!((mean[l as usize] - s / c as f64).abs() < 1e-12);
    }
}

/// Kept labels by prefix sums: the labels ranked (ascending importance,
/// then id) at positions `m..` for the smallest `m` whose suffix fits the
/// budget, never dropping every label.
fn greedy_oracle(importance: &[f64], counts: &[usize], fraction: f64) -> BTreeSet<u32> {
    let mut ranked: Vec<usize> = (0..importance.len()).collect();
    ranked.sort_by(|&a, &b| importance[a].partial_cmp(&importance[b]).unwrap().then(a.cmp(&b)));
    let total: usize = counts.iter().sum();
    let budget = (fraction * total as f64 + 1e-9).floor() as usize;
    let suffix = |m: usize| ranked[m..].iter().map(|&l| counts[l]).sum::<usize>();
    let m =
        (0..ranked.len()).find(|&m| suffix(m) <= budget).unwrap_or(ranked.len() - 1).min(ranked.len() - 1);
    ranked[m..].iter().map(|&l| l as u32).collect()
}

#[test]
fn label_reduction_matches_greedy_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..500 {
        let l = rng.random_range(1..12);
        let imp: Vec<f64> = (0..l).map(|_| f64::from(rng.random_range(0..6u8))).collect();
        let counts: Vec<usize> = (0..l).map(|_| rng.random_range(1..50)).collect();
        let f = rng.random_range(0.01..1.0);
        assert_eq!(
            reduce_labels(&imp, &counts, f).unwrap(),
            greedy_oracle(&imp, &counts, f),
            "{imp:?} {counts:?} {f}"
        );
    }
    // 100 labels of 500, keep 20% of the samples -> the 20 most important
    let imp: Vec<f64> = (0..100).map(f64::from).collect();
    let kept = reduce_labels(&imp, &[500; 100], 0.2).unwrap();
    assert_eq!(kept, (80..100).collect());
}

#[test]
fn uniform_baseline_label_counts_pass_chi_square() {
    let sizes = [40usize, 60, 80, 100, 120];
    let labels: Vec<u32> =
        sizes.iter().enumerate().flat_map(|(l, &s)| std::iter::repeat_n(l as u32, s)).collect();
    let m = manifest(&labels, &[0], 5);
    let ratio = 0.1;
    let seeds = 500;
    let mut observed = [0usize; 5];
    for seed in 0..seeds {
        let sel = uniform_proxy(&m, ratio, seed).unwrap();
        assert_eq!(sel.len(), 40);
        for id in &sel.kept_train_ids {
            observed[m.label_of(id).unwrap() as usize] += 1;
        }
    }
    let chi2: f64 = sizes
        .iter()
        .zip(observed)
        .map(|(&s, o)| {
            let e = seeds as f64 * ratio * s as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    // 99.9th percentile of chi-square with 4 degrees of freedom
    assert!(chi2 < 18.467, "chi2 = {chi2}, observed {observed:?}");
}

fn small_experiment() -> ExperimentConfig {
    ExperimentConfig {
        dataset: SyntheticDatasetSpec {
            num_labels: 4,
            samples_per_label_train: 60,
            samples_per_label_test: 30,
            feature_dim: 4,
            cluster_spread: 1.0,
            label_overlap: 0.2,
            modes_per_label: 2,
            seed: 3,
        },
        search_space: SearchSpaceSpec { epochs: 4, batch_size: 16, ..Default::default() },
        ratios: vec![1.0],
        methods: vec![Method::Ours, Method::Random],
        seeds: vec![1, 2],
        proxy: Default::default(),
    }
}

#[test]
fn full_ratio_reproduces_original_tables() {
    let report = run_experiment(&small_experiment()).unwrap();
    for t in &report.trials {
        assert_eq!(t.runs.len(), 2);
        for r in &t.runs {
            assert_eq!(r.accuracies.accuracies(), t.original.accuracies());
            assert_eq!(r.report.flipped_pair_count, 0);
        }
    }
}

#[test]
fn twelve_configs_five_seeds_shape() {
    let mut cfg = small_experiment();
    cfg.ratios = vec![0.1];
    cfg.seeds = vec![1, 2, 3, 4, 5];
    let report = run_experiment(&cfg).unwrap();
    assert_eq!(report.trials.len(), 5);
    let runs: Vec<_> = report.trials.iter().flat_map(|t| &t.runs).collect();
    assert_eq!(runs.len(), 10);
    for r in runs {
        assert_eq!(r.accuracies.len(), 12);
        assert_eq!(r.proxy_size, 24);
        assert!(r.report.pearson.is_some() && r.report.spearman.is_some());
    }
    assert_eq!(report.summaries().len(), 2);
    // Same config, same numbers.
    assert_eq!(run_experiment(&cfg).unwrap(), report);
}
