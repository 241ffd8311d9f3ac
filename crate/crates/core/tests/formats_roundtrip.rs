mod common;

use std::collections::{BTreeMap, BTreeSet};

use dataproxy::features::FeatureMatrix;
use dataproxy::formats::*;
use dataproxy::ranking::{AccuracyTable, ConfigAccuracy};
use dataproxy::resample::{Provenance, ProxySelection};
use dataproxy::{
    DatasetManifest, Error, ImportanceTable, LabelStage, ProbeOutcomeSet, ProxySpec, SampleId, Split,
};
use proptest::prelude::*;

fn id_strategy() -> impl Strategy<Value = String> {
    "[A-Za-z0-9_.:/-]{1,12}"
}

fn unique_ids(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<SampleId>> {
    proptest::collection::btree_set(id_strategy(), n)
        .prop_map(|s| s.into_iter().map(|v| SampleId::new(v).unwrap()).collect())
}

fn manifest_strategy() -> impl Strategy<Value = DatasetManifest> {
    (1u32..6, unique_ids(2..40), any::<u64>()).prop_map(|(labels, ids, seed)| {
        let split_at = 1 + (seed as usize % (ids.len() - 1));
        let (train, test) = ids.split_at(split_at);
        let train: Vec<(SampleId, u32)> = train
            .iter()
            .enumerate()
            .map(|(i, id)| {
                (id.clone(), if (i as u32) < labels { i as u32 } else { (seed >> (i % 32)) as u32 % labels })
            })
            .collect();
        let labels = labels.min(train.len() as u32);
        let train = train.into_iter().map(|(id, l)| (id, l % labels)).collect();
        let test = test.iter().enumerate().map(|(i, id)| (id.clone(), i as u32 % labels)).collect();
        DatasetManifest::new(train, test, labels).unwrap()
    })
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6f64..1e6, Just(0.0), Just(-0.0), Just(1e-300), Just(f64::MAX)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn manifest_round_trips(m in manifest_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.jsonl");
        write_manifest(&p, &m).unwrap();
        prop_assert_eq!(read_manifest(&p).unwrap(), m);
    }

    #[test]
    fn outcomes_round_trip(m in manifest_strategy(), seed in any::<u64>(), extra in any::<bool>()) {
        let n = m.test_ids().len();
        let flags = |s: u64| (0..n).map(|i| (s.rotate_left(i as u32 % 64) ^ i as u64) & 1 == 1).collect::<Vec<bool>>();
        let mut probes = vec!["lo".to_string(), "hi".to_string()];
        let mut correct = vec![flags(seed), flags(!seed)];
        if extra {
            probes.push("mid".into());
            correct.push(flags(seed.wrapping_mul(31)));
        }
        let o = ProbeOutcomeSet::from_flags(probes, "lo", "hi", m.test_ids().to_vec(), correct).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("o.tsv");
        write_outcomes(&p, &o).unwrap();
        prop_assert_eq!(read_outcomes(&p, &m).unwrap(), o);
    }

    #[test]
    fn features_round_trip(ids in unique_ids(1..20), dim in 1usize..6, seed in any::<u32>()) {
        let data: Vec<f64> = (0..ids.len() * dim)
            .map(|i| f64::from(((seed as usize).wrapping_mul(i + 7) % 20011) as f32 / 77.0 - 100.0))
            .collect();
        let fm = FeatureMatrix::new(ids, dim, data).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let (b, t) = (dir.path().join("f.bin"), dir.path().join("f.tsv"));
        write_features_binary(&b, &fm).unwrap();
        write_features_text(&t, &fm).unwrap();
        prop_assert_eq!(&read_features(&b).unwrap(), &fm);
        prop_assert_eq!(&read_features(&t).unwrap(), &fm);
    }

    #[test]
    fn text_features_keep_full_precision(ids in unique_ids(1..10), vals in proptest::collection::vec(finite(), 30)) {
        let dim = 3;
        let n = ids.len().min(10);
        let fm = FeatureMatrix::new(ids[..n].to_vec(), dim, vals[..n * dim].to_vec()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let t = dir.path().join("f.tsv");
        write_features_text(&t, &fm).unwrap();
        prop_assert_eq!(read_features(&t).unwrap(), fm);
    }

    #[test]
    fn importance_round_trips(ids in unique_ids(1..30), seed in any::<u64>(), normalized in any::<bool>()) {
        let values: Vec<f64> = (0..ids.len()).map(|i| [2.0, 1.0, 6.0, 1.0, 0.0][(seed as usize + i * 3) % 5] + 0.125).collect();
        let mut table = ImportanceTable::new(Split::Train, ids, values).unwrap();
        if normalized {
            table = dataproxy::normalize_keep_prob(table).unwrap();
        }
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("i.tsv");
        write_importance(&p, &table).unwrap();
        prop_assert_eq!(read_importance(&p).unwrap(), table);
    }

    #[test]
    fn selection_round_trips(
        ids in unique_ids(0..30),
        labels in proptest::collection::btree_set(0u32..100, 0..5),
        ratio in 0.001f64..1.0,
        seed in any::<u64>(),
        staged in any::<bool>(),
    ) {
        let mut spec = ProxySpec::new(ratio, seed);
        if staged {
            spec.label_stage = Some(LabelStage { intermediate_ratio: (ratio * 1.7).min(1.0), ..("sample-first:1".parse().unwrap()) });
        }
        let sel = ProxySelection {
            kept_train_ids: ids,
            kept_labels: labels,
            provenance: Provenance {
                method: "importance".into(),
                spec,
                inputs: BTreeMap::from([("manifest".to_string(), "ab".repeat(32))]),
            },
        };
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.txt");
        write_selection(&p, &sel).unwrap();
        prop_assert_eq!(read_selection(&p).unwrap(), sel);
    }

    #[test]
    fn accuracy_tables_round_trip(
        n in 1usize..15,
        variants in proptest::collection::btree_set("[a-z0-9%() ]{1,12}", 1..4),
        seed in any::<u64>(),
    ) {
        let tables: Vec<AccuracyTable> = variants
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let entries = (0..n)
                    .map(|i| ConfigAccuracy {
                        config_id: format!("c{i}"),
                        params: BTreeMap::from([("width".to_string(), (i * 4).to_string()), ("lr".to_string(), "0.1".to_string())]),
                        accuracy: ((seed.wrapping_add((i * 13 + k) as u64) % 10_000) as f64) / 10_000.0,
                    })
                    .collect();
                AccuracyTable::new(v.clone(), entries).unwrap()
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.tsv");
        write_accuracy_tables(&p, &tables).unwrap();
        prop_assert_eq!(read_accuracy_tables(&p).unwrap(), tables);
    }
}

#[test]
fn missing_outcome_names_the_id() {
    let m = DatasetManifest::new(
        vec![(SampleId::new("a").unwrap(), 0)],
        vec![(SampleId::new("t0").unwrap(), 0), (SampleId::new("t1").unwrap(), 0)],
        1,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("o.tsv");
    std::fs::write(
        &p,
        "#format\tdataproxy-outcomes\t1\n#probe\tlo\tlower\t1\n#probe\thi\tupper\t1\nid\tlo\thi\nt0\t1\t1\n",
    )
    .unwrap();
    match read_outcomes(&p, &m) {
        Err(Error::MissingOutcome { file, id }) => {
            assert_eq!(id, "t1");
            assert_eq!(file, p);
        }
        other => panic!("expected MissingOutcome, got {other:?}"),
    }
}

#[test]
fn outcome_accuracy_must_match_flags() {
    let m = DatasetManifest::new(
        vec![(SampleId::new("a").unwrap(), 0)],
        vec![(SampleId::new("t0").unwrap(), 0)],
        1,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("o.tsv");
    std::fs::write(&p, "#format\tdataproxy-outcomes\t1\n#probe\tlo\tlower\t0.5\n#probe\thi\tupper\t1\nid\tlo\thi\nt0\t1\t1\n").unwrap();
    assert!(matches!(read_outcomes(&p, &m), Err(Error::Validation { ref field, .. }) if field == "accuracy"));
}

#[test]
fn readers_refuse_other_versions() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("a.tsv");
    std::fs::write(&p, "#format\tdataproxy-accuracy\t2\nconfig_id\taccuracy\na\t0.5\n").unwrap();
    assert!(matches!(read_accuracy_tables(&p), Err(Error::VersionMismatch { .. })));
    let mut bin = FEATURES_MAGIC.to_vec();
    bin.extend_from_slice(&7u32.to_le_bytes());
    std::fs::write(&p, bin).unwrap();
    assert!(matches!(read_features(&p), Err(Error::VersionMismatch { .. })));
}

#[test]
fn unknown_ids_are_rejected() {
    assert!(SampleId::new("has space").is_err());
    let bad: Result<SampleId, _> = serde_json::from_str("\"a b\"");
    assert!(bad.is_err());
    let _unused: BTreeSet<u32> = BTreeSet::new();
}
