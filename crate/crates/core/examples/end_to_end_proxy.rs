//! The whole procedure on files: train two probe classifiers on synthetic
//! data, export their outcomes and features, and build a 10% proxy.
//!
//! Run with `cargo run --release --example end_to_end_proxy`.

use dataproxy::commands::{cmd_gen, export_probe_artifacts, PipelineConfig, PROVENANCE_FILE};
use dataproxy::harness::{SearchSpaceSpec, SyntheticDatasetSpec};
use dataproxy::{ProxyOptions, ProxySpec};

fn main() -> dataproxy::Result<()> {
    let dir =
        tempfile::tempdir().map_err(|e| dataproxy::Error::Io { path: std::env::temp_dir(), source: e })?;
    let dataset = SyntheticDatasetSpec {
        samples_per_label_train: 200,
        samples_per_label_test: 50,
        ..Default::default()
    };
    let paths = export_probe_artifacts(&dataset, &SearchSpaceSpec::default(), 1, dir.path())?;
    println!(
        "exported {}, {}, {}, {}",
        paths.manifest.display(),
        paths.outcomes.display(),
        paths.train_features.display(),
        paths.test_features.display()
    );

    let config = PipelineConfig {
        manifest: paths.manifest,
        outcomes: paths.outcomes,
        train_features: paths.train_features,
        test_features: paths.test_features,
        options: ProxyOptions::new(ProxySpec::new(0.1, 42)),
        out_dir: dir.path().join("proxy"),
    };
    let (artifacts, selection) = cmd_gen(&config)?;
    let [c1, c2, c3, c4] = artifacts.case_counts();
    println!(
        "test cases: {c1} both right, {c2} both wrong, {c3} better probe right, {c4} better probe wrong"
    );
    println!("pca: {} -> {} dims", artifacts.pca.input_dim(), artifacts.pca.output_dim());
    println!("selected {} of {} training samples", selection.len(), artifacts.train_importance.len());
    let provenance = std::fs::read_to_string(config.out_dir.join(PROVENANCE_FILE))
        .map_err(|e| dataproxy::Error::Io { path: config.out_dir.clone(), source: e })?;
    println!("{provenance}");
    Ok(())
}
