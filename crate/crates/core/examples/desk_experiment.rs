//! Importance-driven proxies against uniform ones on the synthetic
//! benchmark: every configuration of the search space is retrained on each
//! proxy and its ranking compared with full-data training.
//!
//! Run with `cargo run --release --example desk_experiment -- [seeds]`;
//! the default is three seeds of the bundled configuration.

use dataproxy::formats::render_experiment_summary;
use dataproxy::harness::{run_experiment, ExperimentConfig};

fn main() -> dataproxy::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let config =
        ExperimentConfig { seeds: (1..=seeds).collect(), ratios: vec![0.05, 0.1], ..Default::default() };
    let report = run_experiment(&config)?;
    print!("{}", render_experiment_summary(&report));
    for trial in &report.trials {
        let runs: Vec<String> = trial
            .runs
            .iter()
            .map(|r| format!("{}@{}: {:.3}", r.method, r.ratio, r.report.spearman.unwrap_or(f64::NAN)))
            .collect();
        println!("seed {}: {}", trial.seed, runs.join(", "));
    }
    Ok(())
}
