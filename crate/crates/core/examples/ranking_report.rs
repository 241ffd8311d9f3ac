//! Comparing accuracy tables: correlations, flipped pairs and whether the
//! best configuration survives. Uses the bundled accuracy fixtures.
//!
//! Run with `cargo run --example ranking_report`.

use std::path::Path;

use dataproxy::formats::read_accuracy_tables;
use dataproxy::ranking::{correlation_score, ranking_report, CorrelationMethod};

fn main() -> dataproxy::Result<()> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for name in ["resnet20_cifar10.tsv", "resnet20_cifar100.tsv", "efficientnet_b0_cifar10.tsv"] {
        let mut tables = read_accuracy_tables(&fixtures.join(name))?;
        let reference = tables.remove(0);
        println!("{name}");
        for candidate in &tables {
            let report = ranking_report(&reference, candidate)?;
            let spearman = correlation_score(&reference, candidate, CorrelationMethod::Spearman)?;
            println!("  {report}");
            println!(
                "    spearman {spearman:.4}, kendall tau-a {:.4}, tied pairs {}",
                report.kendall_tau_a.unwrap_or(f64::NAN),
                report.tied_pair_count
            );
        }
    }
    Ok(())
}
