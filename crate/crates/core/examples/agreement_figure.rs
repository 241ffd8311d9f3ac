//! Rendering the pairwise agreement heatmap as SVG and as a text grid.
//!
//! Run with `cargo run --example agreement_figure -- [output-dir]`; the
//! default output directory is `target/agreement_figure`.

use std::path::{Path, PathBuf};

use dataproxy::commands::cmd_figure;

fn main() -> dataproxy::Result<()> {
    let out_dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../target/agreement_figure"));
    let table = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/resnet20_cifar10.tsv");
    for candidate in ["5% (random)", "5% (ours)"] {
        let stem = out_dir.join(dataproxy::commands::variant_slug(candidate));
        let flipped = cmd_figure(&table, Some(candidate), &[], &stem)?;
        println!("{candidate}: {flipped} flipped cells -> {}.svg", stem.display());
        print!(
            "{}",
            std::fs::read_to_string(stem.with_extension("txt"))
                .map_err(|e| dataproxy::Error::Io { path: stem.clone(), source: e })?
        );
    }
    Ok(())
}
