//! Normalising importance into keep probabilities and drawing a proxy of
//! exact size, compared with a uniform draw.
//!
//! Run with `cargo run --example weighted_resampling`.

use dataproxy::resample::sample_proxy;
use dataproxy::{normalize_keep_prob, uniform_proxy, DatasetManifest, ImportanceTable, SampleId, Split};

fn main() -> dataproxy::Result<()> {
    let n: usize = 40;
    let ids: Vec<SampleId> = (0..n).map(|i| SampleId::new(format!("s{i:02}"))).collect::<Result<_, _>>()?;
    // The first ten samples are Case3 (importance 6), the rest Case1 or Case2.
    let values: Vec<f64> = (0..n)
        .map(|i| {
            if i < 10 {
                6.0
            } else if i.is_multiple_of(2) {
                2.0
            } else {
                1.0
            }
        })
        .collect();
    let table = normalize_keep_prob(ImportanceTable::new(Split::Train, ids.clone(), values)?)?;
    let probs = table.keep_prob().expect("normalized");
    println!(
        "keep_prob of s00 {:.4}, s10 {:.4}, s11 {:.4}; sum {:.12}",
        probs[0],
        probs[10],
        probs[11],
        probs.iter().sum::<f64>()
    );

    let mut hits = [0usize; 3];
    for seed in 0..2000 {
        for id in sample_proxy(&table, 8, seed)? {
            let i: usize = id.as_str()[1..].parse().expect("numeric suffix");
            hits[if i < 10 {
                0
            } else if i.is_multiple_of(2) {
                1
            } else {
                2
            }] += 1;
        }
    }
    let draws = 2000.0 * 8.0;
    println!(
        "share of draws: importance-6 {:.3}, importance-2 {:.3}, importance-1 {:.3}",
        hits[0] as f64 / draws,
        hits[1] as f64 / draws,
        hits[2] as f64 / draws
    );

    let manifest =
        DatasetManifest::new(ids.into_iter().map(|id| (id, 0)).collect(), vec![(SampleId::new("t")?, 0)], 1)?;
    let uniform = uniform_proxy(&manifest, 0.2, 7)?;
    println!(
        "uniform 20% proxy: {:?}",
        uniform.kept_train_ids.iter().map(|s| s.as_str()).collect::<Vec<_>>()
    );
    Ok(())
}
