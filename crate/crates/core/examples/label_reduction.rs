//! Dropping the least important labels before or after resampling.
//!
//! Run with `cargo run --example label_reduction`.

use dataproxy::resample::{aggregate_label_importance, reduce_labels, Aggregation};
use dataproxy::{
    generate_proxy, normalize_keep_prob, DatasetManifest, ImportanceTable, LabelStage, ProxySpec, SampleId,
    Split,
};

fn main() -> dataproxy::Result<()> {
    let labels = 5u32;
    let per_label = 20;
    let mut train = Vec::new();
    let mut values = Vec::new();
    for label in 0..labels {
        for i in 0..per_label {
            train.push((SampleId::new(format!("l{label}-{i}"))?, label));
            values.push(1.0 + f64::from(label) + if i % 4 == 0 { 4.0 } else { 0.0 });
        }
    }
    let test = vec![(SampleId::new("t0")?, 0)];
    let manifest = DatasetManifest::new(train, test, labels)?;
    let table =
        normalize_keep_prob(ImportanceTable::new(Split::Train, manifest.train_ids().to_vec(), values)?)?;

    let label_importance = aggregate_label_importance(&table, &manifest, Aggregation::Sum)?;
    println!("label importance (sum): {label_importance:?}");
    let kept = reduce_labels(&label_importance, &vec![per_label; labels as usize], 0.5)?;
    println!("labels kept at 50%: {kept:?}");

    for stage in ["sample-first:0.5", "label-first:0.5", "label-first:0.5:mean"] {
        let mut spec = ProxySpec::new(0.2, 3);
        spec.label_stage = Some(stage.parse::<LabelStage>()?);
        let sel = generate_proxy(&manifest, &table, &spec)?;
        println!("{stage:<22} {} samples from labels {:?}", sel.len(), sel.kept_labels);
    }
    Ok(())
}
