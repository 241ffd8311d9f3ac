//! Fitting PCA on stacked features and carrying test-sample importance to
//! training samples through their nearest neighbours.
//!
//! Run with `cargo run --example pca_and_neighbors`.

use dataproxy::features::{build_nn_index, fit_pca, project, transfer_with_neighbors, FeatureMatrix, Metric};
use dataproxy::{ImportanceTable, SampleId, Split};

fn ids(prefix: &str, n: usize) -> Vec<SampleId> {
    (0..n).map(|i| SampleId::new(format!("{prefix}{i}")).expect("valid id")).collect()
}

fn main() -> dataproxy::Result<()> {
    let train_rows = vec![
        vec![0.1, 0.0, 5.0],
        vec![0.9, 1.1, 5.2],
        vec![4.8, 5.1, 4.9],
        vec![5.2, 4.9, 5.1],
        vec![0.0, 5.0, 5.0],
    ];
    let test_rows = vec![vec![0.0, 0.0, 5.0], vec![5.0, 5.0, 5.0], vec![0.2, 4.8, 5.0]];
    let train = FeatureMatrix::from_rows(ids("tr", train_rows.len()), &train_rows)?;
    let test = FeatureMatrix::from_rows(ids("te", test_rows.len()), &test_rows)?;

    let pca = fit_pca(&train.concat(&test)?, 2)?;
    println!("explained variance: {:?}", pca.explained_variance());
    for k in 0..pca.output_dim() {
        println!("component {k}: {:?}", pca.component(k));
    }

    let test_importance = ImportanceTable::new(Split::Test, test.sample_ids().to_vec(), vec![6.0, 1.0, 2.0])?;
    for metric in [Metric::Euclidean, Metric::Cosine] {
        let index = build_nn_index(&project(&pca, &test)?, metric)?;
        let transfer = transfer_with_neighbors(&project(&pca, &train)?, &index, &test_importance)?;
        println!("\n{metric:?}");
        for ((id, n), v) in train.sample_ids().iter().zip(&transfer.nearest).zip(transfer.importance.values())
        {
            println!(
                "{id} -> {} (distance {:.3}) importance {v}",
                index.reference_ids()[n.position],
                n.distance
            );
        }
    }
    Ok(())
}
