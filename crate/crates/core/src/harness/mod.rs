//! Desk-scale stand-in for real probe networks: synthetic data, a family
//! of small classifiers spanning a capacity range, and the experiment that
//! compares importance-driven proxies with uniform ones.

mod classifier;
mod dataset;
mod experiment;

pub use classifier::{train_classifier, ClassifierConfig, Gradients, Mlp, TrainedClassifier};
pub use dataset::{generate_dataset, LabeledData, SyntheticDataset, SyntheticDatasetSpec};
pub use experiment::{
    mix_seed, run_experiment, ExperimentConfig, ExperimentReport, Method, MethodSummary, ProxyParams,
    ProxyRun, SearchSpace, SearchSpaceSpec, TrialReport,
};

use crate::error::Result;
use crate::importance::ProbeOutcomeSet;

/// Correctness of both probes on every test sample of `dataset`.
pub fn evaluate_probes(
    lower: &TrainedClassifier,
    upper: &TrainedClassifier,
    dataset: &SyntheticDataset,
) -> Result<ProbeOutcomeSet> {
    let lower_id = lower.config.config_id.clone();
    let upper_id = upper.config.config_id.clone();
    ProbeOutcomeSet::from_flags(
        vec![lower_id.clone(), upper_id.clone()],
        &lower_id,
        &upper_id,
        dataset.manifest.test_ids().to_vec(),
        vec![lower.correctness(&dataset.test), upper.correctness(&dataset.test)],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::importance::{classify_outcomes, CaseLabel};

    fn small() -> SyntheticDataset {
        generate_dataset(&SyntheticDatasetSpec {
            num_labels: 4,
            samples_per_label_train: 40,
            samples_per_label_test: 20,
            feature_dim: 4,
            cluster_spread: 1.0,
            label_overlap: 0.6,
            modes_per_label: 2,
            seed: 8,
        })
        .unwrap()
    }

    fn config(id: &str, width: usize) -> ClassifierConfig {
        ClassifierConfig {
            config_id: id.into(),
            hidden_width: width,
            epochs: 5,
            learning_rate: 0.1,
            batch_size: 16,
            seed: 1,
        }
    }

    #[test]
    fn identical_probes_never_disagree() {
        let ds = small();
        let a = train_classifier(&config("a", 8), &ds.train).unwrap();
        let mut b = a.clone();
        b.config.config_id = "b".into();
        let o = evaluate_probes(&a, &b, &ds).unwrap();
        assert!(classify_outcomes(&o).iter().all(|c| matches!(c, CaseLabel::Case1 | CaseLabel::Case2)));
    }

    #[test]
    fn accuracies_are_flag_means() {
        let ds = small();
        let lo = train_classifier(&config("lo", 0), &ds.train).unwrap();
        let hi = train_classifier(&config("hi", 16), &ds.train).unwrap();
        let o = evaluate_probes(&lo, &hi, &ds).unwrap();
        assert_eq!(o.lower_id(), "lo");
        assert!((o.accuracy_of(0) - lo.accuracy(&ds.test)).abs() < 1e-12);
        assert!((o.accuracy_of(1) - hi.accuracy(&ds.test)).abs() < 1e-12);
    }
}
