//! The data-proxy procedure end to end, from probe outcomes and features to
//! a selection.
//!
//! 1. classify every test sample by probe agreement and assign importance;
//! 2. fit PCA on the stacked train and test features;
//! 3. index the projected test rows and give every training sample the
//!    importance of its nearest test sample;
//! 4. normalize into keep probabilities and resample.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{
    build_nn_index, default_target_dim, fit_pca, project, transfer_with_neighbors, FeatureMatrix, Metric,
    Neighbor, PcaModel,
};
use crate::importance::{
    assign_test_importance, classify_outcomes, normalize_keep_prob, CaseLabel, ImportanceTable,
    ProbeOutcomeSet,
};
use crate::resample::{generate_proxy, ProxySelection, ProxySpec};
use crate::sample::DatasetManifest;

/// Spec plus the feature-space knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxyOptions {
    pub spec: ProxySpec,
    pub metric: Metric,
    /// Number of principal components; `None` picks `min(64, dim, rows)`.
    pub pca_dim: Option<usize>,
}

impl ProxyOptions {
    pub fn new(spec: ProxySpec) -> Self {
        Self { spec, metric: Metric::default(), pca_dim: None }
    }
}

/// Every intermediate product of one proxy generation.
#[derive(Debug, Clone)]
pub struct ProxyArtifacts {
    pub cases: Vec<CaseLabel>,
    pub test_importance: ImportanceTable,
    pub pca: PcaModel,
    pub nearest: Vec<Neighbor>,
    /// Transferred importance with keep probabilities populated.
    pub train_importance: ImportanceTable,
    pub selection: ProxySelection,
}

impl ProxyArtifacts {
    /// Number of test samples in each case, `[case1, case2, case3, case4]`.
    pub fn case_counts(&self) -> [usize; 4] {
        let mut counts = [0; 4];
        for c in &self.cases {
            counts[c.index()] += 1;
        }
        counts
    }
}

pub fn generate_data_proxy(
    manifest: &DatasetManifest,
    outcomes: &ProbeOutcomeSet,
    train_features: &FeatureMatrix,
    test_features: &FeatureMatrix,
    options: &ProxyOptions,
) -> Result<ProxyArtifacts> {
    options.spec.validate()?;
    if outcomes.test_ids() != manifest.test_ids() {
        return Err(Error::InvalidOutcomes(
            "probe outcomes must list the manifest's test ids in order".into(),
        ));
    }
    train_features.ensure_ids(manifest.train_ids())?;
    test_features.ensure_ids(manifest.test_ids())?;
    if train_features.dim() != test_features.dim() {
        return Err(Error::DimMismatch { expected: test_features.dim(), found: train_features.dim() });
    }

    let cases = classify_outcomes(outcomes);
    let test_importance = assign_test_importance(outcomes, &options.spec.constants)?;

    let stacked = train_features.concat(test_features)?;
    let dim = options.pca_dim.unwrap_or_else(|| default_target_dim(&stacked));
    let pca = fit_pca(&stacked, dim)?;
    let index = build_nn_index(&project(&pca, test_features)?, options.metric)?;
    let transfer = transfer_with_neighbors(&project(&pca, train_features)?, &index, &test_importance)?;

    let train_importance = normalize_keep_prob(transfer.importance)?;
    let selection = generate_proxy(manifest, &train_importance, &options.spec)?;
    Ok(ProxyArtifacts { cases, test_importance, pca, nearest: transfer.nearest, train_importance, selection })
}
