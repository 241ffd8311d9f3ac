//! Importance-driven data proxies for architecture and hyperparameter
//! search.
//!
//! Two boundary configurations of a search space (a weak "lower" probe and
//! a strong "upper" probe) are evaluated on a held-out test split. Their
//! agreement on every test sample yields an importance value, which is
//! carried over to training samples through nearest neighbours in a
//! reduced feature space. A proxy of the training set is then drawn in
//! proportion to importance, and proxies are judged by how well the
//! ranking of configurations trained on them agrees with full-data
//! training.
//!
//! The crate is organised bottom-up:
//!
//! * [`sample`] identifiers and the dataset manifest;
//! * [`importance`] the four-case classification and importance tables;
//! * [`features`] PCA and exact nearest-neighbour transfer;
//! * [`resample`] weighted sampling and the optional label stage;
//! * [`pipeline`] all of the above end to end;
//! * [`ranking`] agreement matrices, correlation and best-config checks;
//! * [`harness`] a synthetic stand-in for real training runs;
//! * [`formats`] on-disk artifacts;
//! * [`commands`] the operations behind the `dataproxy` binary.

pub mod commands;
pub mod error;
pub mod features;
pub mod formats;
pub mod harness;
pub mod importance;
pub mod pipeline;
pub mod ranking;
pub mod resample;
pub mod sample;

pub use error::{Error, Result};
pub use importance::{
    assign_test_importance, classify_case, classify_outcomes, normalize_keep_prob, CaseLabel,
    ImportanceConstants, ImportanceTable, ProbeOutcomeSet,
};
pub use pipeline::{generate_data_proxy, ProxyArtifacts, ProxyOptions};
pub use resample::{generate_proxy, uniform_proxy, LabelStage, ProxySelection, ProxySpec};
pub use sample::{DatasetManifest, SampleId, Split};
