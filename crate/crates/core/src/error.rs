use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("test split is empty")]
    EmptyTestSet,

    #[error("all importance values are zero")]
    ZeroTotalImportance,

    #[error("invalid importance constants: {0}")]
    InvalidConstants(String),

    #[error("invalid manifest: {0}")]
    InvalidManifest(String),

    #[error("invalid probe outcomes: {0}")]
    InvalidOutcomes(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("nearest-neighbor index has no reference points")]
    EmptyReferenceSet,

    #[error("no test importance recorded for reference sample `{0}`")]
    MissingImportance(String),

    #[error("cannot draw {requested} samples: only {available} have positive weight")]
    InsufficientSupport { requested: usize, available: usize },

    #[error("invalid proxy spec: {0}")]
    InvalidSpec(String),

    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),

    #[error("zero variance: {0}")]
    ZeroVariance(String),

    #[error("non-finite loss while training `{config}` at epoch {epoch}")]
    NonFiniteLoss { config: String, epoch: usize },

    #[error("{file}: no outcome recorded for test sample `{id}`")]
    MissingOutcome { file: PathBuf, id: String },

    #[error("{file}: field `{field}`: {message}")]
    Validation { file: PathBuf, field: String, message: String },

    #[error("{file}: unsupported format version {found} (expected {expected})")]
    VersionMismatch { file: PathBuf, expected: u32, found: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable, machine-readable name of the error kind, printed by the CLI.
    pub fn category(&self) -> &'static str {
        match self {
            Error::EmptyTestSet => "empty_test_set",
            Error::ZeroTotalImportance => "zero_total_importance",
            Error::InvalidConstants(_) => "invalid_constants",
            Error::InvalidManifest(_) => "invalid_manifest",
            Error::InvalidOutcomes(_) => "invalid_outcomes",
            Error::DegenerateInput(_) => "degenerate_input",
            Error::DimMismatch { .. } => "dim_mismatch",
            Error::EmptyReferenceSet => "empty_reference_set",
            Error::MissingImportance(_) => "missing_importance",
            Error::InsufficientSupport { .. } => "insufficient_support",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::ConfigMismatch(_) => "config_mismatch",
            Error::ZeroVariance(_) => "zero_variance",
            Error::NonFiniteLoss { .. } => "non_finite_loss",
            Error::MissingOutcome { .. } => "missing_outcome",
            Error::Validation { .. } => "validation",
            Error::VersionMismatch { .. } => "version_mismatch",
            Error::Io { .. } => "io",
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Io { .. } => 3,
            Error::NonFiniteLoss { .. } => 4,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
