//! Feature vectors, PCA and nearest-neighbor importance transfer.

mod neighbors;
mod pca;

pub use neighbors::{build_nn_index, Metric, Neighbor, NnIndex};
pub use pca::{default_target_dim, fit_pca, project, PcaModel, DEFAULT_MAX_PCA_DIM};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::importance::ImportanceTable;
use crate::sample::{SampleId, Split};

/// Dense, row-major feature matrix with one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    sample_ids: Vec<SampleId>,
    dim: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(sample_ids: Vec<SampleId>, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DegenerateInput("feature dimension must be positive".into()));
        }
        if data.len() != sample_ids.len() * dim {
            return Err(Error::DegenerateInput(format!(
                "{} values do not form {} rows of dimension {dim}",
                data.len(),
                sample_ids.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::DegenerateInput(format!(
                "non-finite feature value in row `{}`",
                sample_ids[pos / dim]
            )));
        }
        Ok(Self { sample_ids, dim, data })
    }

    pub fn from_rows(sample_ids: Vec<SampleId>, rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::DimMismatch { expected: dim, found: rows[bad].len() });
        }
        Self::new(sample_ids, dim, rows.concat())
    }

    pub fn sample_ids(&self) -> &[SampleId] {
        &self.sample_ids
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    /// Stacks the rows of `self` on top of `other`.
    pub fn concat(&self, other: &FeatureMatrix) -> Result<FeatureMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: other.dim });
        }
        let mut ids = self.sample_ids.clone();
        ids.extend_from_slice(&other.sample_ids);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FeatureMatrix { sample_ids: ids, dim: self.dim, data })
    }

    /// Checks that the rows are exactly `expected`, in order.
    pub fn ensure_ids(&self, expected: &[SampleId]) -> Result<()> {
        if self.sample_ids.len() != expected.len() {
            return Err(Error::DegenerateInput(format!(
                "feature matrix has {} rows, expected {}",
                self.sample_ids.len(),
                expected.len()
            )));
        }
        if let Some((got, want)) = self.sample_ids.iter().zip(expected).find(|(got, want)| got != want) {
            return Err(Error::DegenerateInput(format!(
                "feature row `{got}` found where `{want}` was expected"
            )));
        }
        Ok(())
    }
}

/// Importance transferred onto the training split, with the neighbor each
/// training sample took its value from.
#[derive(Debug, Clone, PartialEq)]
pub struct Transfer {
    pub importance: ImportanceTable,
    pub nearest: Vec<Neighbor>,
}

/// Gives every training sample the importance of its nearest test sample.
pub fn transfer_importance(
    train_features: &FeatureMatrix,
    index: &NnIndex,
    test_importance: &ImportanceTable,
) -> Result<ImportanceTable> {
    transfer_with_neighbors(train_features, index, test_importance).map(|t| t.importance)
}

pub fn transfer_with_neighbors(
    train_features: &FeatureMatrix,
    index: &NnIndex,
    test_importance: &ImportanceTable,
) -> Result<Transfer> {
    let lookup = test_importance.value_map();
    let reference_values = index
        .reference_ids()
        .iter()
        .map(|id| lookup.get(id).copied().ok_or_else(|| Error::MissingImportance(id.to_string())))
        .collect::<Result<Vec<f64>>>()?;
    let nearest = index.nearest_batch(train_features)?;
    let values = nearest.par_iter().map(|n| reference_values[n.position]).collect();
    let importance = ImportanceTable::new(Split::Train, train_features.sample_ids().to_vec(), values)?;
    Ok(Transfer { importance, nearest })
}
