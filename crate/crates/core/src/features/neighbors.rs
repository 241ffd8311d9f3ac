use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FeatureMatrix;
use crate::error::{Error, Result};
use crate::sample::SampleId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
    /// `1 − cos θ`; a zero vector is at distance 1 from everything.
    Cosine,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "cosine" => Ok(Metric::Cosine),
            other => {
                Err(Error::InvalidSpec(format!("unknown metric `{other}` (expected euclidean or cosine)")))
            }
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Euclidean => "euclidean",
            Metric::Cosine => "cosine",
        })
    }
}

/// Result of a nearest-neighbor query: position in the reference order and
/// the metric distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub position: usize,
    pub distance: f64,
}

/// Exact nearest-neighbor index over the test-side reference points.
///
/// Queries are answered by a linear scan; ties go to the earliest reference.
#[derive(Debug, Clone)]
pub struct NnIndex {
    points: FeatureMatrix,
    norms: Vec<f64>,
    metric: Metric,
}

pub fn build_nn_index(test_features: &FeatureMatrix, metric: Metric) -> Result<NnIndex> {
    if test_features.rows() == 0 {
        return Err(Error::EmptyReferenceSet);
    }
    let norms = test_features.iter_rows().map(norm).collect();
    Ok(NnIndex { points: test_features.clone(), norms, metric })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl NnIndex {
    pub fn reference_ids(&self) -> &[SampleId] {
        self.points.sample_ids()
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn len(&self) -> usize {
        self.points.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.rows() == 0
    }

    /// Nearest reference id and its distance.
    pub fn nearest_test_sample(&self, query: &[f64]) -> Result<(&SampleId, f64)> {
        let n = self.nearest(query)?;
        Ok((&self.reference_ids()[n.position], n.distance))
    }

    pub fn nearest(&self, query: &[f64]) -> Result<Neighbor> {
        if query.len() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), found: query.len() });
        }
        Ok(match self.metric {
            Metric::Euclidean => {
                let (position, sq) =
                    self.scan(|_, p| p.iter().zip(query).map(|(a, b)| (a - b) * (a - b)).sum());
                Neighbor { position, distance: sq.sqrt() }
            }
            Metric::Cosine => {
                let qn = norm(query);
                let (position, distance) = self.scan(|i, p| {
                    let denom = qn * self.norms[i];
                    if denom == 0.0 {
                        1.0
                    } else {
                        1.0 - p.iter().zip(query).map(|(a, b)| a * b).sum::<f64>() / denom
                    }
                });
                Neighbor { position, distance }
            }
        })
    }

    fn scan(&self, mut dist: impl FnMut(usize, &[f64]) -> f64) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, p) in self.points.iter_rows().enumerate() {
            let d = dist(i, p);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// Nearest neighbor of every row of `queries`, in row order. Runs in
    /// parallel; the result is identical to querying row by row.
    pub fn nearest_batch(&self, queries: &FeatureMatrix) -> Result<Vec<Neighbor>> {
        if queries.dim() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), found: queries.dim() });
        }
        queries.data().par_chunks_exact(self.dim()).map(|q| self.nearest(q)).collect()
    }
}
