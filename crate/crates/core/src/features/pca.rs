use nalgebra::{DMatrix, SymmetricEigen};

use super::FeatureMatrix;
use crate::error::{Error, Result};

/// Upper bound on the default number of retained components.
pub const DEFAULT_MAX_PCA_DIM: usize = 64;

/// Principal components of a mean-centered feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    mean: Vec<f64>,
    /// `r × dim`, row-major, one unit-norm component per row.
    components: Vec<f64>,
    explained_variance: Vec<f64>,
    dim: usize,
}

impl PcaModel {
    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn input_dim(&self) -> usize {
        self.dim
    }

    pub fn output_dim(&self) -> usize {
        self.explained_variance.len()
    }

    pub fn component(&self, k: usize) -> &[f64] {
        &self.components[k * self.dim..(k + 1) * self.dim]
    }

    pub fn explained_variance(&self) -> &[f64] {
        &self.explained_variance
    }

    fn project_row(&self, row: &[f64], out: &mut Vec<f64>) {
        for k in 0..self.output_dim() {
            let c = self.component(k);
            out.push(row.iter().zip(&self.mean).zip(c).map(|((x, m), w)| (x - m) * w).sum());
        }
    }

    /// Maps projected rows back into the input space.
    pub fn reconstruct(&self, projected: &FeatureMatrix) -> Result<FeatureMatrix> {
        if projected.dim() != self.output_dim() {
            return Err(Error::DimMismatch { expected: self.output_dim(), found: projected.dim() });
        }
        let mut data = Vec::with_capacity(projected.rows() * self.dim);
        for z in projected.iter_rows() {
            let mut x = self.mean.clone();
            for (k, zk) in z.iter().enumerate() {
                for (xi, ci) in x.iter_mut().zip(self.component(k)) {
                    *xi += zk * ci;
                }
            }
            data.extend(x);
        }
        FeatureMatrix::new(projected.sample_ids().to_vec(), self.dim, data)
    }
}

/// Number of components used when none is requested.
pub fn default_target_dim(features: &FeatureMatrix) -> usize {
    DEFAULT_MAX_PCA_DIM.min(features.dim()).min(features.rows())
}

/// Fits the top `target_dim` principal components by eigendecomposition of
/// the sample covariance (denominator `n - 1`).
///
/// Each component's sign is fixed so that its largest-magnitude coefficient
/// is positive, which makes the model deterministic.
pub fn fit_pca(features: &FeatureMatrix, target_dim: usize) -> Result<PcaModel> {
    let n = features.rows();
    let dim = features.dim();
    if n < 2 {
        return Err(Error::DegenerateInput(format!("PCA needs at least 2 rows, got {n}")));
    }
    if target_dim == 0 || target_dim > dim.min(n) {
        return Err(Error::DegenerateInput(format!(
            "target dimension {target_dim} outside [1, {}]",
            dim.min(n)
        )));
    }

    let mut mean = vec![0.0; dim];
    for row in features.iter_rows() {
        for (m, x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let mut cov = DMatrix::<f64>::zeros(dim, dim);
    let mut centered = vec![0.0; dim];
    for row in features.iter_rows() {
        for (c, (x, m)) in centered.iter_mut().zip(row.iter().zip(&mean)) {
            *c = x - m;
        }
        for i in 0..dim {
            let ci = centered[i];
            if ci == 0.0 {
                continue;
            }
            for j in i..dim {
                cov[(i, j)] += ci * centered[j];
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            let v = cov[(i, j)] / (n - 1) as f64;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }

    let eigen = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]).then(a.cmp(&b)));

    let mut components = Vec::with_capacity(target_dim * dim);
    let mut explained_variance = Vec::with_capacity(target_dim);
    for &k in order.iter().take(target_dim) {
        let mut v: Vec<f64> = eigen.eigenvectors.column(k).iter().copied().collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let pivot =
            v.iter().enumerate().fold(0, |best, (i, x)| if x.abs() > v[best].abs() { i } else { best });
        if v[pivot] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        components.extend(v);
        explained_variance.push(eigen.eigenvalues[k].max(0.0));
    }

    Ok(PcaModel { mean, components, explained_variance, dim })
}

/// Projects `features` onto the model's components: `components · (x − mean)`.
pub fn project(model: &PcaModel, features: &FeatureMatrix) -> Result<FeatureMatrix> {
    if features.dim() != model.dim {
        return Err(Error::DimMismatch { expected: model.dim, found: features.dim() });
    }
    let mut data = Vec::with_capacity(features.rows() * model.output_dim());
    for row in features.iter_rows() {
        model.project_row(row, &mut data);
    }
    FeatureMatrix::new(features.sample_ids().to_vec(), model.output_dim(), data)
}
