use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::sample::{DatasetManifest, SampleId};

/// Gaussian-mixture classification problem.
///
/// Every label owns `modes_per_label` isotropic Gaussian clusters whose
/// centers sit on a sphere of radius `CENTER_RADIUS`, shrunk toward the
/// origin by `label_overlap` (0 keeps them apart, 1 makes every cluster
/// coincide).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticDatasetSpec {
    pub num_labels: u32,
    pub samples_per_label_train: usize,
    pub samples_per_label_test: usize,
    pub feature_dim: usize,
    pub cluster_spread: f64,
    pub label_overlap: f64,
    #[serde(default = "one")]
    pub modes_per_label: usize,
    pub seed: u64,
}

fn one() -> usize {
    1
}

const CENTER_RADIUS: f64 = 4.0;

impl Default for SyntheticDatasetSpec {
    fn default() -> Self {
        Self {
            num_labels: 10,
            samples_per_label_train: 500,
            samples_per_label_test: 100,
            feature_dim: 8,
            cluster_spread: 1.0,
            label_overlap: 0.2,
            modes_per_label: 3,
            seed: 0,
        }
    }
}

impl SyntheticDatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_labels == 0
            || self.samples_per_label_train == 0
            || self.samples_per_label_test == 0
            || self.modes_per_label == 0
        {
            return Err(Error::InvalidSpec("dataset counts must all be at least 1".into()));
        }
        if self.feature_dim < 2 {
            return Err(Error::InvalidSpec("feature_dim must be at least 2".into()));
        }
        if !(0.0..=1.0).contains(&self.label_overlap) {
            return Err(Error::InvalidSpec("label_overlap must lie in [0, 1]".into()));
        }
        if !(self.cluster_spread >= 0.0 && self.cluster_spread.is_finite()) {
            return Err(Error::InvalidSpec("cluster_spread must be finite and non-negative".into()));
        }
        Ok(())
    }
}

/// Features and labels of one split, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledData {
    pub dim: usize,
    pub num_labels: u32,
    pub x: Vec<f64>,
    pub y: Vec<u32>,
}

impl LabeledData {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.dim..(i + 1) * self.dim]
    }

    /// Rows at `positions`, in the given order.
    pub fn subset(&self, positions: &[usize]) -> LabeledData {
        let mut x = Vec::with_capacity(positions.len() * self.dim);
        for &p in positions {
            x.extend_from_slice(self.row(p));
        }
        LabeledData {
            dim: self.dim,
            num_labels: self.num_labels,
            x,
            y: positions.iter().map(|&p| self.y[p]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub manifest: DatasetManifest,
    pub train: LabeledData,
    pub test: LabeledData,
}

impl SyntheticDataset {
    pub fn train_features(&self) -> Result<FeatureMatrix> {
        FeatureMatrix::new(self.manifest.train_ids().to_vec(), self.train.dim, self.train.x.clone())
    }

    pub fn test_features(&self) -> Result<FeatureMatrix> {
        FeatureMatrix::new(self.manifest.test_ids().to_vec(), self.test.dim, self.test.x.clone())
    }
}

/// Samples the dataset. Labels are interleaved (`i mod num_labels`) and
/// modes cycle within each label. Values are rounded to `f32` so that they
/// survive the binary feature format unchanged.
pub fn generate_dataset(spec: &SyntheticDatasetSpec) -> Result<SyntheticDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let d = spec.feature_dim;
    let shrink = 1.0 - spec.label_overlap;
    let centers: Vec<Vec<f64>> = (0..spec.num_labels as usize * spec.modes_per_label)
        .map(|_| {
            let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
            v.into_iter().map(|x| x / norm * CENTER_RADIUS * shrink).collect()
        })
        .collect();

    let draw = |per_label: usize, rng: &mut ChaCha8Rng| {
        let n = per_label * spec.num_labels as usize;
        let mut x = Vec::with_capacity(n * d);
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            let label = (i % spec.num_labels as usize) as u32;
            let mode = (i / spec.num_labels as usize) % spec.modes_per_label;
            let c = &centers[label as usize * spec.modes_per_label + mode];
            for ck in c {
                let noise: f64 = rng.sample(StandardNormal);
                x.push((ck + spec.cluster_spread * noise) as f32 as f64);
            }
            y.push(label);
        }
        LabeledData { dim: d, num_labels: spec.num_labels, x, y }
    };
    let train = draw(spec.samples_per_label_train, &mut rng);
    let test = draw(spec.samples_per_label_test, &mut rng);

    let ids = |prefix: &str, labels: &[u32]| {
        labels
            .iter()
            .enumerate()
            .map(|(i, &l)| Ok((SampleId::new(format!("{prefix}_{i:06}"))?, l)))
            .collect::<Result<Vec<_>>>()
    };
    let manifest = DatasetManifest::new(ids("train", &train.y)?, ids("test", &test.y)?, spec.num_labels)?;
    Ok(SyntheticDataset { manifest, train, test })
}
