//! Sample identifiers and the train/test dataset manifest.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque identifier of a single example, unique within its split.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SampleId(String);

impl TryFrom<String> for SampleId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        SampleId::new(s)
    }
}

impl From<SampleId> for String {
    fn from(id: SampleId) -> String {
        id.0
    }
}

impl SampleId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::InvalidManifest("sample id must be non-empty".into()));
        }
        if id.chars().any(|c| c.is_whitespace() || c.is_control()) {
            return Err(Error::InvalidManifest(format!(
                "sample id `{id}` contains whitespace or control characters"
            )));
        }
        Ok(SampleId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for SampleId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
        })
    }
}

/// Ordered train and test splits with a class label for every sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    train_ids: Vec<SampleId>,
    train_labels: Vec<u32>,
    test_ids: Vec<SampleId>,
    test_labels: Vec<u32>,
    num_labels: u32,
    index: HashMap<SampleId, (Split, usize)>,
}

impl DatasetManifest {
    /// Builds a manifest, checking that ids are unique across both splits,
    /// labels are in range and every label owns at least one training sample.
    pub fn new(train: Vec<(SampleId, u32)>, test: Vec<(SampleId, u32)>, num_labels: u32) -> Result<Self> {
        if num_labels == 0 {
            return Err(Error::InvalidManifest("num_labels must be positive".into()));
        }
        let mut index = HashMap::with_capacity(train.len() + test.len());
        let mut per_label = vec![0usize; num_labels as usize];
        for (split, records) in [(Split::Train, &train), (Split::Test, &test)] {
            for (pos, (id, label)) in records.iter().enumerate() {
                if *label >= num_labels {
                    return Err(Error::InvalidManifest(format!(
                        "sample `{id}` has label {label} outside [0, {num_labels})"
                    )));
                }
                if let Some((prev, _)) = index.insert(id.clone(), (split, pos)) {
                    return Err(Error::InvalidManifest(format!(
                        "sample `{id}` appears twice (first in {prev}, again in {split})"
                    )));
                }
                if split == Split::Train {
                    per_label[*label as usize] += 1;
                }
            }
        }
        if let Some(empty) = per_label.iter().position(|&n| n == 0) {
            return Err(Error::InvalidManifest(format!("label {empty} has no training samples")));
        }
        let (train_ids, train_labels) = train.into_iter().unzip();
        let (test_ids, test_labels) = test.into_iter().unzip();
        Ok(Self { train_ids, train_labels, test_ids, test_labels, num_labels, index })
    }

    pub fn train_ids(&self) -> &[SampleId] {
        &self.train_ids
    }

    pub fn test_ids(&self) -> &[SampleId] {
        &self.test_ids
    }

    pub fn train_labels(&self) -> &[u32] {
        &self.train_labels
    }

    pub fn test_labels(&self) -> &[u32] {
        &self.test_labels
    }

    pub fn num_labels(&self) -> u32 {
        self.num_labels
    }

    pub fn ids(&self, split: Split) -> &[SampleId] {
        match split {
            Split::Train => &self.train_ids,
            Split::Test => &self.test_ids,
        }
    }

    /// Split and position of `id`, if present.
    pub fn locate(&self, id: &SampleId) -> Option<(Split, usize)> {
        self.index.get(id).copied()
    }

    pub fn label_of(&self, id: &SampleId) -> Option<u32> {
        self.locate(id).map(|(split, pos)| match split {
            Split::Train => self.train_labels[pos],
            Split::Test => self.test_labels[pos],
        })
    }

    /// Number of training samples carrying each label.
    pub fn train_label_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.num_labels as usize];
        for &l in &self.train_labels {
            counts[l as usize] += 1;
        }
        counts
    }
}
