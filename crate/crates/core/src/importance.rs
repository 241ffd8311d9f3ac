//! Per-sample importance from probe-network agreement.
//!
//! Two probe networks, the lightest (`lower`) and the heaviest (`upper`)
//! configuration of a search space, are evaluated on every test sample.
//! Each sample falls into one of four cases depending on which probes
//! classify it correctly and how the probes rank against each other on the
//! full data. Samples whose per-sample outcome agrees with the reference
//! ranking (`Case3`) are the ones that carry ranking information and get the
//! largest weight; samples that contradict it (`Case4`) get a small one.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::{SampleId, Split};

const ACCURACY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseLabel {
    /// Both probes classify the sample correctly.
    Case1,
    /// Both probes misclassify the sample.
    Case2,
    /// The probes disagree and the better-ranked probe is the correct one.
    Case3,
    /// The probes disagree and the worse-ranked probe is the correct one.
    Case4,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 4] = [CaseLabel::Case1, CaseLabel::Case2, CaseLabel::Case3, CaseLabel::Case4];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case{}", self.index() + 1)
    }
}

/// Classifies one test sample from the two probe outcomes.
///
/// `upper_strictly_better` is whether the upper probe's accuracy on the full
/// data is strictly higher than the lower probe's. When it is not, the lower
/// probe is treated as the better-ranked one.
pub fn classify_case(correct_lower: bool, correct_upper: bool, upper_strictly_better: bool) -> CaseLabel {
    let ordering = if upper_strictly_better { Ordering::Greater } else { Ordering::Less };
    classify_with_ordering(correct_lower, correct_upper, ordering)
}

/// Like [`classify_case`], with an explicit `upper` vs `lower` accuracy
/// ordering. Disagreements under an exact tie are treated as `Case3`.
pub fn classify_with_ordering(
    correct_lower: bool,
    correct_upper: bool,
    upper_vs_lower: Ordering,
) -> CaseLabel {
    match (correct_lower, correct_upper) {
        (true, true) => CaseLabel::Case1,
        (false, false) => CaseLabel::Case2,
        (_, upper_correct) => match upper_vs_lower {
            Ordering::Equal => CaseLabel::Case3,
            Ordering::Greater if upper_correct => CaseLabel::Case3,
            Ordering::Less if !upper_correct => CaseLabel::Case3,
            _ => CaseLabel::Case4,
        },
    }
}

/// Importance assigned to each of the four cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImportanceConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl Default for ImportanceConstants {
    fn default() -> Self {
        Self { c1: 2.0, c2: 1.0, c3: 6.0, c4: 1.0 }
    }
}

impl ImportanceConstants {
    pub fn new(c1: f64, c2: f64, c3: f64, c4: f64) -> Result<Self> {
        let c = Self { c1, c2, c3, c4 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let all = self.as_array();
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidConstants(format!(
                "constants must be finite and non-negative, got {all:?}"
            )));
        }
        if all.iter().all(|v| *v == 0.0) {
            return Err(Error::InvalidConstants("at least one constant must be positive".into()));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.c1, self.c2, self.c3, self.c4]
    }

    pub fn value(&self, case: CaseLabel) -> f64 {
        self.as_array()[case.index()]
    }
}

impl std::str::FromStr for ImportanceConstants {
    type Err = Error;

    /// Parses `c1,c2,c3,c4`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidConstants(format!("`{s}`: {e}")))?;
        match parts.as_slice() {
            [c1, c2, c3, c4] => Self::new(*c1, *c2, *c3, *c4),
            _ => Err(Error::InvalidConstants(format!("expected four comma-separated values, got `{s}`"))),
        }
    }
}

impl fmt::Display for ImportanceConstants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.c1, self.c2, self.c3, self.c4)
    }
}

/// Per-test-sample correctness of every probe plus each probe's accuracy.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeOutcomeSet {
    probe_ids: Vec<String>,
    lower: usize,
    upper: usize,
    accuracy: Vec<f64>,
    test_ids: Vec<SampleId>,
    /// `correct[probe][sample]`
    correct: Vec<Vec<bool>>,
}

impl ProbeOutcomeSet {
    /// Validates and assembles an outcome set. `correct` holds one flag
    /// vector per probe, aligned with `test_ids`.
    pub fn new(
        probe_ids: Vec<String>,
        lower: &str,
        upper: &str,
        accuracy: Vec<f64>,
        test_ids: Vec<SampleId>,
        correct: Vec<Vec<bool>>,
    ) -> Result<Self> {
        if probe_ids.len() < 2 {
            return Err(Error::InvalidOutcomes(format!("need at least two probes, got {}", probe_ids.len())));
        }
        let position = |name: &str| {
            probe_ids
                .iter()
                .position(|p| p == name)
                .ok_or_else(|| Error::InvalidOutcomes(format!("probe `{name}` is not among {probe_ids:?}")))
        };
        let (lower, upper) = (position(lower)?, position(upper)?);
        if lower == upper {
            return Err(Error::InvalidOutcomes("lower and upper must be distinct probes".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = probe_ids.iter().find(|p| !seen.insert(p.as_str())) {
            return Err(Error::InvalidOutcomes(format!("duplicate probe id `{dup}`")));
        }
        if accuracy.len() != probe_ids.len() || correct.len() != probe_ids.len() {
            return Err(Error::InvalidOutcomes(
                "accuracy and correctness must be given for every probe".into(),
            ));
        }
        for (p, flags) in correct.iter().enumerate() {
            if flags.len() != test_ids.len() {
                return Err(Error::InvalidOutcomes(format!(
                    "probe `{}` has {} flags for {} test samples",
                    probe_ids[p],
                    flags.len(),
                    test_ids.len()
                )));
            }
            if !test_ids.is_empty() {
                let mean = flags.iter().filter(|&&c| c).count() as f64 / flags.len() as f64;
                if (mean - accuracy[p]).abs() > ACCURACY_TOLERANCE {
                    return Err(Error::InvalidOutcomes(format!(
                        "probe `{}` records accuracy {} but its flags average {mean}",
                        probe_ids[p], accuracy[p]
                    )));
                }
            }
        }
        Ok(Self { probe_ids, lower, upper, accuracy, test_ids, correct })
    }

    /// Builds an outcome set whose accuracies are the means of the flags.
    pub fn from_flags(
        probe_ids: Vec<String>,
        lower: &str,
        upper: &str,
        test_ids: Vec<SampleId>,
        correct: Vec<Vec<bool>>,
    ) -> Result<Self> {
        let accuracy = correct
            .iter()
            .map(|flags| {
                if flags.is_empty() {
                    0.0
                } else {
                    flags.iter().filter(|&&c| c).count() as f64 / flags.len() as f64
                }
            })
            .collect();
        Self::new(probe_ids, lower, upper, accuracy, test_ids, correct)
    }

    pub fn probe_ids(&self) -> &[String] {
        &self.probe_ids
    }

    pub fn lower_id(&self) -> &str {
        &self.probe_ids[self.lower]
    }

    pub fn upper_id(&self) -> &str {
        &self.probe_ids[self.upper]
    }

    pub fn lower_index(&self) -> usize {
        self.lower
    }

    pub fn upper_index(&self) -> usize {
        self.upper
    }

    pub fn accuracies(&self) -> &[f64] {
        &self.accuracy
    }

    pub fn accuracy_of(&self, probe: usize) -> f64 {
        self.accuracy[probe]
    }

    pub fn test_ids(&self) -> &[SampleId] {
        &self.test_ids
    }

    pub fn flags(&self, probe: usize) -> &[bool] {
        &self.correct[probe]
    }

    /// Ordering of the upper probe's accuracy relative to the lower probe's.
    pub fn upper_vs_lower(&self) -> Ordering {
        self.accuracy[self.upper].partial_cmp(&self.accuracy[self.lower]).unwrap_or(Ordering::Equal)
    }
}

/// Classifies every test sample of `outcomes`, in test-id order.
pub fn classify_outcomes(outcomes: &ProbeOutcomeSet) -> Vec<CaseLabel> {
    let ordering = outcomes.upper_vs_lower();
    let lower = outcomes.flags(outcomes.lower_index());
    let upper = outcomes.flags(outcomes.upper_index());
    lower.iter().zip(upper).map(|(&l, &u)| classify_with_ordering(l, u, ordering)).collect()
}

/// Importance values for one split, optionally with normalized keep
/// probabilities. Entries are aligned with `ids`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceTable {
    split: Split,
    ids: Vec<SampleId>,
    values: Vec<f64>,
    keep_prob: Option<Vec<f64>>,
}

impl ImportanceTable {
    pub fn new(split: Split, ids: Vec<SampleId>, values: Vec<f64>) -> Result<Self> {
        if ids.len() != values.len() {
            return Err(Error::DegenerateInput(format!(
                "{} ids but {} importance values",
                ids.len(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::DegenerateInput(format!(
                "importance of `{}` is {}, expected a finite non-negative value",
                ids[bad], values[bad]
            )));
        }
        Ok(Self { split, ids, values, keep_prob: None })
    }

    pub fn split(&self) -> Split {
        self.split
    }

    pub fn ids(&self) -> &[SampleId] {
        &self.ids
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn keep_prob(&self) -> Option<&[f64]> {
        self.keep_prob.as_deref()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Id → importance lookup.
    pub fn value_map(&self) -> HashMap<&SampleId, f64> {
        self.ids.iter().zip(self.values.iter().copied()).collect()
    }

    /// Keeps only the entries whose position satisfies `keep`, dropping any
    /// keep probabilities (they no longer sum to one).
    pub fn restrict(&self, mut keep: impl FnMut(usize) -> bool) -> ImportanceTable {
        let (ids, values) = self
            .ids
            .iter()
            .zip(&self.values)
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, (id, v))| (id.clone(), *v))
            .unzip();
        ImportanceTable { split: self.split, ids, values, keep_prob: None }
    }
}

/// Maps every test sample to the constant of its case.
pub fn assign_test_importance(
    outcomes: &ProbeOutcomeSet,
    constants: &ImportanceConstants,
) -> Result<ImportanceTable> {
    constants.validate()?;
    if outcomes.test_ids().is_empty() {
        return Err(Error::EmptyTestSet);
    }
    if outcomes.probe_ids().len() > 2 {
        log::warn!(
            "{} probes supplied; only `{}` (lower) and `{}` (upper) are used",
            outcomes.probe_ids().len(),
            outcomes.lower_id(),
            outcomes.upper_id()
        );
    }
    if outcomes.upper_vs_lower() == Ordering::Equal {
        log::warn!(
            "probes `{}` and `{}` have identical accuracy {}; disagreements are treated as case3",
            outcomes.lower_id(),
            outcomes.upper_id(),
            outcomes.accuracy_of(outcomes.upper_index())
        );
    }
    let values = classify_outcomes(outcomes).into_iter().map(|c| constants.value(c)).collect();
    ImportanceTable::new(Split::Test, outcomes.test_ids().to_vec(), values)
}

/// Populates keep probabilities as each value over the total.
pub fn normalize_keep_prob(mut table: ImportanceTable) -> Result<ImportanceTable> {
    let total = table.total();
    if total <= 0.0 {
        return Err(Error::ZeroTotalImportance);
    }
    table.keep_prob = Some(table.values.iter().map(|v| v / total).collect());
    Ok(table)
}
