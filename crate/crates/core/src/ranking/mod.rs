//! How well a proxy preserves the accuracy ranking of a set of
//! configurations: pairwise agreement, correlation and best-config checks.

mod correlation;
mod figure;

pub use correlation::{kendall_tau_a, pearson, rank_average, spearman, CorrelationMethod};
pub use figure::{render_agreement_figure, AgreementFigure};

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficient that reproduces the reference correlation scores of the bundled fixtures; used
/// wherever a single headline number is shown.
pub const DEFAULT_CORRELATION: CorrelationMethod = CorrelationMethod::Pearson;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigAccuracy {
    pub config_id: String,
    /// Free-form description, e.g. `B → 16`.
    pub params: BTreeMap<String, String>,
    pub accuracy: f64,
}

/// Accuracy of every configuration under one data variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyTable {
    pub variant: String,
    entries: Vec<ConfigAccuracy>,
}

impl AccuracyTable {
    pub fn new(variant: impl Into<String>, entries: Vec<ConfigAccuracy>) -> Result<Self> {
        let variant = variant.into();
        let mut seen = std::collections::HashSet::new();
        for e in &entries {
            if !seen.insert(e.config_id.as_str()) {
                return Err(Error::ConfigMismatch(format!(
                    "config `{}` listed twice in variant `{variant}`",
                    e.config_id
                )));
            }
            if !e.accuracy.is_finite() {
                return Err(Error::ConfigMismatch(format!(
                    "config `{}` has non-finite accuracy",
                    e.config_id
                )));
            }
        }
        Ok(Self { variant, entries })
    }

    /// Convenience constructor from `(config_id, accuracy)` pairs.
    pub fn from_pairs<S: Into<String>>(
        variant: impl Into<String>,
        pairs: impl IntoIterator<Item = (S, f64)>,
    ) -> Result<Self> {
        let entries = pairs
            .into_iter()
            .map(|(id, accuracy)| ConfigAccuracy { config_id: id.into(), params: BTreeMap::new(), accuracy })
            .collect();
        Self::new(variant, entries)
    }

    pub fn entries(&self) -> &[ConfigAccuracy] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn config_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.config_id.as_str())
    }

    pub fn accuracies(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.accuracy).collect()
    }
}

/// Accuracy vectors of `reference` and `candidate`, both in reference order.
pub fn align(reference: &AccuracyTable, candidate: &AccuracyTable) -> Result<(Vec<f64>, Vec<f64>)> {
    let by_id: HashMap<&str, f64> =
        candidate.entries.iter().map(|e| (e.config_id.as_str(), e.accuracy)).collect();
    let missing: Vec<&str> = reference.config_ids().filter(|id| !by_id.contains_key(id)).collect();
    let ref_ids: std::collections::HashSet<&str> = reference.config_ids().collect();
    let extra: Vec<&str> = candidate.config_ids().filter(|id| !ref_ids.contains(id)).collect();
    if !missing.is_empty() || !extra.is_empty() {
        return Err(Error::ConfigMismatch(format!(
            "`{}` vs `{}`: missing from candidate {missing:?}, not in reference {extra:?}",
            reference.variant, candidate.variant
        )));
    }
    let cand = reference.config_ids().map(|id| by_id[id]).collect();
    Ok((reference.accuracies(), cand))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairAgreement {
    Preserved,
    Flipped,
    Tied,
}

/// Symmetric pairwise agreement between two accuracy vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgreementMatrix {
    config_ids: Vec<String>,
    cells: Vec<PairAgreement>,
}

impl AgreementMatrix {
    pub fn size(&self) -> usize {
        self.config_ids.len()
    }

    pub fn config_ids(&self) -> &[String] {
        &self.config_ids
    }

    pub fn get(&self, i: usize, j: usize) -> PairAgreement {
        self.cells[i * self.size() + j]
    }

    /// Unordered pairs `(i, j)`, `i < j`, in the given state.
    pub fn pairs(&self, state: PairAgreement) -> Vec<(usize, usize)> {
        let n = self.size();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.get(i, j) == state)
            .collect()
    }

    pub fn flipped_pair_count(&self) -> usize {
        self.pairs(PairAgreement::Flipped).len()
    }

    pub fn tied_pair_count(&self) -> usize {
        self.pairs(PairAgreement::Tied).len()
    }
}

fn agreement_from_vectors(ids: Vec<String>, reference: &[f64], candidate: &[f64]) -> AgreementMatrix {
    let n = reference.len();
    let mut cells = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let r = reference[i] - reference[j];
            let c = candidate[i] - candidate[j];
            cells.push(if i == j {
                PairAgreement::Preserved
            } else if r == 0.0 || c == 0.0 {
                PairAgreement::Tied
            } else if (r > 0.0) == (c > 0.0) {
                PairAgreement::Preserved
            } else {
                PairAgreement::Flipped
            });
        }
    }
    AgreementMatrix { config_ids: ids, cells }
}

/// Cell `(i, j)` compares the ordering of configs `i` and `j` under both
/// tables. Self-pairs are marked preserved.
pub fn agreement_matrix(reference: &AccuracyTable, candidate: &AccuracyTable) -> Result<AgreementMatrix> {
    let (r, c) = align(reference, candidate)?;
    Ok(agreement_from_vectors(reference.config_ids().map(String::from).collect(), &r, &c))
}

/// Pearson or Spearman correlation between the aligned accuracy vectors.
pub fn correlation_score(
    reference: &AccuracyTable,
    candidate: &AccuracyTable,
    method: CorrelationMethod,
) -> Result<f64> {
    let (r, c) = align(reference, candidate)?;
    method.compute(&r, &c)
}

/// Outcome of comparing the top configuration of two tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestConfig {
    pub preserved: bool,
    pub reference_best: Option<String>,
    pub candidate_best: Option<String>,
}

fn unique_argmax(values: &[f64]) -> Option<usize> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut hits = values.iter().enumerate().filter(|(_, v)| **v == max);
    let first = hits.next()?.0;
    hits.next().is_none().then_some(first)
}

/// Whether both tables have the same, unique, best configuration.
pub fn best_config_preserved(reference: &AccuracyTable, candidate: &AccuracyTable) -> Result<BestConfig> {
    let (r, c) = align(reference, candidate)?;
    let ids: Vec<&str> = reference.config_ids().collect();
    let (rb, cb) = (unique_argmax(&r), unique_argmax(&c));
    if !r.is_empty() && (rb.is_none() || cb.is_none()) {
        log::warn!(
            "best configuration of `{}` vs `{}` is tied; counted as not preserved",
            reference.variant,
            candidate.variant
        );
    }
    Ok(BestConfig {
        preserved: rb.is_some() && rb == cb,
        reference_best: rb.map(|i| ids[i].to_string()),
        candidate_best: cb.map(|i| ids[i].to_string()),
    })
}

/// Everything known about one candidate relative to the reference.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingReport {
    pub reference: String,
    pub candidate: String,
    pub agreement: AgreementMatrix,
    /// `None` when either vector is constant.
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
    pub kendall_tau_a: Option<f64>,
    pub best: BestConfig,
    pub flipped_pair_count: usize,
    pub tied_pair_count: usize,
}

impl RankingReport {
    pub fn best_preserved(&self) -> bool {
        self.best.preserved
    }

    /// The headline correlation ([`DEFAULT_CORRELATION`]).
    pub fn correlation(&self) -> Option<f64> {
        match DEFAULT_CORRELATION {
            CorrelationMethod::Pearson => self.pearson,
            CorrelationMethod::Spearman => self.spearman,
        }
    }
}

fn defined(value: Result<f64>) -> Result<Option<f64>> {
    match value {
        Ok(v) => Ok(Some(v)),
        Err(Error::ZeroVariance(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn ranking_report(reference: &AccuracyTable, candidate: &AccuracyTable) -> Result<RankingReport> {
    let (r, c) = align(reference, candidate)?;
    let agreement = agreement_from_vectors(reference.config_ids().map(String::from).collect(), &r, &c);
    Ok(RankingReport {
        reference: reference.variant.clone(),
        candidate: candidate.variant.clone(),
        pearson: defined(pearson(&r, &c))?,
        spearman: defined(spearman(&r, &c))?,
        kendall_tau_a: defined(kendall_tau_a(&r, &c))?,
        best: best_config_preserved(reference, candidate)?,
        flipped_pair_count: agreement.flipped_pair_count(),
        tied_pair_count: agreement.tied_pair_count(),
        agreement,
    })
}

impl fmt::Display for RankingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.4}"));
        write!(
            f,
            "{} vs {}: pearson {} spearman {} flipped {} tied {} best {} ({} → {})",
            self.candidate,
            self.reference,
            show(self.pearson),
            show(self.spearman),
            self.flipped_pair_count,
            self.tied_pair_count,
            if self.best.preserved { "preserved" } else { "changed" },
            self.best.reference_best.as_deref().unwrap_or("tie"),
            self.best.candidate_best.as_deref().unwrap_or("tie"),
        )
    }
}
