//! Turning keep probabilities into a concrete proxy of exact size, with an
//! optional stage that drops whole labels.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::importance::{normalize_keep_prob, ImportanceConstants, ImportanceTable};
use crate::sample::{DatasetManifest, SampleId, Split};

/// Order in which the sample and label reductions run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelStageMode {
    /// Resample to the intermediate size, then drop labels down to the target.
    #[default]
    SampleFirst,
    /// Drop labels down to the intermediate size, then resample to the target.
    LabelFirst,
}

/// How member importances are combined into a label importance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    #[default]
    Sum,
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelStage {
    pub intermediate_ratio: f64,
    pub mode: LabelStageMode,
    #[serde(default)]
    pub aggregation: Aggregation,
}

impl FromStr for LabelStage {
    type Err = Error;

    /// Parses `sample-first:0.5`, `label-first:0.2`, optionally followed by
    /// `:mean` or `:sum`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidSpec(format!(
                "label stage `{s}` must look like sample-first:0.5 or label-first:0.2[:mean]"
            ))
        };
        let mut parts = s.split(':');
        let mode = match parts.next() {
            Some("sample-first") => LabelStageMode::SampleFirst,
            Some("label-first") => LabelStageMode::LabelFirst,
            _ => return Err(bad()),
        };
        let intermediate_ratio = parts.next().and_then(|r| r.parse().ok()).ok_or_else(bad)?;
        let aggregation = match parts.next() {
            None | Some("sum") => Aggregation::Sum,
            Some("mean") => Aggregation::Mean,
            _ => return Err(bad()),
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(LabelStage { intermediate_ratio, mode, aggregation })
    }
}

impl fmt::Display for LabelStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.mode {
            LabelStageMode::SampleFirst => "sample-first",
            LabelStageMode::LabelFirst => "label-first",
        };
        write!(f, "{mode}:{}", self.intermediate_ratio)?;
        if self.aggregation == Aggregation::Mean {
            f.write_str(":mean")?;
        }
        Ok(())
    }
}

/// Parameters of a proxy: its size relative to the training split, the
/// resampling seed and the optional label stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxySpec {
    pub target_ratio: f64,
    pub seed: u64,
    pub label_stage: Option<LabelStage>,
    pub constants: ImportanceConstants,
}

impl ProxySpec {
    pub fn new(target_ratio: f64, seed: u64) -> Self {
        Self { target_ratio, seed, label_stage: None, constants: ImportanceConstants::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_ratio > 0.0 && self.target_ratio <= 1.0) {
            return Err(Error::InvalidSpec(format!("target ratio {} outside (0, 1]", self.target_ratio)));
        }
        if let Some(stage) = &self.label_stage {
            let r = stage.intermediate_ratio;
            if !(r >= self.target_ratio && r <= 1.0) {
                return Err(Error::InvalidSpec(format!(
                    "intermediate ratio {r} must lie in [target ratio {}, 1]",
                    self.target_ratio
                )));
            }
        }
        self.constants.validate()
    }

    /// Final proxy size for a training split of `n` samples.
    pub fn target_count(&self, n: usize) -> usize {
        ratio_count(self.target_ratio, n)
    }
}

fn ratio_count(ratio: f64, n: usize) -> usize {
    ((ratio * n as f64).round() as usize).clamp(1.min(n), n)
}

/// What produced a selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub method: String,
    pub spec: ProxySpec,
    /// Input name → hex SHA-256 digest.
    pub inputs: BTreeMap<String, String>,
}

/// The data proxy: retained training ids in manifest order and the labels
/// that survived label reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxySelection {
    pub kept_train_ids: Vec<SampleId>,
    pub kept_labels: BTreeSet<u32>,
    pub provenance: Provenance,
}

impl ProxySelection {
    pub fn len(&self) -> usize {
        self.kept_train_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept_train_ids.is_empty()
    }
}

/// Draws `target_count` distinct positions without replacement, each sample
/// weighted by `weights`, using exponential keys: every positive-weight item
/// draws `u^(1/w)` with `u` uniform on (0, 1] and the largest keys win.
/// Returned positions are ascending.
pub fn weighted_sample_positions<R: Rng + ?Sized>(
    weights: &[f64],
    target_count: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let available = weights.iter().filter(|w| **w > 0.0).count();
    if target_count > available {
        return Err(Error::InsufficientSupport { requested: target_count, available });
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::DegenerateInput("sampling weights must be finite and non-negative".into()));
    }
    // ln(u) / w orders items exactly like u^(1/w) and does not underflow.
    let mut keyed: Vec<(f64, usize)> = Vec::with_capacity(available);
    for (i, &w) in weights.iter().enumerate() {
        let u: f64 = 1.0 - rng.random::<f64>();
        if w > 0.0 {
            keyed.push((u.ln() / w, i));
        }
    }
    keyed.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut picked: Vec<usize> = keyed.into_iter().take(target_count).map(|(_, i)| i).collect();
    picked.sort_unstable();
    Ok(picked)
}

fn keep_prob_of(table: &ImportanceTable) -> Result<&[f64]> {
    table
        .keep_prob()
        .ok_or_else(|| Error::DegenerateInput("keep probabilities have not been normalized".into()))
}

/// Weighted sampling without replacement of exactly `target_count` ids,
/// returned in table order.
pub fn sample_proxy(keep_prob: &ImportanceTable, target_count: usize, seed: u64) -> Result<Vec<SampleId>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = weighted_sample_positions(keep_prob_of(keep_prob)?, target_count, &mut rng)?;
    Ok(positions.into_iter().map(|i| keep_prob.ids()[i].clone()).collect())
}

/// Per-label importance over the samples present in `train_importance`,
/// indexed by label id. Labels without members get 0.
pub fn aggregate_label_importance(
    train_importance: &ImportanceTable,
    manifest: &DatasetManifest,
    aggregation: Aggregation,
) -> Result<Vec<f64>> {
    let mut sums = vec![0.0; manifest.num_labels() as usize];
    let mut counts = vec![0usize; sums.len()];
    for (id, v) in train_importance.ids().iter().zip(train_importance.values()) {
        let label = match manifest.locate(id) {
            Some((Split::Train, pos)) => manifest.train_labels()[pos],
            _ => {
                return Err(Error::DegenerateInput(format!(
                    "`{id}` is not a training sample of the manifest"
                )))
            }
        };
        sums[label as usize] += v;
        counts[label as usize] += 1;
    }
    if aggregation == Aggregation::Mean {
        for (s, &c) in sums.iter_mut().zip(&counts) {
            if c > 0 {
                *s /= c as f64;
            }
        }
    }
    Ok(sums)
}

/// Drops labels in ascending importance order (smaller id first on ties)
/// until at most `target_sample_fraction` of the samples counted in
/// `label_counts` remain. The last label is never dropped.
pub fn reduce_labels(
    label_importance: &[f64],
    label_counts: &[usize],
    target_sample_fraction: f64,
) -> Result<BTreeSet<u32>> {
    if !(target_sample_fraction > 0.0 && target_sample_fraction <= 1.0) {
        return Err(Error::InvalidSpec(format!(
            "label reduction fraction {target_sample_fraction} outside (0, 1]"
        )));
    }
    let total: usize = label_counts.iter().sum();
    let max_remaining = (target_sample_fraction * total as f64 + 1e-9).floor() as usize;
    Ok(reduce_labels_to_count(label_importance, label_counts, max_remaining))
}

/// [`reduce_labels`] with an absolute sample budget.
pub fn reduce_labels_to_count(
    label_importance: &[f64],
    label_counts: &[usize],
    max_remaining: usize,
) -> BTreeSet<u32> {
    assert_eq!(label_importance.len(), label_counts.len());
    let mut order: Vec<usize> = (0..label_importance.len()).collect();
    order.sort_by(|&a, &b| label_importance[a].total_cmp(&label_importance[b]).then(a.cmp(&b)));
    let mut kept: BTreeSet<u32> = order.iter().map(|&l| l as u32).collect();
    let mut remaining: usize = label_counts.iter().sum();
    for &label in &order {
        if remaining <= max_remaining || kept.len() == 1 {
            break;
        }
        kept.remove(&(label as u32));
        remaining -= label_counts[label];
    }
    kept
}

fn check_alignment(manifest: &DatasetManifest, table: &ImportanceTable) -> Result<()> {
    if table.split() != Split::Train || table.ids() != manifest.train_ids() {
        return Err(Error::DegenerateInput(
            "train importance must cover the manifest's training split in order".into(),
        ));
    }
    Ok(())
}

/// Builds the proxy from transferred training importance.
///
/// Keep probabilities are renormalized over the surviving pool before every
/// sampling stage. In sample-first mode the label drop may leave fewer
/// samples than the target; the shortfall is refilled by weighted sampling
/// from the not-yet-selected samples of the retained labels. When a lone
/// surviving label still exceeds the target it is thinned the same way.
pub fn generate_proxy(
    manifest: &DatasetManifest,
    train_importance: &ImportanceTable,
    spec: &ProxySpec,
) -> Result<ProxySelection> {
    spec.validate()?;
    check_alignment(manifest, train_importance)?;
    let n = manifest.train_ids().len();
    let target = spec.target_count(n);
    let labels = manifest.train_labels();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let all_labels: BTreeSet<u32> = (0..manifest.num_labels()).collect();

    let sample_within = |mask: &dyn Fn(usize) -> bool, count: usize, rng: &mut ChaCha8Rng| {
        let pool: Vec<usize> = (0..n).filter(|&i| mask(i)).collect();
        let restricted = train_importance.restrict(mask);
        if restricted.total() <= 0.0 && count > 0 {
            return Err(Error::InsufficientSupport { requested: count, available: 0 });
        }
        let sub = normalize_keep_prob(restricted)?;
        let picked = weighted_sample_positions(keep_prob_of(&sub)?, count, rng)?;
        Ok::<_, Error>(picked.into_iter().map(|p| pool[p]).collect::<Vec<usize>>())
    };

    let (positions, kept_labels) = match spec.label_stage {
        None => (sample_within(&|_| true, target, &mut rng)?, all_labels),
        Some(stage) => match stage.mode {
            LabelStageMode::SampleFirst => {
                let intermediate = ratio_count(stage.intermediate_ratio, n).max(target);
                let first = sample_within(&|_| true, intermediate, &mut rng)?;
                let mut in_first = vec![false; n];
                first.iter().for_each(|&p| in_first[p] = true);
                let survivors = train_importance.restrict(|i| in_first[i]);
                let importance = aggregate_label_importance(&survivors, manifest, stage.aggregation)?;
                let mut counts = vec![0usize; importance.len()];
                for &p in &first {
                    counts[labels[p] as usize] += 1;
                }
                let kept = reduce_labels_to_count(&importance, &counts, target);
                let mut chosen: Vec<usize> =
                    first.into_iter().filter(|&p| kept.contains(&labels[p])).collect();
                if chosen.len() > target {
                    // Only possible when a single label survives and still
                    // exceeds the budget; thin it by weighted sampling.
                    let mut in_chosen = vec![false; n];
                    chosen.iter().for_each(|&p| in_chosen[p] = true);
                    chosen = sample_within(&|i| in_chosen[i], target, &mut rng)?;
                } else if chosen.len() < target {
                    let taken: BTreeSet<usize> = chosen.iter().copied().collect();
                    let refill = sample_within(
                        &|i| kept.contains(&labels[i]) && !taken.contains(&i),
                        target - chosen.len(),
                        &mut rng,
                    )?;
                    chosen.extend(refill);
                    chosen.sort_unstable();
                }
                (chosen, kept)
            }
            LabelStageMode::LabelFirst => {
                let importance = aggregate_label_importance(train_importance, manifest, stage.aggregation)?;
                let kept =
                    reduce_labels(&importance, &manifest.train_label_counts(), stage.intermediate_ratio)?;
                let chosen = sample_within(&|i| kept.contains(&labels[i]), target, &mut rng)?;
                (chosen, kept)
            }
        },
    };

    Ok(ProxySelection {
        kept_train_ids: positions.iter().map(|&p| manifest.train_ids()[p].clone()).collect(),
        kept_labels,
        provenance: Provenance { method: "importance".into(), spec: spec.clone(), inputs: BTreeMap::new() },
    })
}

/// Uniform sampling without replacement of `round(ratio × n)` training ids,
/// the baseline every importance-driven proxy is compared against.
pub fn uniform_proxy(manifest: &DatasetManifest, ratio: f64, seed: u64) -> Result<ProxySelection> {
    let spec = ProxySpec::new(ratio, seed);
    spec.validate()?;
    let n = manifest.train_ids().len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, n, spec.target_count(n)).into_vec();
    picked.sort_unstable();
    Ok(ProxySelection {
        kept_train_ids: picked.iter().map(|&p| manifest.train_ids()[p].clone()).collect(),
        kept_labels: (0..manifest.num_labels()).collect(),
        provenance: Provenance { method: "uniform".into(), spec, inputs: BTreeMap::new() },
    })
}
