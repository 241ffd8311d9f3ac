use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::classifier::{train_classifier, ClassifierConfig, TrainedClassifier};
use super::dataset::{generate_dataset, LabeledData, SyntheticDataset, SyntheticDatasetSpec};
use super::evaluate_probes;
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, Metric};
use crate::importance::ImportanceConstants;
use crate::pipeline::{generate_data_proxy, ProxyOptions};
use crate::ranking::{ranking_report, AccuracyTable, ConfigAccuracy, RankingReport};
use crate::resample::{uniform_proxy, LabelStage, ProxySelection, ProxySpec};
use crate::sample::Split;

/// A run whose accuracy does not clear chance by this margin is flagged.
const CONVERGENCE_MARGIN: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ours,
    Random,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Ours => "ours",
            Method::Random => "random",
        })
    }
}

/// Grid of hidden widths × learning rates sharing one training schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpaceSpec {
    pub widths: Vec<usize>,
    pub learning_rates: Vec<f64>,
    pub epochs: usize,
    pub batch_size: usize,
    /// Defaults to the narrowest width with the first learning rate.
    #[serde(default)]
    pub lower: Option<String>,
    /// Defaults to the widest width with the last learning rate.
    #[serde(default)]
    pub upper: Option<String>,
}

impl Default for SearchSpaceSpec {
    fn default() -> Self {
        Self {
            widths: vec![0, 4, 8, 16, 32, 64],
            learning_rates: vec![0.05, 0.2],
            epochs: 20,
            batch_size: 32,
            lower: None,
            upper: None,
        }
    }
}

/// The configurations plus the two boundary (probe) configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub configs: Vec<ClassifierConfig>,
    pub lower: usize,
    pub upper: usize,
}

fn config_id(width: usize, lr: f64) -> String {
    format!("w{width}_lr{lr}")
}

impl SearchSpaceSpec {
    /// Expands the grid; `seed` is mixed with each config's position.
    pub fn build(&self, seed: u64) -> Result<SearchSpace> {
        if self.widths.is_empty() || self.learning_rates.is_empty() {
            return Err(Error::InvalidSpec("search space needs widths and learning rates".into()));
        }
        let mut configs = Vec::new();
        for &w in &self.widths {
            for &lr in &self.learning_rates {
                configs.push(ClassifierConfig {
                    config_id: config_id(w, lr),
                    hidden_width: w,
                    epochs: self.epochs,
                    learning_rate: lr,
                    batch_size: self.batch_size,
                    seed: mix_seed(seed, 1_000 + configs.len() as u64),
                });
            }
        }
        if configs.len() < 2 {
            return Err(Error::InvalidSpec("search space needs at least two configs".into()));
        }
        let narrowest = *self.widths.iter().min().unwrap_or(&0);
        let widest = *self.widths.iter().max().unwrap_or(&0);
        let lower = self.lower.clone().unwrap_or_else(|| config_id(narrowest, self.learning_rates[0]));
        let upper = self
            .upper
            .clone()
            .unwrap_or_else(|| config_id(widest, *self.learning_rates.last().unwrap_or(&0.0)));
        let find = |id: &str| {
            configs.iter().position(|c| c.config_id == id).ok_or_else(|| {
                Error::InvalidSpec(format!("boundary config `{id}` is not in the search space"))
            })
        };
        let (lower, upper) = (find(&lower)?, find(&upper)?);
        if lower == upper {
            return Err(Error::InvalidSpec("lower and upper boundary configs coincide".into()));
        }
        Ok(SearchSpace { configs, lower, upper })
    }
}

/// Feature-space and resampling parameters of the importance-driven proxy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProxyParams {
    #[serde(default)]
    pub constants: ImportanceConstants,
    #[serde(default)]
    pub metric: Metric,
    #[serde(default)]
    pub pca_dim: Option<usize>,
    #[serde(default)]
    pub label_stage: Option<LabelStage>,
}

impl Default for ProxyParams {
    fn default() -> Self {
        Self {
            constants: ImportanceConstants::default(),
            metric: Metric::Euclidean,
            pca_dim: None,
            label_stage: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub dataset: SyntheticDatasetSpec,
    #[serde(default)]
    pub search_space: SearchSpaceSpec,
    pub ratios: Vec<f64>,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub proxy: ProxyParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: SyntheticDatasetSpec::default(),
            search_space: SearchSpaceSpec::default(),
            ratios: vec![0.1],
            methods: vec![Method::Ours, Method::Random],
            seeds: (1..=10).collect(),
            proxy: ProxyParams::default(),
        }
    }
}

/// One proxy variant retrained across the whole search space.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxyRun {
    pub ratio: f64,
    pub method: Method,
    pub proxy_size: usize,
    pub accuracies: AccuracyTable,
    pub non_converged: Vec<bool>,
    pub report: RankingReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialReport {
    pub seed: u64,
    pub original: AccuracyTable,
    pub original_non_converged: Vec<bool>,
    pub lower_id: String,
    pub upper_id: String,
    /// Upper probe strictly more accurate than the lower one on full data.
    pub capacity_ordered: bool,
    /// Test-sample case counts from the probes, when `ours` was run.
    pub case_counts: Option<[usize; 4]>,
    pub runs: Vec<ProxyRun>,
}

/// Aggregate over seeds for one `(ratio, method)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub ratio: f64,
    pub method: Method,
    pub runs: usize,
    pub mean_pearson: Option<f64>,
    pub mean_spearman: Option<f64>,
    pub best_preserved_rate: f64,
    pub mean_flipped_pairs: f64,
    pub non_converged_runs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub trials: Vec<TrialReport>,
}

fn mean_defined(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

impl ExperimentReport {
    pub fn summaries(&self) -> Vec<MethodSummary> {
        let mut out = Vec::new();
        for &ratio in &self.config.ratios {
            for &method in &self.config.methods {
                let runs: Vec<&ProxyRun> = self
                    .trials
                    .iter()
                    .flat_map(|t| &t.runs)
                    .filter(|r| r.ratio == ratio && r.method == method)
                    .collect();
                let n = runs.len().max(1) as f64;
                out.push(MethodSummary {
                    ratio,
                    method,
                    runs: runs.len(),
                    mean_pearson: mean_defined(runs.iter().map(|r| r.report.pearson)),
                    mean_spearman: mean_defined(runs.iter().map(|r| r.report.spearman)),
                    best_preserved_rate: runs.iter().filter(|r| r.report.best_preserved()).count() as f64 / n,
                    mean_flipped_pairs: runs.iter().map(|r| r.report.flipped_pair_count as f64).sum::<f64>()
                        / n,
                    non_converged_runs: runs.iter().filter(|r| r.non_converged.iter().any(|&b| b)).count(),
                });
            }
        }
        out
    }

    pub fn summary(&self, ratio: f64, method: Method) -> Option<MethodSummary> {
        self.summaries().into_iter().find(|s| s.ratio == ratio && s.method == method)
    }

    /// Trials in which the upper probe beat the lower one.
    pub fn capacity_ordered_trials(&self) -> usize {
        self.trials.iter().filter(|t| t.capacity_ordered).count()
    }
}

/// SplitMix64-style combination of two seeds.
pub fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn train_all(space: &SearchSpace, data: &LabeledData) -> Result<Vec<TrainedClassifier>> {
    space.configs.par_iter().map(|c| train_classifier(c, data)).collect()
}

fn accuracy_table(
    variant: String,
    models: &[TrainedClassifier],
    test: &LabeledData,
) -> Result<(AccuracyTable, Vec<bool>)> {
    let chance = 1.0 / f64::from(test.num_labels);
    let accs: Vec<f64> = models.par_iter().map(|m| m.accuracy(test)).collect();
    let entries = models
        .iter()
        .zip(&accs)
        .map(|(m, &accuracy)| ConfigAccuracy {
            config_id: m.config.config_id.clone(),
            params: BTreeMap::from([
                ("width".to_string(), m.config.hidden_width.to_string()),
                ("lr".to_string(), m.config.learning_rate.to_string()),
            ]),
            accuracy,
        })
        .collect();
    let flags = accs.iter().map(|&a| a <= chance + CONVERGENCE_MARGIN).collect();
    Ok((AccuracyTable::new(variant, entries)?, flags))
}

fn positions(ds: &SyntheticDataset, selection: &ProxySelection) -> Result<Vec<usize>> {
    selection
        .kept_train_ids
        .iter()
        .map(|id| match ds.manifest.locate(id) {
            Some((Split::Train, p)) => Ok(p),
            _ => Err(Error::DegenerateInput(format!("selected id `{id}` is not a training sample"))),
        })
        .collect()
}

fn run_trial(config: &ExperimentConfig, seed: u64) -> Result<TrialReport> {
    let ds_spec =
        SyntheticDatasetSpec { seed: mix_seed(config.dataset.seed, seed), ..config.dataset.clone() };
    let ds = generate_dataset(&ds_spec)?;
    let space = config.search_space.build(seed)?;

    let models = train_all(&space, &ds.train)?;
    let (original, original_non_converged) = accuracy_table("original".into(), &models, &ds.test)?;
    let (lower, upper) = (&models[space.lower], &models[space.upper]);
    let outcomes = evaluate_probes(lower, upper, &ds)?;
    let capacity_ordered = outcomes.accuracy_of(1) > outcomes.accuracy_of(0);
    if !capacity_ordered {
        log::warn!(
            "seed {seed}: upper probe `{}` ({}) does not beat lower probe `{}` ({})",
            upper.config.config_id,
            outcomes.accuracy_of(1),
            lower.config.config_id,
            outcomes.accuracy_of(0)
        );
    }

    let features = if config.methods.contains(&Method::Ours) {
        let dim = upper.model.penultimate_dim();
        Some((
            FeatureMatrix::new(ds.manifest.train_ids().to_vec(), dim, upper.features(&ds.train))?,
            FeatureMatrix::new(ds.manifest.test_ids().to_vec(), dim, upper.features(&ds.test))?,
        ))
    } else {
        None
    };

    let mut runs = Vec::new();
    let mut case_counts = None;
    for (ri, &ratio) in config.ratios.iter().enumerate() {
        for &method in &config.methods {
            let proxy_seed = mix_seed(seed, (ri as u64) << 8 | method as u64);
            let selection = match method {
                Method::Random => uniform_proxy(&ds.manifest, ratio, proxy_seed)?,
                Method::Ours => {
                    let (train_f, test_f) = features.as_ref().expect("features computed for ours");
                    let spec = ProxySpec {
                        target_ratio: ratio,
                        seed: proxy_seed,
                        label_stage: config.proxy.label_stage,
                        constants: config.proxy.constants,
                    };
                    let options =
                        ProxyOptions { spec, metric: config.proxy.metric, pca_dim: config.proxy.pca_dim };
                    let artifacts = generate_data_proxy(&ds.manifest, &outcomes, train_f, test_f, &options)?;
                    case_counts = Some(artifacts.case_counts());
                    artifacts.selection
                }
            };
            let subset = ds.train.subset(&positions(&ds, &selection)?);
            let retrained = train_all(&space, &subset)?;
            let variant = format!("{}% ({method})", ratio * 100.0);
            let (accuracies, non_converged) = accuracy_table(variant, &retrained, &ds.test)?;
            let report = ranking_report(&original, &accuracies)?;
            runs.push(ProxyRun {
                ratio,
                method,
                proxy_size: selection.len(),
                accuracies,
                non_converged,
                report,
            });
        }
    }

    Ok(TrialReport {
        seed,
        original,
        original_non_converged,
        lower_id: lower.config.config_id.clone(),
        upper_id: upper.config.config_id.clone(),
        capacity_ordered,
        case_counts,
        runs,
    })
}

/// Builds every `(seed, ratio, method)` proxy, retrains the search space on
/// it and compares the resulting ranking against full-data training.
///
/// Trials run in parallel; every number depends only on the config.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.seeds.is_empty() || config.ratios.is_empty() || config.methods.is_empty() {
        return Err(Error::InvalidSpec("experiment needs seeds, ratios and methods".into()));
    }
    for &r in &config.ratios {
        ProxySpec::new(r, 0).validate()?;
    }
    let trials = config.seeds.par_iter().map(|&s| run_trial(config, s)).collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport { config: config.clone(), trials })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_twelve_configs() {
        let space = SearchSpaceSpec::default().build(0).unwrap();
        assert_eq!(space.configs.len(), 12);
        assert_eq!(space.configs[space.lower].config_id, "w0_lr0.05");
        assert_eq!(space.configs[space.upper].config_id, "w64_lr0.2");
    }

    #[test]
    fn unknown_boundary_is_rejected() {
        let spec = SearchSpaceSpec { upper: Some("nope".into()), ..Default::default() };
        assert!(spec.build(0).is_err());
    }

    #[test]
    fn shipped_default_config_matches_builtin() {
        let text = include_str!("../../configs/default.toml");
        let cfg: ExperimentConfig = toml::from_str(text).unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn mix_seed_spreads() {
        assert_ne!(mix_seed(1, 2), mix_seed(2, 1));
        assert_ne!(mix_seed(0, 0), mix_seed(0, 1));
    }
}
