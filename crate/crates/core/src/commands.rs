//! The operations behind the `dataproxy` binary, usable directly from
//! library code. Each one reads and writes the artifacts of
//! [`crate::formats`] and is deterministic in its inputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::Metric;
use crate::formats::{self, file_digest, sha256_hex, write_atomic};
use crate::harness::{
    evaluate_probes, generate_dataset, run_experiment, train_classifier, ExperimentConfig, ExperimentReport,
    SearchSpaceSpec, SyntheticDatasetSpec,
};
use crate::pipeline::{generate_data_proxy, ProxyArtifacts, ProxyOptions};
use crate::ranking::{
    agreement_matrix, ranking_report, render_agreement_figure, AccuracyTable, RankingReport,
};
use crate::resample::ProxySelection;

pub const SELECTION_FILE: &str = "selection.txt";
pub const TRAIN_IMPORTANCE_FILE: &str = "train_importance.tsv";
pub const TEST_IMPORTANCE_FILE: &str = "test_importance.tsv";
pub const PROVENANCE_FILE: &str = "provenance.json";

/// Inputs and parameters of one proxy generation.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub manifest: PathBuf,
    pub outcomes: PathBuf,
    pub train_features: PathBuf,
    pub test_features: PathBuf,
    pub options: ProxyOptions,
    pub out_dir: PathBuf,
}

#[derive(Serialize)]
struct ProvenanceRecord<'a> {
    format: &'static str,
    version: u32,
    method: &'a str,
    spec: &'a crate::resample::ProxySpec,
    metric: Metric,
    pca_dim: usize,
    case_counts: [usize; 4],
    kept_labels: Vec<u32>,
    selected: usize,
    inputs: &'a BTreeMap<String, String>,
    outputs: BTreeMap<&'static str, String>,
}

fn digest_inputs(named: &[(&str, &Path)]) -> Result<BTreeMap<String, String>> {
    named.iter().map(|(k, p)| Ok((k.to_string(), file_digest(p)?))).collect()
}

/// Runs the whole proxy procedure over on-disk artifacts and writes the
/// selection, both importance tables and a provenance record into
/// `out_dir`.
pub fn cmd_gen(config: &PipelineConfig) -> Result<(ProxyArtifacts, ProxySelection)> {
    let manifest = formats::read_manifest(&config.manifest)?;
    let outcomes = formats::read_outcomes(&config.outcomes, &manifest)?;
    let train = formats::read_features(&config.train_features)?;
    let test = formats::read_features(&config.test_features)?;
    let id_check = |path: &Path, fm: &crate::features::FeatureMatrix, expected: &[crate::SampleId]| {
        fm.ensure_ids(expected).map_err(|e| formats_validation(path, "ids", e))
    };
    id_check(&config.train_features, &train, manifest.train_ids())?;
    id_check(&config.test_features, &test, manifest.test_ids())?;
    if train.dim() != test.dim() {
        return Err(Error::Validation {
            file: config.train_features.clone(),
            field: "dim".into(),
            message: format!("{} differs from the test features' {}", train.dim(), test.dim()),
        });
    }

    let artifacts = generate_data_proxy(&manifest, &outcomes, &train, &test, &config.options)?;
    let inputs = digest_inputs(&[
        ("manifest", &config.manifest),
        ("outcomes", &config.outcomes),
        ("train_features", &config.train_features),
        ("test_features", &config.test_features),
    ])?;
    let mut selection = artifacts.selection.clone();
    selection.provenance.inputs = inputs.clone();

    let selection_text = formats::render_selection(&selection);
    let train_text = formats::render_importance(&artifacts.train_importance);
    let test_text = formats::render_importance(&artifacts.test_importance);
    let record = ProvenanceRecord {
        format: "dataproxy-provenance",
        version: formats::FORMAT_VERSION,
        method: &selection.provenance.method,
        spec: &config.options.spec,
        metric: config.options.metric,
        pca_dim: artifacts.pca.output_dim(),
        case_counts: artifacts.case_counts(),
        kept_labels: selection.kept_labels.iter().copied().collect(),
        selected: selection.len(),
        inputs: &inputs,
        outputs: BTreeMap::from([
            (SELECTION_FILE, sha256_hex(selection_text.as_bytes())),
            (TRAIN_IMPORTANCE_FILE, sha256_hex(train_text.as_bytes())),
            (TEST_IMPORTANCE_FILE, sha256_hex(test_text.as_bytes())),
        ]),
    };
    let mut provenance = serde_json::to_string_pretty(&record).expect("provenance serializes");
    provenance.push('\n');

    let out = &config.out_dir;
    write_atomic(&out.join(SELECTION_FILE), selection_text.as_bytes())?;
    write_atomic(&out.join(TRAIN_IMPORTANCE_FILE), train_text.as_bytes())?;
    write_atomic(&out.join(TEST_IMPORTANCE_FILE), test_text.as_bytes())?;
    write_atomic(&out.join(PROVENANCE_FILE), provenance.as_bytes())?;
    Ok((artifacts, selection))
}

fn formats_validation(path: &Path, field: &str, e: Error) -> Error {
    Error::Validation { file: path.to_path_buf(), field: field.into(), message: e.to_string() }
}

/// What `cmd_eval` compares and where it writes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalConfig {
    /// Its first accuracy column is the reference; further columns are
    /// candidates.
    pub reference: PathBuf,
    /// Extra candidate files; every column is a candidate.
    pub candidates: Vec<PathBuf>,
    /// Report destination; `None` leaves writing to the caller.
    pub out: Option<PathBuf>,
    /// Directory for one SVG heatmap and text grid per candidate.
    pub figure_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalOutput {
    pub reports: Vec<RankingReport>,
    /// The report file contents.
    pub text: String,
}

/// File-system friendly form of a variant name, e.g. `5% (ours)` →
/// `5pct_ours`.
pub fn variant_slug(variant: &str) -> String {
    let mut s = String::new();
    for c in variant.replace('%', "pct").chars() {
        if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
            s.push(c);
        } else if !s.ends_with('_') {
            s.push('_');
        }
    }
    let t = s.trim_matches('_');
    if t.is_empty() {
        "variant".into()
    } else {
        t.to_string()
    }
}

/// Compares every candidate accuracy table against the reference.
pub fn cmd_eval(config: &EvalConfig) -> Result<EvalOutput> {
    let mut tables = formats::read_accuracy_tables(&config.reference)?;
    let reference = tables.remove(0);
    let mut inputs = vec![(file_name(&config.reference), file_digest(&config.reference)?)];
    for path in &config.candidates {
        tables.extend(formats::read_accuracy_tables(path)?);
        inputs.push((file_name(path), file_digest(path)?));
    }
    if tables.is_empty() {
        return Err(Error::ConfigMismatch("no candidate tables to compare".into()));
    }
    let reports = tables.iter().map(|t| ranking_report(&reference, t)).collect::<Result<Vec<_>>>()?;
    let text = formats::render_ranking_reports(&inputs, &reports);
    if let Some(out) = &config.out {
        write_atomic(out, text.as_bytes())?;
    }
    if let Some(dir) = &config.figure_dir {
        for t in &tables {
            write_figure(&reference, t, &dir.join(variant_slug(&t.variant)))?;
        }
    }
    Ok(EvalOutput { reports, text })
}

fn file_name(p: &Path) -> String {
    p.file_name().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// Writes `<stem>.svg` and `<stem>.txt`; the reference best configuration
/// is highlighted. Returns the number of flipped cells.
fn write_figure(reference: &AccuracyTable, candidate: &AccuracyTable, stem: &Path) -> Result<usize> {
    let matrix = agreement_matrix(reference, candidate)?;
    let best = crate::ranking::best_config_preserved(reference, candidate)?;
    let highlight =
        best.reference_best.as_deref().and_then(|b| matrix.config_ids().iter().position(|id| id == b));
    let title = format!("{} vs {}", candidate.variant, reference.variant);
    let fig = render_agreement_figure(&matrix, highlight, &title);
    write_atomic(&stem.with_extension("svg"), fig.svg.as_bytes())?;
    write_atomic(&stem.with_extension("txt"), fig.grid.as_bytes())?;
    Ok(fig.dark_cells)
}

/// Renders the agreement heatmap of the candidate column named `candidate`
/// (the second column when `None`) against the first column of `table`.
/// Writes `out` with `.svg` and `.txt` extensions.
pub fn cmd_figure(table: &Path, candidate: Option<&str>, extra: &[PathBuf], out: &Path) -> Result<usize> {
    let mut tables = formats::read_accuracy_tables(table)?;
    for p in extra {
        tables.extend(formats::read_accuracy_tables(p)?);
    }
    let reference = tables.remove(0);
    let chosen = match candidate {
        Some(name) => tables.iter().find(|t| t.variant == name).ok_or_else(|| {
            let known: Vec<&str> = tables.iter().map(|t| t.variant.as_str()).collect();
            Error::ConfigMismatch(format!("no candidate `{name}`; available: {known:?}"))
        })?,
        None => tables.first().ok_or_else(|| Error::ConfigMismatch("no candidate column to draw".into()))?,
    };
    write_figure(&reference, chosen, out)
}

/// Overrides applied on top of an experiment config file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimulateOverrides {
    pub ratios: Option<Vec<f64>>,
    pub seeds: Option<Vec<u64>>,
    pub constants: Option<crate::ImportanceConstants>,
    pub metric: Option<Metric>,
    pub pca_dim: Option<usize>,
    pub label_stage: Option<crate::LabelStage>,
}

pub const EXPERIMENT_CONFIG_FILE: &str = "experiment.toml";
pub const RUNS_FILE: &str = "runs.tsv";
pub const ACCURACY_FILE: &str = "accuracies.tsv";
pub const SUMMARY_FILE: &str = "summary.md";

pub fn load_experiment_config(path: Option<&Path>) -> Result<ExperimentConfig> {
    match path {
        None => Ok(ExperimentConfig::default()),
        Some(p) => {
            let text = formats::read_text(p)?;
            toml::from_str(&text).map_err(|e| Error::Validation {
                file: p.to_path_buf(),
                field: "config".into(),
                message: e.to_string(),
            })
        }
    }
}

/// Runs the experiment described by `config` (plus overrides) and writes
/// the resolved config, per-run ranking rows, every accuracy and a
/// markdown summary into `out_dir`.
pub fn cmd_simulate(
    config: Option<&Path>,
    overrides: &SimulateOverrides,
    out_dir: &Path,
) -> Result<ExperimentReport> {
    let mut cfg = load_experiment_config(config)?;
    if let Some(r) = &overrides.ratios {
        cfg.ratios = r.clone();
    }
    if let Some(s) = &overrides.seeds {
        cfg.seeds = s.clone();
    }
    if let Some(c) = overrides.constants {
        cfg.proxy.constants = c;
    }
    if let Some(m) = overrides.metric {
        cfg.proxy.metric = m;
    }
    if let Some(d) = overrides.pca_dim {
        cfg.proxy.pca_dim = Some(d);
    }
    if let Some(l) = overrides.label_stage {
        cfg.proxy.label_stage = Some(l);
    }
    let resolved = toml::to_string(&cfg).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let report = run_experiment(&cfg)?;
    let inputs = vec![(EXPERIMENT_CONFIG_FILE.to_string(), sha256_hex(resolved.as_bytes()))];
    write_atomic(&out_dir.join(EXPERIMENT_CONFIG_FILE), resolved.as_bytes())?;
    write_atomic(&out_dir.join(RUNS_FILE), formats::render_experiment_runs(&inputs, &report).as_bytes())?;
    write_atomic(
        &out_dir.join(ACCURACY_FILE),
        formats::render_experiment_accuracies(&inputs, &report).as_bytes(),
    )?;
    write_atomic(&out_dir.join(SUMMARY_FILE), formats::render_experiment_summary(&report).as_bytes())?;
    Ok(report)
}

/// Paths written by [`export_probe_artifacts`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeArtifactPaths {
    pub manifest: PathBuf,
    pub outcomes: PathBuf,
    pub train_features: PathBuf,
    pub test_features: PathBuf,
}

/// Trains the two boundary probes of `space` on a synthetic dataset and
/// exports everything [`cmd_gen`] consumes: manifest, probe outcomes and
/// the upper probe's penultimate features for both splits (binary).
pub fn export_probe_artifacts(
    dataset: &SyntheticDatasetSpec,
    space: &SearchSpaceSpec,
    seed: u64,
    dir: &Path,
) -> Result<ProbeArtifactPaths> {
    let ds = generate_dataset(dataset)?;
    let space = space.build(seed)?;
    let lower = train_classifier(&space.configs[space.lower], &ds.train)?;
    let upper = train_classifier(&space.configs[space.upper], &ds.train)?;
    let outcomes = evaluate_probes(&lower, &upper, &ds)?;
    let dim = upper.model.penultimate_dim();
    let train = crate::features::FeatureMatrix::new(
        ds.manifest.train_ids().to_vec(),
        dim,
        upper.features(&ds.train),
    )?;
    let test =
        crate::features::FeatureMatrix::new(ds.manifest.test_ids().to_vec(), dim, upper.features(&ds.test))?;
    let paths = ProbeArtifactPaths {
        manifest: dir.join("manifest.jsonl"),
        outcomes: dir.join("outcomes.tsv"),
        train_features: dir.join("train_features.bin"),
        test_features: dir.join("test_features.bin"),
    };
    formats::write_manifest(&paths.manifest, &ds.manifest)?;
    formats::write_outcomes(&paths.outcomes, &outcomes)?;
    formats::write_features_binary(&paths.train_features, &train)?;
    formats::write_features_binary(&paths.test_features, &test)?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert_eq!(variant_slug("5% (ours)"), "5pct_ours");
        assert_eq!(variant_slug("100% (original)"), "100pct_original");
        assert_eq!(variant_slug("///"), "variant");
    }
}
