use std::fmt::Write as _;

use super::format_line;
use crate::harness::ExperimentReport;
use crate::ranking::RankingReport;

fn header(kind: &str, inputs: &[(String, String)]) -> String {
    let mut out = format_line(kind);
    for (name, digest) in inputs {
        writeln!(out, "#input\t{name}\t{digest}").unwrap();
    }
    out
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".into(), |v| v.to_string())
}

fn flags(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Ranking reports of several candidates against one reference, preceded
/// by `#input<TAB>name<TAB>sha256` lines.
pub fn render_ranking_reports(inputs: &[(String, String)], reports: &[RankingReport]) -> String {
    let mut out = header("dataproxy-ranking", inputs);
    out.push_str(
        "reference\tcandidate\tpearson\tspearman\tkendall_tau_a\tflipped_pairs\ttied_pairs\tbest_preserved\treference_best\tcandidate_best\n",
    );
    for r in reports {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.reference,
            r.candidate,
            opt(r.pearson),
            opt(r.spearman),
            opt(r.kendall_tau_a),
            r.flipped_pair_count,
            r.tied_pair_count,
            r.best_preserved(),
            r.best.reference_best.as_deref().unwrap_or("NA"),
            r.best.candidate_best.as_deref().unwrap_or("NA"),
        )
        .unwrap();
    }
    out
}

/// One row per `(seed, ratio, method)` proxy run.
pub fn render_experiment_runs(inputs: &[(String, String)], report: &ExperimentReport) -> String {
    let mut out = header("dataproxy-experiment-runs", inputs);
    out.push_str("seed\tratio\tmethod\tproxy_size\tpearson\tspearman\tkendall_tau_a\tflipped_pairs\ttied_pairs\tbest_preserved\treference_best\tcandidate_best\tcapacity_ordered\tnon_converged\n");
    for t in &report.trials {
        for r in &t.runs {
            let rep = &r.report;
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                t.seed,
                r.ratio,
                r.method,
                r.proxy_size,
                opt(rep.pearson),
                opt(rep.spearman),
                opt(rep.kendall_tau_a),
                rep.flipped_pair_count,
                rep.tied_pair_count,
                rep.best_preserved(),
                rep.best.reference_best.as_deref().unwrap_or("NA"),
                rep.best.candidate_best.as_deref().unwrap_or("NA"),
                t.capacity_ordered,
                flags(&r.non_converged),
            )
            .unwrap();
        }
    }
    out
}

/// Every accuracy of every trial, original and proxies, in long form.
pub fn render_experiment_accuracies(inputs: &[(String, String)], report: &ExperimentReport) -> String {
    let mut out = header("dataproxy-experiment-accuracy", inputs);
    out.push_str("seed\tvariant\tconfig_id\taccuracy\tnon_converged\n");
    for t in &report.trials {
        let tables = std::iter::once((&t.original, &t.original_non_converged))
            .chain(t.runs.iter().map(|r| (&r.accuracies, &r.non_converged)));
        for (table, nc) in tables {
            for (e, flag) in table.entries().iter().zip(nc) {
                writeln!(out, "{}\t{}\t{}\t{}\t{}", t.seed, table.variant, e.config_id, e.accuracy, flag)
                    .unwrap();
            }
        }
    }
    out
}

/// Human-readable digest of the experiment.
pub fn render_experiment_summary(report: &ExperimentReport) -> String {
    let fmt = |v: Option<f64>| v.map_or_else(|| "n/a".into(), |v| format!("{v:.4}"));
    let mut out = String::new();
    writeln!(out, "<!-- format: dataproxy-experiment-summary {} -->", super::FORMAT_VERSION).unwrap();
    out.push_str("# Proxy ranking experiment\n\n");
    let ds = &report.config.dataset;
    writeln!(
        out,
        "Dataset: {} labels, {} train / {} test per label, dim {}, spread {}, overlap {}, {} modes per label.",
        ds.num_labels,
        ds.samples_per_label_train,
        ds.samples_per_label_test,
        ds.feature_dim,
        ds.cluster_spread,
        ds.label_overlap,
        ds.modes_per_label
    )
    .unwrap();
    let seeds: Vec<String> = report.config.seeds.iter().map(u64::to_string).collect();
    writeln!(out, "Seeds: {}.", seeds.join(", ")).unwrap();
    writeln!(
        out,
        "Upper probe beat lower probe in {} of {} trials.\n",
        report.capacity_ordered_trials(),
        report.trials.len()
    )
    .unwrap();
    out.push_str("| ratio | method | runs | mean Pearson | mean Spearman | best preserved | mean flipped pairs | runs with non-converged configs |\n");
    out.push_str("|---|---|---|---|---|---|---|---|\n");
    let summaries = report.summaries();
    for s in &summaries {
        writeln!(
            out,
            "| {} | {} | {} | {} | {} | {:.2} | {:.2} | {} |",
            s.ratio,
            s.method,
            s.runs,
            fmt(s.mean_pearson),
            fmt(s.mean_spearman),
            s.best_preserved_rate,
            s.mean_flipped_pairs,
            s.non_converged_runs
        )
        .unwrap();
    }
    for &ratio in &report.config.ratios {
        let get = |m| summaries.iter().find(|s| s.ratio == ratio && s.method == m);
        if let (Some(o), Some(r)) = (get(crate::harness::Method::Ours), get(crate::harness::Method::Random)) {
            if let (Some(a), Some(b)) = (o.mean_spearman, r.mean_spearman) {
                writeln!(
                    out,
                    "\nRatio {ratio}: Spearman margin (ours − random) {:+.4}, best-preserved margin {:+.2}.",
                    a - b,
                    o.best_preserved_rate - r.best_preserved_rate
                )
                .unwrap();
            }
        }
    }
    out
}
