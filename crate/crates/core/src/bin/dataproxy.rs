use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dataproxy::commands::{self, EvalConfig, PipelineConfig, SimulateOverrides};
use dataproxy::features::Metric;
use dataproxy::{Error, ImportanceConstants, LabelStage, ProxyOptions, ProxySpec};

#[derive(Parser)]
#[command(name = "dataproxy", version, about = "Importance-driven data proxies and ranking evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ProxyFlags {
    /// `c1,c2,c3,c4` importance of the four cases.
    #[arg(long)]
    constants: Option<ImportanceConstants>,
    #[arg(long)]
    metric: Option<Metric>,
    /// Principal components kept (default min(64, dim, rows)).
    #[arg(long)]
    pca_dim: Option<usize>,
    /// e.g. `sample-first:0.5` or `label-first:0.2[:mean]`.
    #[arg(long)]
    label_stage: Option<LabelStage>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a proxy from a manifest, probe outcomes and features.
    Gen {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        outcomes: PathBuf,
        #[arg(long)]
        train_features: PathBuf,
        #[arg(long)]
        test_features: PathBuf,
        #[arg(long)]
        ratio: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        proxy: ProxyFlags,
    },
    /// Compare candidate accuracy tables against a reference.
    Eval {
        /// First accuracy column is the reference.
        reference: PathBuf,
        /// Additional candidate tables.
        candidates: Vec<PathBuf>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for per-candidate agreement heatmaps.
        #[arg(long)]
        figure: Option<PathBuf>,
    },
    /// Run the synthetic proxy-vs-random experiment.
    Simulate {
        /// Experiment TOML; the built-in default when omitted.
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        ratios: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Single-seed shorthand for `--seeds`.
        #[arg(long, conflicts_with = "seeds")]
        seed: Option<u64>,
        /// Single-ratio shorthand for `--ratios`.
        #[arg(long, conflicts_with = "ratios")]
        ratio: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        proxy: ProxyFlags,
    },
    /// Draw the agreement heatmap of one candidate column.
    Figure {
        table: PathBuf,
        /// Further tables contributing candidate columns.
        extra: Vec<PathBuf>,
        /// Candidate variant name (default: the second column).
        #[arg(long)]
        candidate: Option<String>,
        /// Output path stem; `.svg` and `.txt` are written.
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Gen { manifest, outcomes, train_features, test_features, ratio, seed, out, proxy } => {
            let mut spec = ProxySpec::new(ratio, seed);
            spec.label_stage = proxy.label_stage;
            if let Some(c) = proxy.constants {
                spec.constants = c;
            }
            let mut options = ProxyOptions::new(spec);
            options.metric = proxy.metric.unwrap_or_default();
            options.pca_dim = proxy.pca_dim;
            let config =
                PipelineConfig { manifest, outcomes, train_features, test_features, options, out_dir: out };
            let (artifacts, selection) = commands::cmd_gen(&config)?;
            let [c1, c2, c3, c4] = artifacts.case_counts();
            println!(
                "selected {} of {} training samples ({} labels kept); cases {c1}/{c2}/{c3}/{c4}; wrote {}",
                selection.len(),
                artifacts.train_importance.len(),
                selection.kept_labels.len(),
                config.out_dir.display()
            );
        }
        Command::Eval { reference, candidates, out, figure } => {
            let to_stdout = out.is_none();
            let result = commands::cmd_eval(&EvalConfig { reference, candidates, out, figure_dir: figure })?;
            if to_stdout {
                print!("{}", result.text);
            } else {
                for r in &result.reports {
                    println!("{r}");
                }
            }
        }
        Command::Simulate { config, ratios, seeds, seed, ratio, out, proxy } => {
            let overrides = SimulateOverrides {
                ratios: ratios.or(ratio.map(|r| vec![r])),
                seeds: seeds.or(seed.map(|s| vec![s])),
                constants: proxy.constants,
                metric: proxy.metric,
                pca_dim: proxy.pca_dim,
                label_stage: proxy.label_stage,
            };
            let report = commands::cmd_simulate(config.as_deref(), &overrides, &out)?;
            print!("{}", dataproxy::formats::render_experiment_summary(&report));
        }
        Command::Figure { table, extra, candidate, out } => {
            let dark = commands::cmd_figure(&table, candidate.as_deref(), &extra, &out)?;
            println!("{dark} flipped cells; wrote {}.svg and {}.txt", out.display(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::new().filter_level(log::LevelFilter::Warn).format_target(false).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            eprint!("error[usage]: {e}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code())
        }
    }
}
