//! Command-line front end: `run` a campaign, `report` a results directory,
//! or `ablate` a named preset sweep.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use furbo_bench::ablate::{ablation_base, run_ablation, ABLATE_PRESETS};
use furbo_bench::error::Result;
use furbo_bench::experiment::{load_all_runs, run_experiment, ExperimentConfig};
use furbo_bench::export::report;

#[derive(Parser)]
#[command(name = "furbo-bench", version, about = "Constrained Bayesian optimization benchmarks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a benchmark campaign and write per-run records plus a report.
    Run(RunArgs),
    /// Recompute curves.csv and summary.json from stored run records.
    Report {
        /// Results directory produced by `run`.
        #[arg(long)]
        dir: PathBuf,
    },
    /// Run a named one-factor ablation sweep.
    Ablate(AblateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file; command-line flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem family: bbob, keane, or physics.
    #[arg(long)]
    suite: Option<String>,
    /// Comma-separated function or problem names (default: all in suite).
    #[arg(long = "fn", value_delimiter = ',')]
    functions: Option<Vec<String>>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    severity: Option<usize>,
    /// Comma-separated subset of furbo, scbo, random.
    #[arg(long, value_delimiter = ',')]
    optimizers: Option<Vec<String>>,
    /// Repetitions per (optimizer, problem instance).
    #[arg(long)]
    reps: Option<usize>,
    /// Generated instances per function (bbob only).
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluation budget as a multiple of the dimension.
    #[arg(long)]
    budget_multiplier: Option<usize>,
    /// Batch size as a multiple of the dimension.
    #[arg(long)]
    batch_multiplier: Option<usize>,
    /// Output directory for records and reports.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parallel worker threads.
    #[arg(long)]
    workers: Option<usize>,
    /// Also write per-iteration optimizer traces.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct AblateArgs {
    /// One of: doe-size, radius, inspector-pct, batch.
    #[arg(long)]
    preset: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    budget_multiplier: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
}

fn build_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = &args.suite {
        cfg.suite = v.clone();
    }
    if let Some(v) = &args.functions {
        cfg.functions = v.clone();
    }
    if let Some(v) = args.dim {
        cfg.dim = v;
    }
    if let Some(v) = args.severity {
        cfg.severity = v;
    }
    if let Some(v) = &args.optimizers {
        cfg.optimizers = v.clone();
    }
    if let Some(v) = args.reps {
        cfg.n_repetitions = v;
    }
    if let Some(v) = args.instances {
        cfg.n_instances = v;
    }
    if let Some(v) = args.seed {
        cfg.base_seed = v;
    }
    if let Some(v) = args.budget_multiplier {
        cfg.budget_multiplier = v;
    }
    if let Some(v) = args.batch_multiplier {
        cfg.batch_multiplier = v;
    }
    if let Some(v) = &args.out {
        cfg.out_dir = v.clone();
    }
    if let Some(v) = args.workers {
        cfg.workers = v;
    }
    if args.trace {
        cfg.trace = true;
    }
    Ok(cfg)
}

fn print_summary(summary: &furbo_bench::Summary) {
    for setting in &summary.settings {
        println!("{}", setting.problem);
        for o in &setting.optimizers {
            println!(
                "  {:<8} n={:<3} feasible_runs={:<3} final: {}",
                o.optimizer, o.n_runs, o.n_feasible_runs, o.display
            );
        }
        for t in &setting.pairwise {
            println!(
                "  {} vs {}: W={:.1}, p={:.4}{}",
                t.a,
                t.b,
                t.statistic,
                t.p_two_sided,
                if t.significant { " (significant)" } else { "" }
            );
        }
    }
}

fn main_inner() -> Result<()> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run(args) => {
            let cfg = build_config(&args)?;
            let runs = run_experiment(&cfg)?;
            let summary = report(&runs, &cfg.out_dir)?;
            println!(
                "{} runs complete; artifacts in {}",
                runs.len(),
                cfg.out_dir.display()
            );
            print_summary(&summary);
        }
        Cmd::Report { dir } => {
            let runs = load_all_runs(&dir)?;
            let summary = report(&runs, &dir)?;
            println!("report rebuilt from {} runs in {}", runs.len(), dir.display());
            print_summary(&summary);
        }
        Cmd::Ablate(args) => {
            let mut base = ablation_base();
            if let Some(v) = &args.out {
                base.out_dir = v.clone();
            }
            if let Some(v) = args.reps {
                base.n_repetitions = v;
            }
            if let Some(v) = args.seed {
                base.base_seed = v;
            }
            if let Some(v) = args.budget_multiplier {
                base.budget_multiplier = v;
            }
            if let Some(v) = args.workers {
                base.workers = v;
            }
            if !ABLATE_PRESETS.contains(&args.preset.as_str()) {
                return Err(furbo_bench::BenchError::Config(format!(
                    "unknown preset '{}' (expected one of {ABLATE_PRESETS:?})",
                    args.preset
                )));
            }
            let result = run_ablation(&args.preset, &base)?;
            println!(
                "ablation '{}' complete; artifacts in {}",
                result.preset,
                base.out_dir.join(&result.preset).display()
            );
            for v in &result.variants {
                println!(
                    "  {:<6} final: {:.6e} ± {:.6e}",
                    v.label, v.final_mean, v.final_stderr
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
