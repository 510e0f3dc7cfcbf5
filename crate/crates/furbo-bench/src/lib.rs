//! Experiment harness for the `furbo` optimizer crate: seeded campaigns
//! over benchmark suites, penalized convergence aggregation, rank-sum
//! significance testing, ablation sweeps, and CSV/JSON artifacts.

pub mod ablate;
pub mod curve;
pub mod error;
pub mod experiment;
pub mod export;
pub mod stats;

pub use ablate::{ablate_variants, ablation_base, run_ablation, AblationReport};
pub use curve::{penalized_best_curve, worst_observed, ConvergenceCurve, RunSeries};
pub use error::{BenchError, Result};
pub use experiment::{
    build_problems, derive_seed, load_all_runs, plan_tasks, run_experiment, ExperimentConfig,
    StoredRun,
};
pub use export::{build_curves, export_results, report, summarize, Summary};
pub use stats::{rank_sum_test, Method, RankSum};
