//! Ablation presets: one-factor sweeps over the optimizer's knobs on a
//! fixed hard benchmark, with curves penalized against the sweep's union.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::curve::{penalized_best_curve, worst_observed, ConvergenceCurve, RunSeries};
use crate::error::{BenchError, Result};
use crate::experiment::{run_experiment, ExperimentConfig};
use crate::export::run_series;

pub const ABLATE_PRESETS: [&str; 4] = ["doe-size", "radius", "inspector-pct", "batch"];

/// Default subject for ablations: a single ill-conditioned 10-dimensional
/// instance with a dense constraint set, optimized by `furbo` alone.
pub fn ablation_base() -> ExperimentConfig {
    ExperimentConfig {
        suite: "bbob".into(),
        functions: vec!["bent_cigar".into()],
        dim: 10,
        severity: 4,
        optimizers: vec!["furbo".into()],
        n_instances: 1,
        ..ExperimentConfig::default()
    }
}

#[derive(Debug, Clone)]
pub struct AblateVariant {
    pub label: String,
    pub config: ExperimentConfig,
}

/// Expand a preset into labeled configurations, each with its own output
/// subdirectory under `<out>/<preset>/<label>`.
pub fn ablate_variants(preset: &str, base: &ExperimentConfig) -> Result<Vec<AblateVariant>> {
    let mut variants = Vec::new();
    let mut push = |label: String, mutate: &dyn Fn(&mut ExperimentConfig)| {
        let mut config = base.clone();
        mutate(&mut config);
        config.out_dir = base.out_dir.join(preset).join(&label);
        variants.push(AblateVariant { label, config });
    };
    match preset {
        "doe-size" => {
            for mult in [1usize, 3, 5, 10] {
                let n = mult * base.dim;
                push(format!("{mult}d"), &move |c| c.n_init = Some(n));
            }
        }
        "radius" => {
            for r in [1.0, 0.5, 0.2, 0.1, 0.05] {
                push(format!("r{r:.2}"), &move |c| c.r_init = Some(r));
            }
        }
        "inspector-pct" => {
            for pct in [1usize, 5, 10, 20] {
                push(format!("p{pct:02}"), &move |c| {
                    c.inspector_pct = Some(pct as f64 / 100.0)
                });
            }
        }
        "batch" => {
            push("b1".into(), &|c| c.batch_size = Some(1));
            for mult in [1usize, 2, 3, 4, 5] {
                let q = mult * base.dim;
                push(format!("b{mult}d"), &move |c| c.batch_size = Some(q));
            }
        }
        other => {
            return Err(BenchError::Config(format!(
                "unknown ablation preset '{other}' (expected one of {ABLATE_PRESETS:?})"
            )))
        }
    }
    Ok(variants)
}

#[derive(Debug, Clone, Serialize)]
pub struct VariantResult {
    pub label: String,
    pub final_mean: f64,
    pub final_stderr: f64,
    #[serde(skip)]
    pub curve: ConvergenceCurve,
}

#[derive(Debug, Clone, Serialize)]
pub struct AblationReport {
    pub preset: String,
    /// Worst observed value across every variant, used to penalize all runs.
    pub penalty: f64,
    pub variants: Vec<VariantResult>,
}

#[derive(Serialize)]
struct AblateCsvRow<'a> {
    label: &'a str,
    eval_index: usize,
    mean: f64,
    stderr: f64,
}

/// Run every variant of a preset and aggregate curves with a penalty shared
/// across the whole sweep, so variants are compared on one scale.
pub fn run_ablation(preset: &str, base: &ExperimentConfig) -> Result<AblationReport> {
    let variants = ablate_variants(preset, base)?;
    let mut all_series: Vec<Vec<RunSeries>> = Vec::with_capacity(variants.len());
    for v in &variants {
        let runs = run_experiment(&v.config)?;
        all_series.push(runs.iter().map(run_series).collect());
    }
    let penalty = worst_observed(all_series.iter().flatten());

    let mut results = Vec::with_capacity(variants.len());
    for (v, series) in variants.iter().zip(&all_series) {
        let curve = penalized_best_curve(series, penalty)?;
        let finals: Vec<f64> = series.iter().map(|s| s.final_value(penalty)).collect();
        let n = finals.len() as f64;
        let mean = finals.iter().sum::<f64>() / n;
        let stderr = if finals.len() < 2 {
            0.0
        } else {
            let var = finals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        };
        results.push(VariantResult {
            label: v.label.clone(),
            final_mean: mean,
            final_stderr: stderr,
            curve,
        });
    }

    let report = AblationReport {
        preset: preset.to_string(),
        penalty,
        variants: results,
    };
    write_ablation_artifacts(&report, &base.out_dir.join(preset))?;
    Ok(report)
}

fn write_ablation_artifacts(report: &AblationReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("ablate_curves.csv"))?;
    for v in &report.variants {
        for (i, (&mean, &stderr)) in v.curve.mean.iter().zip(&v.curve.stderr).enumerate() {
            w.serialize(AblateCsvRow {
                label: &v.label,
                eval_index: i + 1,
                mean,
                stderr,
            })?;
        }
    }
    w.flush()?;
    fs::write(
        dir.join("ablate_summary.json"),
        serde_json::to_string_pretty(report)?,
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    #[test]
    fn presets_expand_to_the_documented_grids() {
        let mut base = ablation_base();
        base.out_dir = PathBuf::from("out");

        let doe = ablate_variants("doe-size", &base).unwrap();
        assert_eq!(
            doe.iter().map(|v| v.config.n_init.unwrap()).collect::<Vec<_>>(),
            vec![10, 30, 50, 100]
        );
        assert_eq!(doe[1].label, "3d");
        assert_eq!(doe[1].config.out_dir, PathBuf::from("out/doe-size/3d"));

        let radius = ablate_variants("radius", &base).unwrap();
        assert_eq!(
            radius.iter().map(|v| v.config.r_init.unwrap()).collect::<Vec<_>>(),
            vec![1.0, 0.5, 0.2, 0.1, 0.05]
        );
        assert_eq!(radius[4].label, "r0.05");

        let pct = ablate_variants("inspector-pct", &base).unwrap();
        assert_eq!(
            pct.iter().map(|v| v.config.inspector_pct.unwrap()).collect::<Vec<_>>(),
            vec![0.01, 0.05, 0.10, 0.20]
        );

        let batch = ablate_variants("batch", &base).unwrap();
        assert_eq!(
            batch.iter().map(|v| v.config.batch_size.unwrap()).collect::<Vec<_>>(),
            vec![1, 10, 20, 30, 40, 50]
        );
        assert_eq!(batch[0].label, "b1");

        assert!(ablate_variants("nonsense", &base).is_err());
    }

    #[test]
    fn ablation_base_targets_the_hard_instance() {
        let base = ablation_base();
        assert_eq!(base.functions, vec!["bent_cigar".to_string()]);
        assert_eq!((base.dim, base.severity, base.n_instances), (10, 4, 1));
        assert_eq!(base.optimizers, vec!["furbo".to_string()]);
    }

    #[test]
    fn tiny_sweep_runs_end_to_end_with_a_shared_penalty() {
        let dir = std::env::temp_dir()
            .join(format!("furbo-ablate-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        let base = ExperimentConfig {
            suite: "bbob".into(),
            functions: vec!["sphere".into()],
            dim: 2,
            severity: 0,
            optimizers: vec!["furbo".into()],
            n_repetitions: 1,
            n_instances: 1,
            base_seed: 3,
            budget: Some(24),
            batch_size: Some(4),
            n_init: Some(4),
            gp_restarts: Some(0),
            gp_max_steps: Some(10),
            out_dir: dir.clone(),
            ..ExperimentConfig::default()
        };
        let report = run_ablation("doe-size", &base).unwrap();
        assert_eq!(report.variants.len(), 4);
        for v in &report.variants {
            assert_eq!(v.curve.mean.len(), 24);
            assert!(v.final_mean.is_finite());
            // Shared penalty bounds every curve from above.
            assert!(v.curve.mean.iter().all(|&m| m <= report.penalty + 1e-12));
        }
        assert!(dir.join("doe-size/ablate_curves.csv").exists());
        assert!(dir.join("doe-size/ablate_summary.json").exists());
        assert!(dir.join("doe-size/3d/runs").exists());
        fs::remove_dir_all(&dir).unwrap();
    }
}
