//! Result artifacts: per-evaluation CSV, aggregated convergence curves,
//! and a JSON summary with pairwise significance tests.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use furbo::problem::max_violation;

use crate::curve::{penalized_best_curve, worst_observed, ConvergenceCurve, RunSeries};
use crate::error::{BenchError, Result};
use crate::experiment::StoredRun;
use crate::stats::{rank_sum_test, Method};

/// Two-sided significance threshold reported in the summary metadata.
pub const ALPHA: f64 = 0.05;

/// Aggregated curve for one optimizer on one problem setting.
#[derive(Debug, Clone)]
pub struct SettingCurve {
    pub setting: String,
    pub optimizer: String,
    pub penalty: f64,
    pub curve: ConvergenceCurve,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizerSummary {
    pub optimizer: String,
    pub n_runs: usize,
    /// Runs that evaluated at least one feasible point.
    pub n_feasible_runs: usize,
    /// Mean final penalized value; absent when no run found a feasible point.
    pub mean: Option<f64>,
    pub stderr: Option<f64>,
    /// Table-style cell: "mean ± stderr" or "n/a".
    pub display: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairwiseTest {
    pub a: String,
    pub b: String,
    pub statistic: f64,
    pub p_two_sided: f64,
    pub method: String,
    pub significant: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SettingSummary {
    pub problem: String,
    pub optimizers: Vec<OptimizerSummary>,
    pub pairwise: Vec<PairwiseTest>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub alpha: f64,
    pub settings: Vec<SettingSummary>,
}

impl Summary {
    pub fn setting(&self, problem: &str) -> Option<&SettingSummary> {
        self.settings.iter().find(|s| s.problem == problem)
    }
}

impl SettingSummary {
    pub fn optimizer(&self, name: &str) -> Option<&OptimizerSummary> {
        self.optimizers.iter().find(|o| o.optimizer == name)
    }

    pub fn pair(&self, a: &str, b: &str) -> Option<&PairwiseTest> {
        self.pairwise
            .iter()
            .find(|t| (t.a == a && t.b == b) || (t.a == b && t.b == a))
    }
}

pub fn run_series(run: &StoredRun) -> RunSeries {
    let shift = run.optimum.unwrap_or(0.0);
    RunSeries::new(
        run.evals.iter().map(|e| e.f - shift).collect(),
        run.evals.iter().map(|e| e.is_feasible).collect(),
    )
}

/// Group runs by problem setting, preserving alphabetical order.
fn by_setting(runs: &[StoredRun]) -> BTreeMap<&str, Vec<&StoredRun>> {
    let mut groups: BTreeMap<&str, Vec<&StoredRun>> = BTreeMap::new();
    for run in runs {
        groups.entry(run.setting.as_str()).or_default().push(run);
    }
    groups
}

fn by_optimizer<'a>(runs: &[&'a StoredRun]) -> BTreeMap<&'a str, Vec<&'a StoredRun>> {
    let mut groups: BTreeMap<&str, Vec<&StoredRun>> = BTreeMap::new();
    for run in runs {
        groups.entry(run.optimizer.as_str()).or_default().push(run);
    }
    groups
}

/// Shared penalty for one setting: the worst value observed by any compared
/// run, on the reporting scale.
pub fn setting_penalty(runs: &[&StoredRun]) -> f64 {
    let series: Vec<RunSeries> = runs.iter().map(|r| run_series(r)).collect();
    worst_observed(series.iter())
}

/// One mean/stderr curve per (setting, optimizer), each penalized by the
/// worst value across every optimizer compared on that setting.
pub fn build_curves(runs: &[StoredRun]) -> Result<Vec<SettingCurve>> {
    let mut out = Vec::new();
    for (setting, group) in by_setting(runs) {
        let penalty = setting_penalty(&group);
        for (optimizer, opt_runs) in by_optimizer(&group) {
            let series: Vec<RunSeries> = opt_runs.iter().map(|r| run_series(r)).collect();
            let curve = penalized_best_curve(&series, penalty)?;
            out.push(SettingCurve {
                setting: setting.to_string(),
                optimizer: optimizer.to_string(),
                penalty,
                curve,
            });
        }
    }
    Ok(out)
}

/// Final penalized value of every run for one optimizer group.
fn final_values(opt_runs: &[&StoredRun], penalty: f64) -> Vec<f64> {
    opt_runs.iter().map(|r| run_series(r).final_value(penalty)).collect()
}

/// Table-style summary: per-optimizer final mean ± standard error and all
/// pairwise rank-sum tests, per setting.
pub fn summarize(runs: &[StoredRun]) -> Summary {
    let mut settings = Vec::new();
    for (setting, group) in by_setting(runs) {
        let penalty = setting_penalty(&group);
        let groups = by_optimizer(&group);
        let names: Vec<&str> = groups.keys().copied().collect();

        let mut optimizers = Vec::new();
        for (&optimizer, opt_runs) in &groups {
            let n_feasible_runs =
                opt_runs.iter().filter(|r| run_series(r).any_feasible()).count();
            let finals = final_values(opt_runs, penalty);
            let (mean, stderr, display) = if n_feasible_runs == 0 {
                (None, None, "n/a".to_string())
            } else {
                let n = finals.len() as f64;
                let mean = finals.iter().sum::<f64>() / n;
                let stderr = if finals.len() < 2 {
                    0.0
                } else {
                    let var = finals.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                        / (n - 1.0);
                    (var / n).sqrt()
                };
                (Some(mean), Some(stderr), format!("{mean:.6e} ± {stderr:.6e}"))
            };
            optimizers.push(OptimizerSummary {
                optimizer: optimizer.to_string(),
                n_runs: opt_runs.len(),
                n_feasible_runs,
                mean,
                stderr,
                display,
            });
        }

        let mut pairwise = Vec::new();
        for (i, &a) in names.iter().enumerate() {
            for &b in &names[i + 1..] {
                let fa = final_values(&groups[a], penalty);
                let fb = final_values(&groups[b], penalty);
                let test = rank_sum_test(&fa, &fb);
                pairwise.push(PairwiseTest {
                    a: a.to_string(),
                    b: b.to_string(),
                    statistic: test.statistic,
                    p_two_sided: test.p_two_sided,
                    method: match test.method {
                        Method::Exact => "exact".to_string(),
                        Method::NormalApprox => "normal_approx".to_string(),
                    },
                    significant: test.p_two_sided < ALPHA,
                });
            }
        }

        settings.push(SettingSummary {
            problem: setting.to_string(),
            optimizers,
            pairwise,
        });
    }
    Summary { alpha: ALPHA, settings }
}

#[derive(Serialize, Deserialize)]
struct RunsCsvRow {
    run_id: String,
    optimizer: String,
    problem: String,
    instance: usize,
    seed: u64,
    eval_index: usize,
    f: f64,
    is_feasible: bool,
    max_violation: f64,
    incumbent_value: f64,
    incumbent_kind: String,
    radius: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct CurvesCsvRow {
    problem: String,
    optimizer: String,
    eval_index: usize,
    mean: f64,
    stderr: f64,
}

/// Write `runs.csv`, `curves.csv`, and `summary.json` into `dir`.
pub fn export_results(
    runs: &[StoredRun],
    curves: &[SettingCurve],
    summary: &Summary,
    dir: &Path,
) -> Result<()> {
    fs::create_dir_all(dir)?;

    let mut w = csv::Writer::from_path(dir.join("runs.csv"))?;
    for run in runs {
        for eval in &run.evals {
            w.serialize(RunsCsvRow {
                run_id: run.run_id.clone(),
                optimizer: run.optimizer.clone(),
                problem: run.setting.clone(),
                instance: run.instance,
                seed: run.seed,
                eval_index: eval.eval_index,
                f: eval.f,
                is_feasible: eval.is_feasible,
                max_violation: max_violation(&eval.c),
                incumbent_value: eval.incumbent_value,
                incumbent_kind: eval.incumbent_kind.clone(),
                radius: eval.radius,
            })?;
        }
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("curves.csv"))?;
    for sc in curves {
        for (i, (&mean, &stderr)) in sc.curve.mean.iter().zip(&sc.curve.stderr).enumerate() {
            w.serialize(CurvesCsvRow {
                problem: sc.setting.clone(),
                optimizer: sc.optimizer.clone(),
                eval_index: i + 1,
                mean,
                stderr,
            })?;
        }
    }
    w.flush()?;

    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(summary)?)?;
    Ok(())
}

/// Compute curves and the summary from stored runs and write all artifacts.
pub fn report(runs: &[StoredRun], dir: &Path) -> Result<Summary> {
    if runs.is_empty() {
        return Err(BenchError::Config("no runs to report".into()));
    }
    let curves = build_curves(runs)?;
    let summary = summarize(runs);
    export_results(runs, &curves, &summary, dir)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{StoredEval, StoredRecommendation};

    /// Hand-build a stored run from raw objective values and feasibility
    /// flags; one synthetic constraint keeps the fields mutually consistent.
    fn synth_run(
        optimizer: &str,
        setting: &str,
        rep: usize,
        fs: &[f64],
        feasible: &[bool],
        optimum: Option<f64>,
    ) -> StoredRun {
        assert_eq!(fs.len(), feasible.len());
        let shift = optimum.unwrap_or(0.0);
        let mut best_feasible: Option<f64> = None;
        let mut best_violation = f64::INFINITY;
        let mut evals = Vec::new();
        for (i, (&f, &ok)) in fs.iter().zip(feasible).enumerate() {
            let c = if ok { vec![-1.0] } else { vec![1.0] };
            if ok {
                best_feasible = Some(best_feasible.map_or(f, |b: f64| b.min(f)));
            } else {
                best_violation = best_violation.min(1.0);
            }
            let (tier, key, kind, value) = match best_feasible {
                Some(b) => {
                    let kind = if optimum.is_some() { "loss" } else { "objective" };
                    ("feasible", b, kind, b - shift)
                }
                None => ("infeasible", best_violation, "violation", best_violation),
            };
            evals.push(StoredEval {
                eval_index: i + 1,
                x: vec![0.5, 0.5],
                f,
                c,
                is_feasible: ok,
                incumbent_tier: tier.into(),
                incumbent_key: key,
                incumbent_kind: kind.into(),
                incumbent_value: value,
                radius: Some(1.0),
                restart: false,
            });
        }
        let last = evals.last().unwrap().clone();
        StoredRun {
            run_id: format!("{optimizer}__{setting}_i0__r{rep:03}"),
            optimizer: optimizer.into(),
            problem_key: format!("{setting}_i0"),
            setting: setting.into(),
            instance: 0,
            rep,
            seed: rep as u64,
            dim: 2,
            n_constraints: 1,
            budget: fs.len(),
            optimum,
            evals,
            recommendation: StoredRecommendation {
                x: vec![0.5, 0.5],
                f: last.f,
                c: last.c,
                is_feasible: last.is_feasible,
                kind: last.incumbent_kind,
                value: last.incumbent_value,
            },
        }
    }

    fn temp_dir(tag: &str) -> std::path::PathBuf {
        let dir =
            std::env::temp_dir().join(format!("furbo-export-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        dir
    }

    #[test]
    fn curves_share_the_worst_value_across_optimizers() {
        // Optimizer "a" never sees the worst value 9.0; "b" does. Both
        // penalize their infeasible prefixes with 9.0.
        let runs = vec![
            synth_run("a", "toy", 0, &[5.0, 3.0], &[false, true], None),
            synth_run("b", "toy", 0, &[9.0, 4.0], &[false, true], None),
        ];
        let curves = build_curves(&runs).unwrap();
        assert_eq!(curves.len(), 2);
        for sc in &curves {
            assert_eq!(sc.penalty, 9.0);
            assert_eq!(sc.curve.mean[0], 9.0);
        }
        let a = curves.iter().find(|c| c.optimizer == "a").unwrap();
        assert_eq!(a.curve.mean[1], 3.0);
    }

    #[test]
    fn zero_feasible_group_reports_not_available() {
        let runs = vec![
            synth_run("a", "toy", 0, &[5.0, 3.0], &[false, false], None),
            synth_run("a", "toy", 1, &[6.0, 2.0], &[false, false], None),
            synth_run("b", "toy", 0, &[4.0, 1.0], &[true, true], None),
        ];
        let summary = summarize(&runs);
        let setting = summary.setting("toy").unwrap();
        let a = setting.optimizer("a").unwrap();
        assert_eq!(a.display, "n/a");
        assert!(a.mean.is_none() && a.stderr.is_none());
        assert_eq!(a.n_feasible_runs, 0);
        let b = setting.optimizer("b").unwrap();
        assert_eq!(b.n_feasible_runs, 1);
        assert_eq!(b.mean, Some(1.0));
    }

    #[test]
    fn summary_means_match_hand_computation() {
        // Finals: a -> {2.0, 4.0}; mean 3.0, sd sqrt(2), se 1.0.
        let runs = vec![
            synth_run("a", "toy", 0, &[5.0, 2.0], &[true, true], None),
            synth_run("a", "toy", 1, &[4.0, 6.0], &[true, true], None),
        ];
        let summary = summarize(&runs);
        let a = summary.setting("toy").unwrap().optimizer("a").unwrap();
        assert_eq!(a.mean, Some(3.0));
        assert!((a.stderr.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(a.n_runs, 2);
    }

    #[test]
    fn significance_flag_follows_the_threshold() {
        // Strongly separated finals across 10 + 10 runs -> significant;
        // identical finals -> not.
        let mut runs = Vec::new();
        for rep in 0..10 {
            let lo = rep as f64 * 0.01;
            runs.push(synth_run("a", "toy", rep, &[lo, lo], &[true, true], None));
            runs.push(synth_run("b", "toy", rep, &[100.0 + lo, 100.0 + lo], &[true, true], None));
            runs.push(synth_run("c", "toy", rep, &[100.0 + lo, 100.0 + lo], &[true, true], None));
        }
        let summary = summarize(&runs);
        let setting = summary.setting("toy").unwrap();
        let ab = setting.pair("a", "b").unwrap();
        assert!(ab.p_two_sided < ALPHA && ab.significant);
        let bc = setting.pair("b", "c").unwrap();
        assert!(bc.p_two_sided > ALPHA && !bc.significant);
        assert_eq!(summary.alpha, ALPHA);
    }

    #[test]
    fn runs_csv_round_trips_into_matching_curves() {
        // Mixed optima across (synthetic) instances exercise the loss-scale
        // shift; recomputing the curves from the CSV must agree.
        let mut runs = vec![
            synth_run("a", "toy", 0, &[5.0, 3.0, 2.5], &[false, true, true], Some(1.0)),
            synth_run("a", "toy", 1, &[7.0, 6.0, 2.0], &[false, false, true], Some(1.0)),
            synth_run("b", "toy", 0, &[9.0, 4.0, 3.0], &[false, true, false], Some(1.0)),
        ];
        runs[1].run_id = "a__toy_i1__r001".into();
        let dir = temp_dir("roundtrip");
        let summary = report(&runs, &dir).unwrap();
        assert!(summary.setting("toy").is_some());

        // Rebuild per-run series from runs.csv; optima come from the stored
        // runs, keyed by run_id.
        let mut rows: BTreeMap<String, Vec<(usize, f64, bool)>> = BTreeMap::new();
        let mut reader = csv::Reader::from_path(dir.join("runs.csv")).unwrap();
        for row in reader.deserialize::<RunsCsvRow>() {
            let row = row.unwrap();
            rows.entry(row.run_id).or_default().push((
                row.eval_index,
                row.f,
                row.is_feasible,
            ));
        }
        let rebuilt: Vec<StoredRun> = runs
            .iter()
            .map(|r| {
                let mut r2 = r.clone();
                let mut parsed = rows[&r.run_id].clone();
                parsed.sort_by_key(|&(i, _, _)| i);
                for (eval, &(_, f, ok)) in r2.evals.iter_mut().zip(&parsed) {
                    eval.f = f;
                    eval.is_feasible = ok;
                }
                r2
            })
            .collect();
        let recomputed = build_curves(&rebuilt).unwrap();

        let mut reader = csv::Reader::from_path(dir.join("curves.csv")).unwrap();
        let mut n_rows = 0;
        for row in reader.deserialize::<CurvesCsvRow>() {
            let row = row.unwrap();
            let sc = recomputed
                .iter()
                .find(|c| c.setting == row.problem && c.optimizer == row.optimizer)
                .unwrap();
            assert!((sc.curve.mean[row.eval_index - 1] - row.mean).abs() < 1e-9);
            assert!((sc.curve.stderr[row.eval_index - 1] - row.stderr).abs() < 1e-9);
            n_rows += 1;
        }
        assert_eq!(n_rows, 2 * 3); // 2 optimizers x 3 evals
        fs::remove_dir_all(&dir).unwrap();
    }
}
