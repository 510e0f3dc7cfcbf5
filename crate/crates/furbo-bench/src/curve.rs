//! Convergence aggregation with the infeasibility-penalty convention: runs
//! that have not yet found a feasible point sit at the worst objective value
//! observed across every compared method on the same problem setting.

use furbo::RunRecord;

use crate::error::{BenchError, Result};

/// One run reduced to per-evaluation report-scale values and feasibility
/// flags. Values are losses (`f - f_opt`) when the problem's optimum is
/// known, raw objectives otherwise.
#[derive(Debug, Clone)]
pub struct RunSeries {
    pub values: Vec<f64>,
    pub feasible: Vec<bool>,
}

impl RunSeries {
    pub fn new(values: Vec<f64>, feasible: Vec<bool>) -> Self {
        assert_eq!(values.len(), feasible.len(), "parallel series must align");
        Self { values, feasible }
    }

    pub fn from_record(record: &RunRecord, optimum: Option<f64>) -> Self {
        let shift = optimum.unwrap_or(0.0);
        Self {
            values: record.evals.iter().map(|r| r.f - shift).collect(),
            feasible: record.evals.iter().map(|r| r.is_feasible).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Best feasible value so far at each evaluation, or `penalty` before
    /// the first feasible point; monotone non-increasing once feasible.
    pub fn penalized_incumbents(&self, penalty: f64) -> Vec<f64> {
        let mut best: Option<f64> = None;
        self.values
            .iter()
            .zip(&self.feasible)
            .map(|(&v, &feas)| {
                if feas && best.is_none_or(|b| v < b) {
                    best = Some(v);
                }
                best.unwrap_or(penalty)
            })
            .collect()
    }

    /// Final penalized incumbent; the scalar entering tables and tests.
    pub fn final_value(&self, penalty: f64) -> f64 {
        *self
            .penalized_incumbents(penalty)
            .last()
            .expect("series must be non-empty")
    }

    pub fn any_feasible(&self) -> bool {
        self.feasible.iter().any(|&f| f)
    }
}

/// The penalty constant: worst (largest) observed value over the union of
/// all compared runs, feasible or not.
pub fn worst_observed<'a>(all: impl IntoIterator<Item = &'a RunSeries>) -> f64 {
    all.into_iter()
        .flat_map(|s| s.values.iter().copied())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Mean and standard error of the penalized incumbent across runs, per
/// evaluation index.
#[derive(Debug, Clone)]
pub struct ConvergenceCurve {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

pub fn penalized_best_curve(runs: &[RunSeries], penalty: f64) -> Result<ConvergenceCurve> {
    if runs.is_empty() {
        return Err(BenchError::Config("cannot aggregate zero runs".into()));
    }
    let budget = runs[0].len();
    if budget == 0 || runs.iter().any(|r| r.len() != budget) {
        return Err(BenchError::Config(
            "all aggregated runs must share one non-empty budget".into(),
        ));
    }
    let incumbents: Vec<Vec<f64>> =
        runs.iter().map(|r| r.penalized_incumbents(penalty)).collect();
    let n = runs.len() as f64;
    let mut mean = Vec::with_capacity(budget);
    let mut stderr = Vec::with_capacity(budget);
    for t in 0..budget {
        let m = incumbents.iter().map(|inc| inc[t]).sum::<f64>() / n;
        // Sample standard deviation (ddof 1); a single run has no spread.
        let se = if runs.len() < 2 {
            0.0
        } else {
            let var =
                incumbents.iter().map(|inc| (inc[t] - m).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        };
        mean.push(m);
        stderr.push(se);
    }
    Ok(ConvergenceCurve { mean, stderr })
}
