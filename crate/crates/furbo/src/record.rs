//! Run trajectories: per-evaluation rows, per-iteration traces, and the
//! final recommendation, shared by every optimizer.

use crate::error::{Error, Result};
use crate::problem::{
    best_candidate, report_value, EvaluatedSample, Problem, RankKey, ReportKind, SampleSet,
};

/// Identity of one optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub optimizer: String,
    pub problem: String,
    pub seed: u64,
    pub stream_id: u64,
    pub dim: usize,
    pub n_constraints: usize,
    pub budget: usize,
}

/// One true evaluation plus the state of the incumbent after it.
///
/// The incumbent is the best evaluated sample so far across the whole run,
/// restarts included, re-ranked over the full history at every step.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    /// 1-based, strictly increasing up to the budget.
    pub eval_index: usize,
    pub x: Vec<f64>,
    pub f: f64,
    pub c: Vec<f64>,
    pub is_feasible: bool,
    pub incumbent_key: RankKey,
    pub incumbent_kind: ReportKind,
    pub incumbent_value: f64,
    /// Trust-region radius (or cube edge length) at evaluation time; absent
    /// for optimizers without a region.
    pub radius: Option<f64>,
    /// True for evaluations belonging to a post-restart initial design.
    pub restart: bool,
}

/// Per-iteration optimizer internals, for the optional debug trace.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub iteration: usize,
    pub radius: f64,
    pub tr_lo: Vec<f64>,
    pub tr_hi: Vec<f64>,
    pub n_s: usize,
    pub n_f: usize,
    pub incumbent_key: RankKey,
    pub restart: bool,
}

/// Final answer of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Recommendation {
    pub x: Vec<f64>,
    pub f: f64,
    pub c: Vec<f64>,
    pub is_feasible: bool,
    pub kind: ReportKind,
    pub value: f64,
}

/// Full seeded trajectory of one run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub meta: RunMeta,
    pub evals: Vec<EvalRow>,
    pub traces: Vec<IterationTrace>,
    pub recommendation: Recommendation,
}

impl RunRecord {
    /// Structural invariants: contiguous 1-based indices within budget, and
    /// a non-increasing incumbent objective once the feasible tier is
    /// reached.
    pub fn check_invariants(&self) -> Result<()> {
        if self.evals.len() > self.meta.budget {
            return Err(Error::InvalidData(format!(
                "{} evaluations exceed budget {}",
                self.evals.len(),
                self.meta.budget
            )));
        }
        let mut last_feasible_value: Option<f64> = None;
        for (i, row) in self.evals.iter().enumerate() {
            if row.eval_index != i + 1 {
                return Err(Error::InvalidData(format!(
                    "eval_index {} at position {i}",
                    row.eval_index
                )));
            }
            if matches!(row.incumbent_kind, ReportKind::Loss | ReportKind::Objective) {
                if let Some(prev) = last_feasible_value {
                    if row.incumbent_value > prev {
                        return Err(Error::InvalidData(format!(
                            "feasible incumbent regressed at eval {}: {} > {prev}",
                            row.eval_index, row.incumbent_value
                        )));
                    }
                }
                last_feasible_value = Some(row.incumbent_value);
            } else if last_feasible_value.is_some() {
                return Err(Error::InvalidData(format!(
                    "incumbent left the feasible tier at eval {}",
                    row.eval_index
                )));
            }
        }
        Ok(())
    }
}

/// Accumulates rows and the cross-restart incumbent while a run executes.
pub struct RecordBuilder {
    meta: RunMeta,
    history: SampleSet,
    evals: Vec<EvalRow>,
    traces: Vec<IterationTrace>,
}

impl RecordBuilder {
    pub fn new(meta: RunMeta) -> Self {
        Self { meta, history: SampleSet::new(), evals: Vec::new(), traces: Vec::new() }
    }

    pub fn n_evals(&self) -> usize {
        self.evals.len()
    }

    /// Append one evaluation and refresh the incumbent over the full history.
    pub fn push_eval(
        &mut self,
        problem: &Problem,
        sample: &EvaluatedSample,
        radius: Option<f64>,
        restart: bool,
    ) {
        self.history.push(sample.clone());
        let keys = self.history.keys();
        let best = best_candidate(&self.history).expect("history is non-empty");
        let incumbent = self.history.get(best);
        let (kind, value) = report_value(incumbent, problem);
        self.evals.push(EvalRow {
            eval_index: self.evals.len() + 1,
            x: sample.x.clone(),
            f: sample.f,
            c: sample.c.clone(),
            is_feasible: sample.is_feasible(),
            incumbent_key: keys[best],
            incumbent_kind: kind,
            incumbent_value: value,
            radius,
            restart,
        });
    }

    pub fn push_trace(&mut self, trace: IterationTrace) {
        self.traces.push(trace);
    }

    /// Best evaluated sample across the whole run under the feasibility-first
    /// ranking: feasible with minimal objective when any feasible sample
    /// exists, otherwise minimal worst normalized violation.
    pub fn recommendation(&self, problem: &Problem) -> Recommendation {
        let best = best_candidate(&self.history).expect("runs evaluate at least one point");
        let s = self.history.get(best);
        let (kind, value) = report_value(s, problem);
        Recommendation {
            x: s.x.clone(),
            f: s.f,
            c: s.c.clone(),
            is_feasible: s.is_feasible(),
            kind,
            value,
        }
    }

    pub fn finish(self, problem: &Problem) -> RunRecord {
        let recommendation = self.recommendation(problem);
        RunRecord { meta: self.meta, evals: self.evals, traces: self.traces, recommendation }
    }
}
