//! Problem abstraction and feasibility-first ranking.
//!
//! Optimizers work exclusively in the unit cube `[0,1]^D`; a [`Problem`] owns
//! the affine map to its native domain and the objective/constraint callbacks.
//! Constraints follow the `c_k(x) <= 0` convention: a point is feasible iff
//! every constraint value is non-positive.
//!
//! Ranking is feasibility-first: feasible samples ordered by objective value,
//! then infeasible samples ordered by their worst *normalized* constraint
//! violation, where each constraint column is rescaled by its largest
//! magnitude over the infeasible samples so that no single badly-scaled
//! constraint dominates the ordering.

use crate::error::{Error, Result};

/// A box-bounded constrained minimization problem.
///
/// Callbacks receive points in the native domain (after de-normalization
/// from the unit cube).
pub struct Problem {
    name: String,
    bounds: Vec<(f64, f64)>,
    n_constraints: usize,
    objective: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    constraints: Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
    optimum_value: Option<f64>,
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        bounds: Vec<(f64, f64)>,
        n_constraints: usize,
        objective: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        constraints: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        assert!(!bounds.is_empty(), "problem must have at least one variable");
        assert!(
            bounds.iter().all(|(lo, hi)| lo.is_finite() && hi.is_finite() && lo <= hi),
            "bounds must be finite with lo <= hi"
        );
        Self {
            name: name.into(),
            bounds,
            n_constraints,
            objective: Box::new(objective),
            constraints: Box::new(constraints),
            optimum_value: None,
        }
    }

    /// Attach a known optimal objective value, enabling loss reporting.
    pub fn with_optimum(mut self, value: f64) -> Self {
        self.optimum_value = Some(value);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.n_constraints
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn optimum_value(&self) -> Option<f64> {
        self.optimum_value
    }

    /// Map a unit-cube point to the native domain.
    pub fn to_domain(&self, x_unit: &[f64]) -> Vec<f64> {
        x_unit
            .iter()
            .zip(&self.bounds)
            .map(|(u, (lo, hi))| lo + u * (hi - lo))
            .collect()
    }

    /// Evaluate objective and all constraints at a unit-cube point.
    ///
    /// Exactly one call consumes exactly one unit of evaluation budget;
    /// callers count budget by the number of samples they hold.
    pub fn evaluate(&self, x_unit: &[f64]) -> Result<EvaluatedSample> {
        if x_unit.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x_unit.len() });
        }
        for (i, &u) in x_unit.iter().enumerate() {
            if !(0.0..=1.0).contains(&u) {
                return Err(Error::OutOfDomain { index: i, value: u });
            }
        }
        let x = self.to_domain(x_unit);
        let f = (self.objective)(&x);
        let c = (self.constraints)(&x);
        debug_assert_eq!(c.len(), self.n_constraints);
        Ok(EvaluatedSample { x: x_unit.to_vec(), f, c })
    }
}

/// One evaluated point: unit-cube coordinates, objective, constraint values.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedSample {
    pub x: Vec<f64>,
    pub f: f64,
    pub c: Vec<f64>,
}

impl EvaluatedSample {
    pub fn is_feasible(&self) -> bool {
        self.c.iter().all(|&v| v <= 0.0)
    }

    pub fn max_violation(&self) -> f64 {
        max_violation(&self.c)
    }
}

/// Worst clipped violation `max_k max(0, c_k)`; zero iff feasible.
pub fn max_violation(c: &[f64]) -> f64 {
    c.iter().fold(0.0_f64, |acc, &v| acc.max(v.max(0.0)))
}

/// Feasibility tier; feasible always orders before infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tier {
    Feasible,
    Infeasible,
}

/// Lexicographic sort key: `(tier, key)` with `key` the objective value for
/// feasible samples and the worst normalized violation for infeasible ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankKey {
    pub tier: Tier,
    pub key: f64,
}

impl RankKey {
    pub fn feasible(f: f64) -> Self {
        Self { tier: Tier::Feasible, key: f }
    }

    pub fn infeasible(v: f64) -> Self {
        Self { tier: Tier::Infeasible, key: v }
    }
}

impl Eq for RankKey {}

impl PartialOrd for RankKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RankKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.tier.cmp(&other.tier).then_with(|| self.key.total_cmp(&other.key))
    }
}

/// Scale each constraint column by its largest magnitude over the given rows,
/// preserving sign. Columns that are identically zero are left as zeros.
///
/// Rows are expected to be the violation vectors of the *infeasible* samples
/// under consideration; normalization constants are always recomputed from
/// the rows passed in, never cached.
pub fn normalize_violations(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let k = rows[0].len();
    let mut scale = vec![0.0_f64; k];
    for row in rows {
        assert_eq!(row.len(), k, "ragged violation matrix");
        for (s, &v) in scale.iter_mut().zip(row) {
            *s = s.max(v.abs());
        }
    }
    rows.iter()
        .map(|row| {
            row.iter()
                .zip(&scale)
                .map(|(&v, &s)| if s > 0.0 { v / s } else { 0.0 })
                .collect()
        })
        .collect()
}

/// Rank keys for a population given objective values and constraint rows.
///
/// Used both for true evaluated samples and for model-predicted values at
/// inspector points; the normalization is recomputed for each call from the
/// infeasible members of this population alone.
pub fn rank_keys(f: &[f64], c: &[Vec<f64>]) -> Vec<RankKey> {
    assert_eq!(f.len(), c.len(), "objective/constraint length mismatch");
    let infeasible: Vec<usize> =
        (0..f.len()).filter(|&i| c[i].iter().any(|&v| v > 0.0)).collect();
    let infeasible_rows: Vec<Vec<f64>> =
        infeasible.iter().map(|&i| c[i].clone()).collect();
    let normalized = normalize_violations(&infeasible_rows);

    let mut keys: Vec<RankKey> = f.iter().map(|&fi| RankKey::feasible(fi)).collect();
    for (pos, &i) in infeasible.iter().enumerate() {
        let v = normalized[pos].iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        keys[i] = RankKey::infeasible(v);
    }
    keys
}

/// Stable argsort of a population by its rank keys (best first).
pub fn rank_by_values(f: &[f64], c: &[Vec<f64>]) -> Vec<usize> {
    let keys = rank_keys(f, c);
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    order
}

/// A growing collection of evaluated samples.
#[derive(Debug, Clone, Default)]
pub struct SampleSet {
    samples: Vec<EvaluatedSample>,
}

impl SampleSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, s: EvaluatedSample) {
        self.samples.push(s);
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &EvaluatedSample> {
        self.samples.iter()
    }

    pub fn get(&self, i: usize) -> &EvaluatedSample {
        &self.samples[i]
    }

    pub fn feasible_count(&self) -> usize {
        self.samples.iter().filter(|s| s.is_feasible()).count()
    }

    fn values(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        let f = self.samples.iter().map(|s| s.f).collect();
        let c = self.samples.iter().map(|s| s.c.clone()).collect();
        (f, c)
    }

    /// Rank keys under the current population's normalization.
    pub fn keys(&self) -> Vec<RankKey> {
        let (f, c) = self.values();
        rank_keys(&f, &c)
    }
}

/// Stable feasibility-first ranking of a sample set, best first.
pub fn rank_samples(set: &SampleSet) -> Vec<usize> {
    let (f, c) = set.values();
    rank_by_values(&f, &c)
}

/// Index of the best sample under [`rank_samples`], `None` for an empty set.
pub fn best_candidate(set: &SampleSet) -> Option<usize> {
    rank_samples(set).first().copied()
}

/// How a recommendation's scalar quality is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    /// Feasible and the problem has a known optimum: `f - f_opt`.
    Loss,
    /// Feasible, no known optimum: raw objective.
    Objective,
    /// Infeasible: worst clipped violation.
    Violation,
}

impl ReportKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReportKind::Loss => "loss",
            ReportKind::Objective => "objective",
            ReportKind::Violation => "violation",
        }
    }
}

/// Scalar quality of a sample for reporting, on the scale given by the kind.
pub fn report_value(sample: &EvaluatedSample, problem: &Problem) -> (ReportKind, f64) {
    if sample.is_feasible() {
        match problem.optimum_value() {
            Some(opt) => (ReportKind::Loss, sample.f - opt),
            None => (ReportKind::Objective, sample.f),
        }
    } else {
        (ReportKind::Violation, sample.max_violation())
    }
}
