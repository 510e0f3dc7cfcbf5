//! Baseline optimizers sharing the surrogate, sampling, and ranking
//! infrastructure: a cube trust-region method and plain random search.

use crate::error::{Error, Result};
use crate::furbo::{fit_models, improvement_check, thompson_select, CounterDynamics};
use crate::gp::GpFitConfig;
use crate::problem::{best_candidate, Problem, SampleSet};
use crate::record::{IterationTrace, RecordBuilder, RunMeta, RunRecord};
use crate::region::TrustRegion;
use crate::sampling::{sobol_doe, uniform_points, RngStream};

/// Cube trust-region baseline configuration. The edge-length constants
/// follow the usual trust-region lineage defaults.
#[derive(Debug, Clone)]
pub struct ScboConfig {
    pub n_init: usize,
    pub batch_size: usize,
    pub budget: usize,
    /// Initial cube edge length (default 0.8).
    pub l_init: f64,
    /// Edge length at or below which the procedure reinitializes
    /// (default `0.5^7 * 0.8`).
    pub l_min: f64,
    /// Doubling cap for the edge length (default 1.6).
    pub l_max: f64,
    pub tau_s: usize,
    pub tau_f: usize,
    pub r_count: usize,
    pub fit: GpFitConfig,
}

impl ScboConfig {
    pub fn defaults(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self {
            n_init: 3 * dim,
            batch_size: 3 * dim,
            budget: 30 * dim,
            l_init: 0.8,
            l_min: 0.5_f64.powi(7) * 0.8,
            l_max: 1.6,
            tau_s: 2,
            tau_f: 3,
            r_count: 5000.min(2000.max(200 * dim)),
            fit: GpFitConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_init == 0 || self.batch_size == 0 {
            return Err(Error::InvalidConfig("design and batch sizes must be positive".into()));
        }
        if self.budget < self.n_init {
            return Err(Error::InvalidConfig(format!(
                "budget {} is below the initial design size {}",
                self.budget, self.n_init
            )));
        }
        if !(0.0 < self.l_min && self.l_min < self.l_init && self.l_init <= self.l_max) {
            return Err(Error::InvalidConfig(format!(
                "edge lengths must satisfy 0 < l_min < l_init <= l_max, got {} / {} / {}",
                self.l_min, self.l_init, self.l_max
            )));
        }
        if self.batch_size > self.r_count {
            return Err(Error::InvalidConfig(format!(
                "batch_size {} exceeds the candidate count {}",
                self.batch_size, self.r_count
            )));
        }
        if self.tau_s == 0 || self.tau_f == 0 {
            return Err(Error::InvalidConfig("counter thresholds must be positive".into()));
        }
        Ok(())
    }
}

/// Axis-aligned cube `[center - L/2, center + L/2]` clipped to the unit
/// cube; the same edge length applies to every dimension.
pub fn scbo_trust_region(center: &[f64], l: f64) -> TrustRegion {
    assert!(l > 0.0, "edge length must be positive");
    let half = 0.5 * l;
    TrustRegion::new(
        center.iter().map(|c| c - half).collect(),
        center.iter().map(|c| c + half).collect(),
    )
}

/// Run the cube trust-region baseline; identical run contract (and initial
/// design, given the same stream) as the main optimizer.
pub fn scbo_run(problem: &Problem, config: &ScboConfig, stream: RngStream) -> Result<RunRecord> {
    config.validate()?;
    let dim = problem.dim();
    let mut rng = stream.rng();
    let mut builder = RecordBuilder::new(RunMeta {
        optimizer: "scbo".into(),
        problem: problem.name().into(),
        seed: stream.seed,
        stream_id: stream.stream_id,
        dim,
        n_constraints: problem.n_constraints(),
        budget: config.budget,
    });
    let dynamics =
        CounterDynamics { tau_s: config.tau_s, tau_f: config.tau_f, max_size: config.l_max };

    let mut samples = SampleSet::new();
    let mut edge = config.l_init;
    let (mut n_s, mut n_f) = (0usize, 0usize);

    let doe = sobol_doe(config.n_init, dim, &mut rng)?;
    for x in &doe {
        let s = problem.evaluate(x)?;
        builder.push_eval(problem, &s, Some(edge), false);
        samples.push(s);
    }
    let mut models = fit_models(&samples, &config.fit, &mut rng)?;

    let mut iteration = 0usize;
    while builder.n_evals() < config.budget {
        iteration += 1;
        let best = best_candidate(&samples).expect("sample set is non-empty");
        let prev_key = samples.keys()[best];
        // Center on the best feasible sample, or the sample with the
        // smallest worst normalized violation when nothing is feasible.
        let tr = scbo_trust_region(&samples.get(best).x, edge);

        let q = config.batch_size.min(config.budget - builder.n_evals());
        let batch = thompson_select(&models, &tr, q, config.r_count, &mut rng)?;
        for x in &batch {
            let s = problem.evaluate(x)?;
            builder.push_eval(problem, &s, Some(edge), false);
            samples.push(s);
        }
        models = fit_models(&samples, &config.fit, &mut rng)?;

        let new_best = best_candidate(&samples).expect("sample set is non-empty");
        let new_key = samples.keys()[new_best];
        let improved = improvement_check(prev_key, new_key);
        dynamics.update(&mut edge, &mut n_s, &mut n_f, improved);

        let mut restarted = false;
        if edge <= config.l_min && builder.n_evals() < config.budget {
            restarted = true;
            edge = config.l_init;
            n_s = 0;
            n_f = 0;
            samples = SampleSet::new();
            let n_doe = config.n_init.min(config.budget - builder.n_evals());
            let doe = sobol_doe(n_doe, dim, &mut rng)?;
            for x in &doe {
                let s = problem.evaluate(x)?;
                builder.push_eval(problem, &s, Some(edge), true);
                samples.push(s);
            }
            models = fit_models(&samples, &config.fit, &mut rng)?;
        }

        builder.push_trace(IterationTrace {
            iteration,
            radius: edge,
            tr_lo: tr.lo().to_vec(),
            tr_hi: tr.hi().to_vec(),
            n_s,
            n_f,
            incumbent_key: new_key,
            restart: restarted,
        });
    }
    let record = builder.finish(problem);
    debug_assert!(record.check_invariants().is_ok());
    Ok(record)
}

/// Uniform random search over the unit cube; the weakest baseline and the
/// sanity floor for every comparison.
pub fn random_search_run(
    problem: &Problem,
    budget: usize,
    stream: RngStream,
) -> Result<RunRecord> {
    if budget == 0 {
        return Err(Error::InvalidConfig("budget must be positive".into()));
    }
    let mut rng = stream.rng();
    let mut builder = RecordBuilder::new(RunMeta {
        optimizer: "random".into(),
        problem: problem.name().into(),
        seed: stream.seed,
        stream_id: stream.stream_id,
        dim: problem.dim(),
        n_constraints: problem.n_constraints(),
        budget,
    });
    for x in uniform_points(budget, problem.dim(), &mut rng) {
        let s = problem.evaluate(&x)?;
        builder.push_eval(problem, &s, None, false);
    }
    let record = builder.finish(problem);
    debug_assert!(record.check_invariants().is_ok());
    Ok(record)
}
