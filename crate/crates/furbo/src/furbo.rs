//! The main optimizer loop: inspector ranking, trust-region construction,
//! feasibility-filtered Thompson sampling, radius dynamics, and restarts.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gp::{GpFitConfig, SurrogateModel};
use crate::problem::{
    best_candidate, rank_by_values, EvaluatedSample, Problem, RankKey, SampleSet, Tier,
};
use crate::record::{IterationTrace, RecordBuilder, RunMeta, RunRecord};
use crate::region::TrustRegion;
use crate::sampling::{candidates_in_tr, sample_ball, sobol_doe, RngStream};

/// Tuning knobs of one run; all sizes are in raw evaluations.
#[derive(Debug, Clone)]
pub struct FurboConfig {
    /// Initial design size (default `3·D`).
    pub n_init: usize,
    /// Batch size per iteration (default `3·D`); the final batch truncates
    /// to fit the budget exactly.
    pub batch_size: usize,
    /// Total true-evaluation budget (default `30·D`).
    pub budget: usize,
    /// Fraction of top-ranked inspectors spanning the trust region,
    /// in `(0, 1]` (default 0.10).
    pub inspector_pct: f64,
    /// Consecutive improvements that double the radius (default 2).
    pub tau_s: usize,
    /// Consecutive failures that halve the radius (default 3).
    pub tau_f: usize,
    /// Radius at or below which the run restarts (default 5e-8).
    pub r_min: f64,
    /// Inspector-ball radius at the start of the run and after each restart
    /// (default 1, the whole domain).
    pub r_init: f64,
    /// Thompson candidate count per iteration
    /// (default `min(5000, max(2000, 200·D))`).
    pub r_count: usize,
    /// Inspectors sampled per iteration (default `1000·ceil(D/10)`).
    pub n_inspectors: usize,
    /// Standard deviation of the Gaussian directions in the inspector ball
    /// (default 1; the radial factor makes distances sigma-invariant).
    pub sigma: f64,
    pub fit: GpFitConfig,
}

impl FurboConfig {
    pub fn defaults(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self {
            n_init: 3 * dim,
            batch_size: 3 * dim,
            budget: 30 * dim,
            inspector_pct: 0.10,
            tau_s: 2,
            tau_f: 3,
            r_min: 5e-8,
            r_init: 1.0,
            r_count: 5000.min(2000.max(200 * dim)),
            n_inspectors: 1000 * dim.div_ceil(10),
            sigma: 1.0,
            fit: GpFitConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_init == 0 {
            return Err(Error::InvalidConfig("n_init must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be positive".into()));
        }
        if self.budget < self.n_init {
            return Err(Error::InvalidConfig(format!(
                "budget {} is below the initial design size {}",
                self.budget, self.n_init
            )));
        }
        if !(self.inspector_pct > 0.0 && self.inspector_pct <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "inspector_pct {} must lie in (0, 1]",
                self.inspector_pct
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
        if !(self.r_min > 0.0 && self.r_min < 1.0) {
            return Err(Error::InvalidConfig(format!("r_min {} must lie in (0, 1)", self.r_min)));
        }
        if !(self.r_init > self.r_min && self.r_init <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "r_init {} must lie in (r_min, 1]",
                self.r_init
            )));
        }
        if self.n_inspectors == 0 {
            return Err(Error::InvalidConfig("n_inspectors must be positive".into()));
        }
        if self.sigma <= 0.0 {
            return Err(Error::InvalidConfig(format!("sigma {} must be positive", self.sigma)));
        }
        Ok(())
    }
}

/// One surrogate per output: the objective plus each constraint.
pub struct ModelSet {
    pub objective: SurrogateModel,
    pub constraints: Vec<SurrogateModel>,
}

impl ModelSet {
    /// Posterior means over a query set: objective plus per-row constraint
    /// vectors, in the layout the ranking helpers expect.
    pub fn posterior_means(&self, query: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let f = self.objective.posterior_mean(query)?;
        let mut c = vec![vec![0.0; self.constraints.len()]; query.len()];
        for (k, model) in self.constraints.iter().enumerate() {
            let mc = model.posterior_mean(query)?;
            for (row, v) in c.iter_mut().zip(mc) {
                row[k] = v;
            }
        }
        Ok((f, c))
    }
}

/// Fit all surrogates from scratch on the current samples: objective first,
/// then constraints in index order (fixed order keeps runs deterministic).
pub fn fit_models(samples: &SampleSet, cfg: &GpFitConfig, rng: &mut impl Rng) -> Result<ModelSet> {
    if samples.len() == 0 {
        return Err(Error::InvalidData("cannot fit models on an empty sample set".into()));
    }
    let x: Vec<Vec<f64>> = samples.iter().map(|s| s.x.clone()).collect();
    let f: Vec<f64> = samples.iter().map(|s| s.f).collect();
    let objective = SurrogateModel::fit(&x, &f, cfg, rng)?;
    let n_constraints = samples.get(0).c.len();
    let mut constraints = Vec::with_capacity(n_constraints);
    for k in 0..n_constraints {
        let y: Vec<f64> = samples.iter().map(|s| s.c[k]).collect();
        constraints.push(SurrogateModel::fit(&x, &y, cfg, rng)?);
    }
    Ok(ModelSet { objective, constraints })
}

/// Order inspectors by posterior means: predicted-feasible first by
/// predicted objective, predicted-infeasible by worst normalized predicted
/// violation, with normalization recomputed over this population.
pub fn rank_inspectors(inspectors: &[Vec<f64>], models: &ModelSet) -> Result<Vec<usize>> {
    let (f, c) = models.posterior_means(inspectors)?;
    Ok(rank_by_values(&f, &c))
}

/// Bounding box of the top `ceil(pct · N)` ranked inspectors.
pub fn define_trust_region(
    inspectors: &[Vec<f64>],
    ranking: &[usize],
    pct: f64,
) -> TrustRegion {
    assert!(!ranking.is_empty(), "cannot build a trust region from no inspectors");
    let n_best = ((pct * ranking.len() as f64).ceil() as usize).clamp(1, ranking.len());
    TrustRegion::bounding_box(ranking[..n_best].iter().map(|&i| inspectors[i].as_slice()))
}

/// True iff the new incumbent strictly beats the previous one under the
/// feasibility-first ordering.
pub fn improvement_check(prev_best: RankKey, new_best: RankKey) -> bool {
    new_best < prev_best
}

/// Success/failure counters driving the doubling/halving dynamics shared by
/// the ball radius and the cube edge length.
#[derive(Debug, Clone, Copy)]
pub struct CounterDynamics {
    pub tau_s: usize,
    pub tau_f: usize,
    pub max_size: f64,
}

impl CounterDynamics {
    /// Apply one iteration outcome. An improvement zeroes the failure
    /// counter and vice versa; hitting a threshold resizes and resets both.
    pub fn update(&self, size: &mut f64, n_s: &mut usize, n_f: &mut usize, improved: bool) {
        if improved {
            *n_s += 1;
            *n_f = 0;
        } else {
            *n_f += 1;
            *n_s = 0;
        }
        if *n_s >= self.tau_s {
            *size = (2.0 * *size).min(self.max_size);
            *n_s = 0;
            *n_f = 0;
        } else if *n_f >= self.tau_f {
            *size *= 0.5;
            *n_s = 0;
            *n_f = 0;
        }
    }
}

/// Pick `q` distinct candidate indices from per-slot joint realizations.
///
/// `objective_draws[s]` and `constraint_draws[k][s]` hold realization `s`
/// over the shared candidate set. Within a slot, realized-feasible
/// candidates win by realized objective; if none is feasible, the candidate
/// minimizing the worst realized violation wins. A candidate taken by an
/// earlier slot falls through to the slot's next-best choice.
pub(crate) fn select_batch(
    objective_draws: &[Vec<f64>],
    constraint_draws: &[Vec<Vec<f64>>],
    q: usize,
) -> Vec<usize> {
    let m = objective_draws.first().map_or(0, Vec::len);
    assert!(q <= m, "cannot select {q} distinct candidates from {m}");
    let mut taken = vec![false; m];
    let mut picks = Vec::with_capacity(q);
    for s in 0..q {
        let mut best: Option<(usize, RankKey)> = None;
        for i in 0..m {
            if taken[i] {
                continue;
            }
            let worst = constraint_draws
                .iter()
                .map(|d| d[s][i])
                .fold(f64::NEG_INFINITY, f64::max);
            let key = if constraint_draws.is_empty() || worst <= 0.0 {
                RankKey { tier: Tier::Feasible, key: objective_draws[s][i] }
            } else {
                RankKey { tier: Tier::Infeasible, key: worst }
            };
            if best.is_none_or(|(_, b)| key < b) {
                best = Some((i, key));
            }
        }
        let (i, _) = best.expect("q <= m guarantees an unselected candidate");
        taken[i] = true;
        picks.push(i);
    }
    picks
}

/// Draw a shared scrambled-Sobol candidate set in the trust region and fill
/// the batch slot by slot from independent joint posterior realizations.
pub fn thompson_select(
    models: &ModelSet,
    tr: &TrustRegion,
    q: usize,
    r_count: usize,
    rng: &mut impl Rng,
) -> Result<Vec<Vec<f64>>> {
    if q > r_count {
        return Err(Error::InvalidConfig(format!(
            "batch size {q} exceeds the candidate count {r_count}"
        )));
    }
    let candidates = candidates_in_tr(tr, r_count, rng)?;
    // One model's joint draw is materialized at a time to bound memory.
    let objective_draws = models.objective.sample_joint(&candidates, q, rng)?;
    let mut constraint_draws = Vec::with_capacity(models.constraints.len());
    for model in &models.constraints {
        constraint_draws.push(model.sample_joint(&candidates, q, rng)?);
    }
    let picks = select_batch(&objective_draws, &constraint_draws, q);
    Ok(picks.into_iter().map(|i| candidates[i].clone()).collect())
}

/// Run the optimizer to budget exhaustion; deterministic in `stream`.
pub fn furbo_run(problem: &Problem, config: &FurboConfig, stream: RngStream) -> Result<RunRecord> {
    config.validate()?;
    let dim = problem.dim();
    let mut rng = stream.rng();
    let mut builder = RecordBuilder::new(RunMeta {
        optimizer: "furbo".into(),
        problem: problem.name().into(),
        seed: stream.seed,
        stream_id: stream.stream_id,
        dim,
        n_constraints: problem.n_constraints(),
        budget: config.budget,
    });
    let dynamics =
        CounterDynamics { tau_s: config.tau_s, tau_f: config.tau_f, max_size: 1.0 };

    let mut samples = SampleSet::new();
    let mut radius = config.r_init;
    let (mut n_s, mut n_f) = (0usize, 0usize);

    let evaluate_batch = |points: &[Vec<f64>],
                          builder: &mut RecordBuilder,
                          samples: &mut SampleSet,
                          radius: f64,
                          restart: bool|
     -> Result<()> {
        for x in points {
            let s: EvaluatedSample = problem.evaluate(x)?;
            builder.push_eval(problem, &s, Some(radius), restart);
            samples.push(s.clone());
        }
        Ok(())
    };

    let doe = sobol_doe(config.n_init, dim, &mut rng)?;
    evaluate_batch(&doe, &mut builder, &mut samples, radius, false)?;
    let mut models = fit_models(&samples, &config.fit, &mut rng)?;

    let mut iteration = 0usize;
    while builder.n_evals() < config.budget {
        iteration += 1;
        let best = best_candidate(&samples).expect("sample set is non-empty");
        let prev_key = samples.keys()[best];
        let center = samples.get(best).x.clone();

        let inspectors =
            sample_ball(&center, radius, config.n_inspectors, config.sigma, &mut rng);
        let ranking = rank_inspectors(&inspectors, &models)?;
        let tr = define_trust_region(&inspectors, &ranking, config.inspector_pct);

        let q = config.batch_size.min(config.budget - builder.n_evals());
        let batch = thompson_select(&models, &tr, q, config.r_count, &mut rng)?;
        evaluate_batch(&batch, &mut builder, &mut samples, radius, false)?;
        models = fit_models(&samples, &config.fit, &mut rng)?;

        let new_best = best_candidate(&samples).expect("sample set is non-empty");
        let new_key = samples.keys()[new_best];
        let improved = improvement_check(prev_key, new_key);
        dynamics.update(&mut radius, &mut n_s, &mut n_f, improved);

        let mut restarted = false;
        if radius <= config.r_min && builder.n_evals() < config.budget {
            restarted = true;
            radius = config.r_init;
            n_s = 0;
            n_f = 0;
            // Fresh start: new design, models rebuilt from it alone. The
            // cross-restart incumbent lives in the record builder.
            samples = SampleSet::new();
            let n_doe = config.n_init.min(config.budget - builder.n_evals());
            let doe = sobol_doe(n_doe, dim, &mut rng)?;
            evaluate_batch(&doe, &mut builder, &mut samples, radius, true)?;
            models = fit_models(&samples, &config.fit, &mut rng)?;
        }

        builder.push_trace(IterationTrace {
            iteration,
            radius,
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
