//! Campaign orchestration: seeded repetition grids over problems and
//! optimizers, incremental persistence with resumption, and a worker pool.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use serde::{Deserialize, Serialize};

use furbo::bench::{physics_problem, BaseFunction, BbobInstance, PHYSICS_NAMES};
use furbo::problem::{ReportKind, Tier};
use furbo::record::RunRecord;
use furbo::{
    furbo_run, random_search_run, scbo_run, FurboConfig, Problem, RngStream, ScboConfig,
};

use crate::error::{BenchError, Result};

pub const OPTIMIZER_NAMES: [&str; 3] = ["furbo", "scbo", "random"];
pub const SUITE_NAMES: [&str; 3] = ["bbob", "keane", "physics"];

/// Full description of a campaign. A JSON file with any subset of these
/// fields is accepted; command-line flags override file values.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Problem family: `bbob`, `keane`, or `physics`.
    pub suite: String,
    /// Function or problem names within the suite; empty selects all.
    pub functions: Vec<String>,
    /// Dimension for the bbob and keane suites (physics dimensions are
    /// fixed per problem).
    pub dim: usize,
    /// Constraint severity level for generated instances (0..=5).
    pub severity: usize,
    pub optimizers: Vec<String>,
    pub n_repetitions: usize,
    /// Generated-instance count per function (bbob only).
    pub n_instances: usize,
    pub base_seed: u64,
    /// Budget = multiplier x problem dimension, unless `budget` overrides.
    pub budget_multiplier: usize,
    /// Batch = multiplier x problem dimension, unless `batch_size` overrides.
    pub batch_multiplier: usize,
    pub budget: Option<usize>,
    pub batch_size: Option<usize>,
    /// Initial design size override (exact count, not a multiplier).
    pub n_init: Option<usize>,
    pub inspector_pct: Option<f64>,
    pub r_init: Option<f64>,
    /// Surrogate fit effort overrides.
    pub gp_restarts: Option<usize>,
    pub gp_max_steps: Option<usize>,
    pub out_dir: PathBuf,
    pub workers: usize,
    /// Also write per-iteration optimizer traces as JSON lines.
    pub trace: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            suite: "bbob".into(),
            functions: Vec::new(),
            dim: 10,
            severity: 2,
            optimizers: OPTIMIZER_NAMES.iter().map(|s| s.to_string()).collect(),
            n_repetitions: 10,
            n_instances: 3,
            base_seed: 42,
            budget_multiplier: 30,
            batch_multiplier: 3,
            budget: None,
            batch_size: None,
            n_init: None,
            inspector_pct: None,
            r_init: None,
            gp_restarts: None,
            gp_max_steps: None,
            out_dir: PathBuf::from("results"),
            workers: 1,
            trace: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !SUITE_NAMES.contains(&self.suite.as_str()) {
            return Err(BenchError::Config(format!("unknown suite '{}'", self.suite)));
        }
        if self.optimizers.is_empty() {
            return Err(BenchError::Config("no optimizers selected".into()));
        }
        for o in &self.optimizers {
            if !OPTIMIZER_NAMES.contains(&o.as_str()) {
                return Err(BenchError::Config(format!("unknown optimizer '{o}'")));
            }
        }
        if self.n_repetitions == 0 || self.n_instances == 0 {
            return Err(BenchError::Config("repetitions and instances must be >= 1".into()));
        }
        if self.dim == 0 {
            return Err(BenchError::Config("dimension must be >= 1".into()));
        }
        if self.severity > 5 {
            return Err(BenchError::Config(format!(
                "severity {} out of range 0..=5",
                self.severity
            )));
        }
        if self.suite == "bbob" {
            for f in &self.functions {
                if BaseFunction::from_name(f).is_none() {
                    return Err(BenchError::Config(format!("unknown bbob function '{f}'")));
                }
            }
        }
        if self.suite == "physics" {
            for f in &self.functions {
                if physics_problem(f).is_none() {
                    return Err(BenchError::Config(format!("unknown physics problem '{f}'")));
                }
            }
        }
        Ok(())
    }

    pub fn budget_for(&self, dim: usize) -> usize {
        self.budget.unwrap_or(self.budget_multiplier * dim)
    }

    pub fn batch_for(&self, dim: usize) -> usize {
        self.batch_size.unwrap_or(self.batch_multiplier * dim)
    }

    pub fn furbo_config(&self, dim: usize) -> FurboConfig {
        let mut c = FurboConfig::defaults(dim);
        c.budget = self.budget_for(dim);
        c.batch_size = self.batch_for(dim);
        if let Some(v) = self.n_init {
            c.n_init = v;
        }
        if let Some(v) = self.inspector_pct {
            c.inspector_pct = v;
        }
        if let Some(v) = self.r_init {
            c.r_init = v;
        }
        if let Some(v) = self.gp_restarts {
            c.fit.restarts = v;
        }
        if let Some(v) = self.gp_max_steps {
            c.fit.max_steps = v;
        }
        c
    }

    pub fn scbo_config(&self, dim: usize) -> ScboConfig {
        let mut c = ScboConfig::defaults(dim);
        c.budget = self.budget_for(dim);
        c.batch_size = self.batch_for(dim);
        if let Some(v) = self.n_init {
            c.n_init = v;
        }
        if let Some(v) = self.gp_restarts {
            c.fit.restarts = v;
        }
        if let Some(v) = self.gp_max_steps {
            c.fit.max_steps = v;
        }
        c
    }

    /// Hash of every record-relevant field; storage location, worker count,
    /// and trace emission do not affect run contents.
    pub fn identity_hash(&self) -> u64 {
        let mut identity = self.clone();
        identity.out_dir = PathBuf::new();
        identity.workers = 0;
        identity.trace = false;
        let json = serde_json::to_string(&identity).expect("config serializes");
        fnv1a64(json.as_bytes())
    }
}

/// 64-bit FNV-1a; the harness's only hashing needs are cheap, stable,
/// well-spread derived seeds.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Distinct deterministic seed per (optimizer, problem instance, repetition).
pub fn derive_seed(base_seed: u64, optimizer: &str, problem_key: &str, rep: usize) -> u64 {
    fnv1a64(format!("run|{base_seed:#018x}|{optimizer}|{problem_key}|{rep}").as_bytes())
}

/// Seed for generated problem instances; shared by all optimizers and
/// repetitions so everyone faces the same landscape.
pub fn instance_seed(
    base_seed: u64,
    function: &str,
    dim: usize,
    severity: usize,
    instance: usize,
) -> u64 {
    fnv1a64(
        format!("instance|{base_seed:#018x}|{function}|{dim}|{severity}|{instance}").as_bytes(),
    )
}

/// A concrete problem in the campaign grid.
pub struct ProblemInstance {
    /// Unique key including the instance index.
    pub key: String,
    /// Aggregation group: function + dimension + severity, without the
    /// instance index.
    pub setting: String,
    pub instance: usize,
    pub problem: Problem,
}

pub fn build_problems(cfg: &ExperimentConfig) -> Result<Vec<ProblemInstance>> {
    let mut out = Vec::new();
    match cfg.suite.as_str() {
        "bbob" => {
            let functions: Vec<String> = if cfg.functions.is_empty() {
                BaseFunction::ALL.iter().map(|f| f.name().to_string()).collect()
            } else {
                cfg.functions.clone()
            };
            for name in &functions {
                let function = BaseFunction::from_name(name)
                    .ok_or_else(|| BenchError::Config(format!("unknown bbob function '{name}'")))?;
                for instance in 0..cfg.n_instances {
                    let seed = instance_seed(cfg.base_seed, name, cfg.dim, cfg.severity, instance);
                    let inst = BbobInstance::generate(function, cfg.dim, cfg.severity, seed)?;
                    out.push(ProblemInstance {
                        key: format!("{name}_{}d_s{}_i{instance}", cfg.dim, cfg.severity),
                        setting: format!("{name}_{}d_s{}", cfg.dim, cfg.severity),
                        instance,
                        problem: inst.problem(),
                    });
                }
            }
        }
        "keane" => {
            let name = format!("keane_bump_{}", cfg.dim);
            let problem = physics_problem(&name)
                .ok_or_else(|| BenchError::Config(format!("cannot build '{name}'")))?;
            out.push(ProblemInstance { key: name.clone(), setting: name, instance: 0, problem });
        }
        "physics" => {
            let names: Vec<String> = if cfg.functions.is_empty() {
                PHYSICS_NAMES.iter().map(|s| s.to_string()).collect()
            } else {
                cfg.functions.clone()
            };
            for name in names {
                let problem = physics_problem(&name)
                    .ok_or_else(|| BenchError::Config(format!("unknown physics problem '{name}'")))?;
                out.push(ProblemInstance {
                    key: name.clone(),
                    setting: name,
                    instance: 0,
                    problem,
                });
            }
        }
        other => return Err(BenchError::Config(format!("unknown suite '{other}'"))),
    }
    Ok(out)
}

/// One schedulable unit of the campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTask {
    pub problem_index: usize,
    pub optimizer: String,
    pub problem_key: String,
    pub setting: String,
    pub instance: usize,
    pub rep: usize,
    pub seed: u64,
}

impl RunTask {
    pub fn run_id(&self) -> String {
        format!("{}__{}__r{:03}", self.optimizer, self.problem_key, self.rep)
    }
}

pub fn plan_tasks(cfg: &ExperimentConfig, problems: &[ProblemInstance]) -> Vec<RunTask> {
    let mut tasks = Vec::new();
    for (problem_index, p) in problems.iter().enumerate() {
        for optimizer in &cfg.optimizers {
            for rep in 0..cfg.n_repetitions {
                tasks.push(RunTask {
                    problem_index,
                    optimizer: optimizer.clone(),
                    problem_key: p.key.clone(),
                    setting: p.setting.clone(),
                    instance: p.instance,
                    rep,
                    seed: derive_seed(cfg.base_seed, optimizer, &p.key, rep),
                });
            }
        }
    }
    tasks
}

/// Persisted form of one evaluation row.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StoredEval {
    pub eval_index: usize,
    pub x: Vec<f64>,
    pub f: f64,
    pub c: Vec<f64>,
    pub is_feasible: bool,
    pub incumbent_tier: String,
    pub incumbent_key: f64,
    pub incumbent_kind: String,
    pub incumbent_value: f64,
    pub radius: Option<f64>,
    pub restart: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StoredRecommendation {
    pub x: Vec<f64>,
    pub f: f64,
    pub c: Vec<f64>,
    pub is_feasible: bool,
    pub kind: String,
    pub value: f64,
}

/// Persisted form of one run: everything reporting needs, including the
/// optimum reference so records stand alone.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StoredRun {
    pub run_id: String,
    pub optimizer: String,
    pub problem_key: String,
    pub setting: String,
    pub instance: usize,
    pub rep: usize,
    pub seed: u64,
    pub dim: usize,
    pub n_constraints: usize,
    pub budget: usize,
    pub optimum: Option<f64>,
    pub evals: Vec<StoredEval>,
    pub recommendation: StoredRecommendation,
}

fn tier_name(tier: Tier) -> &'static str {
    match tier {
        Tier::Feasible => "feasible",
        Tier::Infeasible => "infeasible",
    }
}

fn store_run(task: &RunTask, record: &RunRecord, optimum: Option<f64>) -> StoredRun {
    StoredRun {
        run_id: task.run_id(),
        optimizer: task.optimizer.clone(),
        problem_key: task.problem_key.clone(),
        setting: task.setting.clone(),
        instance: task.instance,
        rep: task.rep,
        seed: task.seed,
        dim: record.meta.dim,
        n_constraints: record.meta.n_constraints,
        budget: record.meta.budget,
        optimum,
        evals: record
            .evals
            .iter()
            .map(|r| StoredEval {
                eval_index: r.eval_index,
                x: r.x.clone(),
                f: r.f,
                c: r.c.clone(),
                is_feasible: r.is_feasible,
                incumbent_tier: tier_name(r.incumbent_key.tier).into(),
                incumbent_key: r.incumbent_key.key,
                incumbent_kind: kind_name(r.incumbent_kind).into(),
                incumbent_value: r.incumbent_value,
                radius: r.radius,
                restart: r.restart,
            })
            .collect(),
        recommendation: StoredRecommendation {
            x: record.recommendation.x.clone(),
            f: record.recommendation.f,
            c: record.recommendation.c.clone(),
            is_feasible: record.recommendation.is_feasible,
            kind: kind_name(record.recommendation.kind).into(),
            value: record.recommendation.value,
        },
    }
}

fn kind_name(kind: ReportKind) -> &'static str {
    match kind {
        ReportKind::Loss => "loss",
        ReportKind::Objective => "objective",
        ReportKind::Violation => "violation",
    }
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    config_hash: u64,
    config: ExperimentConfig,
}

/// Execute one task against its problem.
fn execute_task(
    cfg: &ExperimentConfig,
    problem: &ProblemInstance,
    task: &RunTask,
) -> Result<RunRecord> {
    let dim = problem.problem.dim();
    let stream = RngStream::new(task.seed, 0);
    let record = match task.optimizer.as_str() {
        "furbo" => furbo_run(&problem.problem, &cfg.furbo_config(dim), stream)?,
        "scbo" => scbo_run(&problem.problem, &cfg.scbo_config(dim), stream)?,
        "random" => random_search_run(&problem.problem, cfg.budget_for(dim), stream)?,
        other => return Err(BenchError::Config(format!("unknown optimizer '{other}'"))),
    };
    Ok(record)
}

fn atomic_write(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn write_run_file(runs_dir: &Path, stored: &StoredRun) -> Result<()> {
    let path = runs_dir.join(format!("{}.json", stored.run_id));
    atomic_write(&path, serde_json::to_string(stored)?.as_bytes())
}

fn write_trace_file(cfg: &ExperimentConfig, task: &RunTask, record: &RunRecord) -> Result<()> {
    let dir = cfg.out_dir.join("traces");
    fs::create_dir_all(&dir)?;
    let mut out = Vec::new();
    for t in &record.traces {
        let line = serde_json::json!({
            "iteration": t.iteration,
            "radius": t.radius,
            "tr_lo": t.tr_lo,
            "tr_hi": t.tr_hi,
            "n_s": t.n_s,
            "n_f": t.n_f,
            "incumbent_tier": tier_name(t.incumbent_key.tier),
            "incumbent_key": t.incumbent_key.key,
            "restart": t.restart,
        });
        writeln!(&mut out, "{line}").expect("writing to a Vec cannot fail");
    }
    atomic_write(&dir.join(format!("{}.jsonl", task.run_id())), &out)
}

/// Load a previously persisted run, verifying it belongs to this task.
fn load_cached(runs_dir: &Path, task: &RunTask) -> Result<Option<StoredRun>> {
    let path = runs_dir.join(format!("{}.json", task.run_id()));
    if !path.exists() {
        return Ok(None);
    }
    let stored: StoredRun = serde_json::from_str(&fs::read_to_string(&path)?)?;
    if stored.seed != task.seed || stored.run_id != task.run_id() {
        return Err(BenchError::StaleCache(format!(
            "{} does not match the current configuration",
            path.display()
        )));
    }
    Ok(Some(stored))
}

/// Run the whole campaign: skip completed runs, execute the rest (on a
/// worker pool when configured), persist each record as it finishes, and
/// return all records in task order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<StoredRun>> {
    cfg.validate()?;
    let problems = build_problems(cfg)?;
    let tasks = plan_tasks(cfg, &problems);
    let runs_dir = cfg.out_dir.join("runs");
    fs::create_dir_all(&runs_dir)?;

    let manifest_path = cfg.out_dir.join("manifest.json");
    let hash = cfg.identity_hash();
    if manifest_path.exists() {
        let manifest: Manifest = serde_json::from_str(&fs::read_to_string(&manifest_path)?)?;
        if manifest.config_hash != hash {
            return Err(BenchError::StaleCache(format!(
                "{} was produced by a different configuration; use a fresh output directory",
                cfg.out_dir.display()
            )));
        }
    } else {
        let manifest = Manifest { config_hash: hash, config: cfg.clone() };
        atomic_write(&manifest_path, serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    }

    let mut results: Vec<Option<StoredRun>> = Vec::with_capacity(tasks.len());
    let mut pending = Vec::new();
    for (i, task) in tasks.iter().enumerate() {
        let cached = load_cached(&runs_dir, task)?;
        if cached.is_none() {
            pending.push(i);
        }
        results.push(cached);
    }

    if cfg.workers <= 1 {
        for &i in &pending {
            let task = &tasks[i];
            let record = execute_task(cfg, &problems[task.problem_index], task)?;
            let stored = store_run(task, &record, problems[task.problem_index].problem.optimum_value());
            write_run_file(&runs_dir, &stored)?;
            if cfg.trace {
                write_trace_file(cfg, task, &record)?;
            }
            results[i] = Some(stored);
        }
    } else {
        let next = AtomicUsize::new(0);
        let (tx, rx) = mpsc::channel::<(usize, Result<(RunRecord, StoredRun)>)>();
        std::thread::scope(|scope| -> Result<()> {
            for _ in 0..cfg.workers {
                let tx = tx.clone();
                let next = &next;
                let pending = &pending;
                let tasks = &tasks;
                let problems = &problems;
                scope.spawn(move || loop {
                    let slot = next.fetch_add(1, Ordering::SeqCst);
                    if slot >= pending.len() {
                        break;
                    }
                    let i = pending[slot];
                    let task = &tasks[i];
                    let outcome = execute_task(cfg, &problems[task.problem_index], task).map(
                        |record| {
                            let stored = store_run(
                                task,
                                &record,
                                problems[task.problem_index].problem.optimum_value(),
                            );
                            (record, stored)
                        },
                    );
                    if tx.send((i, outcome)).is_err() {
                        break;
                    }
                });
            }
            drop(tx);
            // All file writes stay on this thread.
            for (i, outcome) in rx {
                let (record, stored) = outcome?;
                write_run_file(&runs_dir, &stored)?;
                if cfg.trace {
                    write_trace_file(cfg, &tasks[i], &record)?;
                }
                results[i] = Some(stored);
            }
            Ok(())
        })?;
    }

    Ok(results.into_iter().map(|r| r.expect("every task resolved")).collect())
}

/// Read every persisted run from a results directory (for `report`).
pub fn load_all_runs(out_dir: &Path) -> Result<Vec<StoredRun>> {
    let runs_dir = out_dir.join("runs");
    let mut paths: Vec<PathBuf> = fs::read_dir(&runs_dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    let mut runs = Vec::with_capacity(paths.len());
    for p in paths {
        runs.push(serde_json::from_str(&fs::read_to_string(&p)?)?);
    }
    if runs.is_empty() {
        return Err(BenchError::Config(format!(
            "no run records found under {}",
            runs_dir.display()
        )));
    }
    Ok(runs)
}
