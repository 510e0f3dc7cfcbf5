//! Constrained Bayesian optimization with feasibility-driven trust regions.
//!
//! The centerpiece is a batch optimizer that steers its trust region by
//! ranking a cloud of cheap "inspector" points under Gaussian-process
//! surrogates: feasible inspectors by predicted objective, infeasible ones
//! by worst normalized predicted violation. The bounding box of the
//! top-ranked inspectors becomes the trust region for Thompson-sampling
//! candidate selection. A cube trust-region baseline and plain random search
//! share the same run contract, alongside a self-contained constrained
//! benchmark suite.
//!
//! All optimizers minimize over the unit cube with constraints in the
//! `c(x) <= 0` convention and are deterministic given an [`sampling::RngStream`].

pub mod baselines;
pub mod bench;
pub mod error;
pub mod furbo;
pub mod kernel;
pub mod problem;
pub mod record;
pub mod region;
pub mod sampling;

mod linalg;

pub mod gp;

pub use baselines::{random_search_run, scbo_run, ScboConfig};
pub use error::{Error, Result};
pub use furbo::{furbo_run, CounterDynamics, FurboConfig};
pub use problem::{EvaluatedSample, Problem, RankKey, ReportKind, SampleSet, Tier};
pub use record::{RunMeta, RunRecord};
pub use region::TrustRegion;
pub use sampling::RngStream;
