//! Benchmark problems: generated constrained instances and fixed
//! engineering designs.

pub mod bbob;
pub mod physics;

pub use bbob::{severity_counts, BaseFunction, BbobInstance};
pub use physics::{
    keane_bump, physics_problem, pressure_vessel, speed_reducer, tension_spring, welded_beam,
    PHYSICS_NAMES,
};
