//! Core algorithms for the Solar Powered Rover Routing Problem.
//!
//! A fleet of solar-powered rovers leaves a common base and visits Points of
//! Interest (PoIs). At every PoI a rover may do research (which earns the
//! benefit) and may charge; research and charging can happen in either
//! order. Battery level evolves with a square-wave solar gain of period one
//! sol minus a constant per-task draw, and every schedule must stay within
//! the battery capacity and the mission horizon.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the CLI and wall
//! clock budgets live in the `sprrp` crate.

#![no_std]

extern crate alloc;

pub mod energy;
pub mod exact;
pub mod graph;
pub mod heuristic;
pub mod mip;
pub mod model;
pub mod oracle;
pub mod plan;
pub mod random;
pub mod set;
pub mod solution;

pub use energy::{daylight, delta_e, solar_power, EnergyDelta, EnergyError};
pub use exact::{apply_edge, solve_exact, solve_exact_with, SolverConfig};
pub use graph::{expand, EdgeId, ExpandedGraph, NodeId, NodeKind, TaskEdge};
pub use model::{Instance, Site, TaskType, Violation};
pub use solution::{Solution, SolveStatus};

/// Energy/time slack used by every feasibility test.
///
/// Both the exact solver and the oracle resolve boundary cases with this
/// value, so the two agree on instances that sit exactly on a limit.
pub const FEASIBILITY_EPS: f64 = 1e-9;

/// Tolerance when comparing accumulated benefits.
pub const BENEFIT_EPS: f64 = 1e-9;

/// Source of elapsed wall time for solver budgets.
///
/// The core has no clock of its own; the `sprrp` crate supplies one backed by
/// `std::time::Instant`.
pub trait Clock {
    fn elapsed_secs(&self) -> f64;
}
