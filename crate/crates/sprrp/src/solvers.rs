//! Solver selection shared by the CLI and the sweep.

use std::time::Instant;

use sprrp_core::exact::SolveError;
use sprrp_core::heuristic::{solve_heuristic, HeuristicConfig, HeuristicError};
use sprrp_core::oracle::{enumerate_all, OracleError, DEFAULT_LIMIT};
use sprrp_core::{expand, solve_exact_with, Clock, Instance, Solution, SolverConfig};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum SolverKind {
    #[default]
    Exact,
    Greedy,
    Oracle,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Exact => "exact",
            SolverKind::Greedy => "greedy",
            SolverKind::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub solver: SolverKind,
    pub seed: u64,
    /// Expanded nodes for the exact solver, candidate evaluations for the
    /// heuristic.
    pub node_budget: Option<u64>,
    pub time_budget: Option<f64>,
    pub oracle_limit: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { solver: SolverKind::Exact, seed: 0, node_budget: None, time_budget: None, oracle_limit: DEFAULT_LIMIT }
    }
}

#[derive(Debug, Error)]
pub enum SolveFailure {
    #[error(transparent)]
    Exact(#[from] SolveError),
    #[error(transparent)]
    Heuristic(#[from] HeuristicError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Wall clock for solver time budgets.
pub struct WallClock(Instant);

impl WallClock {
    pub fn start() -> Self {
        Self(Instant::now())
    }
}

impl Clock for WallClock {
    fn elapsed_secs(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

pub fn solve(inst: &Instance, opts: &SolveOptions) -> Result<Solution, SolveFailure> {
    match opts.solver {
        SolverKind::Exact => {
            let violations = inst.validate();
            if !violations.is_empty() {
                return Err(SolveError::Invalid(violations).into());
            }
            let graph = expand(inst).map_err(SolveError::from)?;
            let mut cfg = SolverConfig { time_budget: opts.time_budget, ..SolverConfig::default() };
            if let Some(n) = opts.node_budget {
                cfg.node_budget = n;
            }
            let clock = WallClock::start();
            let out = solve_exact_with(inst, &graph, &cfg, Some(&clock))?;
            log::info!("exact search expanded {} nodes", out.expanded);
            Ok(out.solution)
        }
        SolverKind::Greedy => {
            let mut cfg = HeuristicConfig { seed: opts.seed, ..HeuristicConfig::default() };
            if let Some(n) = opts.node_budget {
                cfg.budget = n;
            }
            Ok(solve_heuristic(inst, &cfg)?)
        }
        SolverKind::Oracle => {
            let (sol, explored) = enumerate_all(inst, opts.oracle_limit)?;
            log::info!("oracle explored {explored} route sets");
            Ok(sol)
        }
    }
}
