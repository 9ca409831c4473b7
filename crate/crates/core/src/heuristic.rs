//! Greedy construction and first-improvement local search.
//!
//! Both work on [`Plan`]s (visit lists) and realize every candidate through
//! the same task propagation as the exact solver, so every returned solution
//! passes the audit.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{expand, ExpandedGraph, GraphError};
use crate::model::{Instance, Violation};
use crate::plan::{plan_of, realize, Plan, Visit, VisitMode};
use crate::solution::{audit, AuditError, Solution, SolveStatus};
use crate::{BENEFIT_EPS, FEASIBILITY_EPS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeuristicError {
    #[error("invalid instance ({} violations)", .0.len())]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("start solution is infeasible: {0}")]
    InfeasibleStart(AuditError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeuristicConfig {
    pub seed: u64,
    /// Candidate evaluations allowed in local search.
    pub budget: u64,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        Self { seed: 0, budget: 20_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MoveKind {
    ToggleCharge,
    Insert,
    Relocate,
    TwoOpt,
    Swap,
    Remove,
}

/// Companion edit that makes an insertion affordable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Repair {
    /// Switch the visit at this index to another mode.
    Mode(usize, VisitMode),
    /// Insert a second unvisited PoI at this index.
    Visit(usize, Visit),
}

/// A plan edit. Positions are `(vehicle, index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    ToggleCharge { at: (usize, usize), mode: VisitMode },
    /// Insert `visit` at `at`, after applying `repair` to the same vehicle.
    Insert { at: (usize, usize), visit: Visit, repair: Option<Repair> },
    /// Put an unvisited PoI in place of the visit at `at`.
    Exchange { at: (usize, usize), visit: Visit },
    /// Move a visit, possibly changing its mode.
    Relocate { from: (usize, usize), to: (usize, usize), mode: VisitMode },
    /// Reverse the visits `i..=j` of one vehicle.
    TwoOpt { vehicle: usize, i: usize, j: usize },
    /// Exchange two visits; each takes the given mode in its new slot.
    Swap { a: (usize, usize), b: (usize, usize), modes: (VisitMode, VisitMode) },
    Remove { at: (usize, usize) },
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        match self {
            Move::ToggleCharge { .. } => MoveKind::ToggleCharge,
            Move::Insert { .. } | Move::Exchange { .. } => MoveKind::Insert,
            Move::Relocate { .. } => MoveKind::Relocate,
            Move::TwoOpt { .. } => MoveKind::TwoOpt,
            Move::Swap { .. } => MoveKind::Swap,
            Move::Remove { .. } => MoveKind::Remove,
        }
    }

    /// The edited plan. Structure is preserved (every PoI at most once);
    /// feasibility is left to the caller.
    pub fn apply(&self, plan: &Plan) -> Plan {
        let mut out = plan.clone();
        match *self {
            Move::ToggleCharge { at: (k, i), mode } => out[k][i].mode = mode,
            Move::Insert { at: (k, i), visit, repair } => {
                match repair {
                    Some(Repair::Mode(j, mode)) => out[k][j].mode = mode,
                    Some(Repair::Visit(j, v)) => out[k].insert(j, v),
                    None => {}
                }
                out[k].insert(i, visit);
            }
            Move::Exchange { at: (k, i), visit } => out[k][i] = visit,
            Move::Relocate { from: (k, i), to: (l, j), mode } => {
                let v = out[k].remove(i);
                out[l].insert(j, Visit { mode, ..v });
            }
            Move::TwoOpt { vehicle, i, j } => out[vehicle][i..=j].reverse(),
            Move::Swap { a: (k, i), b: (l, j), modes: (ma, mb) } => {
                let (va, vb) = (out[k][i], out[l][j]);
                out[k][i] = Visit { poi: vb.poi, mode: mb };
                out[l][j] = Visit { poi: va.poi, mode: ma };
            }
            Move::Remove { at: (k, i) } => {
                out[k].remove(i);
            }
        }
        out
    }
}

fn better(a: &Solution, b: &Solution) -> bool {
    if a.objective > b.objective + BENEFIT_EPS {
        return true;
    }
    a.objective >= b.objective - BENEFIT_EPS && a.busy_time() < b.busy_time() - FEASIBILITY_EPS
}

fn priorities(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

/// Candidate moves in the fixed kind order.
fn neighborhood(inst: &Instance, plan: &Plan, order: &[usize]) -> Vec<Move> {
    let modes = VisitMode::available(inst);
    let mut moves = Vec::new();
    let positions: Vec<(usize, usize)> =
        plan.iter().enumerate().flat_map(|(k, r)| (0..r.len()).map(move |i| (k, i))).collect();

    for &(k, i) in &positions {
        for &mode in modes {
            if mode != plan[k][i].mode {
                moves.push(Move::ToggleCharge { at: (k, i), mode });
            }
        }
    }

    let used: Vec<usize> = plan.iter().flatten().map(|v| v.poi).collect();
    let free: Vec<usize> = order.iter().copied().filter(|p| !used.contains(p)).collect();
    for &p in &free {
        for (k, route) in plan.iter().enumerate() {
            for i in 0..=route.len() {
                for &mode in modes {
                    let visit = Visit { poi: p, mode };
                    moves.push(Move::Insert { at: (k, i), visit, repair: None });
                }
            }
        }
    }
    for &p in &free {
        for (k, route) in plan.iter().enumerate() {
            for &mode in modes {
                let visit = Visit { poi: p, mode };
                for i in 0..=route.len() {
                    for (j, v) in route.iter().enumerate() {
                        for &repair in modes.iter().filter(|&&m| m != v.mode) {
                            moves.push(Move::Insert { at: (k, i), visit, repair: Some(Repair::Mode(j, repair)) });
                        }
                    }
                }
                for &q in free.iter().filter(|&&q| q != p) {
                    for &other in modes {
                        let companion = Visit { poi: q, mode: other };
                        for j in 0..=route.len() {
                            for i in [j, j + 1] {
                                moves.push(Move::Insert { at: (k, i), visit, repair: Some(Repair::Visit(j, companion)) });
                            }
                        }
                    }
                }
            }
        }
    }
    for &at in &positions {
        for &p in &free {
            for &mode in modes {
                moves.push(Move::Exchange { at, visit: Visit { poi: p, mode } });
            }
        }
    }

    for &(k, i) in &positions {
        for (l, route) in plan.iter().enumerate() {
            let slots = if l == k { route.len() } else { route.len() + 1 };
            for j in 0..slots {
                if (l, j) != (k, i) {
                    for &mode in modes {
                        moves.push(Move::Relocate { from: (k, i), to: (l, j), mode });
                    }
                }
            }
        }
    }

    for (k, route) in plan.iter().enumerate() {
        for i in 0..route.len() {
            for j in i + 1..route.len() {
                moves.push(Move::TwoOpt { vehicle: k, i, j });
            }
        }
    }

    for (x, &a) in positions.iter().enumerate() {
        for &b in &positions[x + 1..] {
            for &ma in modes {
                for &mb in modes {
                    moves.push(Move::Swap { a, b, modes: (ma, mb) });
                }
            }
        }
    }

    for &at in &positions {
        moves.push(Move::Remove { at });
    }
    moves
}

/// Builds a solution by repeated best insertion: the (PoI, vehicle,
/// position, mode) with the largest benefit gain per added busy sol wins,
/// ties going to the PoI ranked first by the seeded priority order.
pub fn greedy_construct(inst: &Instance, seed: u64) -> Result<Solution, HeuristicError> {
    let violations = inst.validate();
    if !violations.is_empty() {
        return Err(HeuristicError::Invalid(violations));
    }
    let graph = expand(inst)?;
    Ok(greedy_on(inst, &graph, seed, Scoring::PerSol))
}

/// How greedy ranks insertions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scoring {
    /// Benefit gained per added busy sol.
    PerSol,
    /// Benefit gained, then least added busy time.
    Absolute,
}

fn greedy_on(inst: &Instance, graph: &ExpandedGraph, seed: u64, scoring: Scoring) -> Solution {
    let order = priorities(inst.pois.len(), seed);
    let mut plan: Plan = alloc::vec![Vec::new(); inst.fleet.vehicles];
    let mut current = realize(inst, graph, &plan).expect("idle fleet is feasible");
    loop {
        let mut best: Option<(f64, Plan, Solution)> = None;
        let used: Vec<usize> = plan.iter().flatten().map(|v| v.poi).collect();
        for &p in order.iter().filter(|p| !used.contains(p)) {
            for k in 0..plan.len() {
                for i in 0..=plan[k].len() {
                    for &mode in VisitMode::available(inst) {
                        let mut cand = plan.clone();
                        cand[k].insert(i, Visit { poi: p, mode });
                        let Some(sol) = realize(inst, graph, &cand) else { continue };
                        let gain = sol.objective - current.objective;
                        if gain <= BENEFIT_EPS {
                            continue;
                        }
                        let added = (sol.busy_time() - current.busy_time()).max(FEASIBILITY_EPS);
                        let score = match scoring {
                            Scoring::PerSol => gain / added,
                            Scoring::Absolute => gain - added * 1e-9,
                        };
                        if best.as_ref().map_or(true, |(s, _, _)| score > *s * (1.0 + 1e-12)) {
                            best = Some((score, cand, sol));
                        }
                    }
                }
            }
        }
        match best {
            Some((_, cand, sol)) => {
                plan = cand;
                current = sol;
            }
            None => return current,
        }
    }
}

/// Improves `start` by first-improvement moves until no move helps or
/// `budget` candidates have been evaluated.
///
/// When no single move improves, pairs of moves are tried whose first step
/// leaves a feasible (if no better) plan. A candidate improves when it earns
/// more benefit, or the same benefit in less busy time.
pub fn local_search(inst: &Instance, start: &Solution, budget: u64, seed: u64) -> Result<Solution, HeuristicError> {
    let graph = expand(inst)?;
    audit(inst, &graph, start).map_err(HeuristicError::InfeasibleStart)?;
    Ok(local_search_on(inst, &graph, start, budget, seed))
}

fn local_search_on(inst: &Instance, graph: &ExpandedGraph, start: &Solution, budget: u64, seed: u64) -> Solution {
    let order = priorities(inst.pois.len(), seed);
    let mut plan = plan_of(graph, start);
    let mut current = start.clone();
    let mut left = budget;
    'sweep: while left > 0 {
        let mut plateau: Vec<Plan> = Vec::new();
        for mv in neighborhood(inst, &plan, &order) {
            if left == 0 {
                break 'sweep;
            }
            left -= 1;
            let cand = mv.apply(&plan);
            if let Some(sol) = realize(inst, graph, &cand) {
                if better(&sol, &current) {
                    plan = cand;
                    current = sol;
                    continue 'sweep;
                }
                plateau.push(cand);
            }
        }
        for mid in plateau {
            for mv in neighborhood(inst, &mid, &order) {
                if left == 0 {
                    break 'sweep;
                }
                left -= 1;
                let cand = mv.apply(&mid);
                if let Some(sol) = realize(inst, graph, &cand) {
                    if better(&sol, &current) {
                        plan = cand;
                        current = sol;
                        continue 'sweep;
                    }
                }
            }
        }
        break;
    }
    current
}

/// Greedy construction followed by local search, run from both greedy
/// rankings; the better result is kept.
pub fn solve_heuristic(inst: &Instance, cfg: &HeuristicConfig) -> Result<Solution, HeuristicError> {
    let violations = inst.validate();
    if !violations.is_empty() {
        return Err(HeuristicError::Invalid(violations));
    }
    let graph = expand(inst)?;
    let mut sol = greedy_on(inst, &graph, cfg.seed, Scoring::PerSol);
    sol = local_search_on(inst, &graph, &sol, cfg.budget, cfg.seed);
    let alt = greedy_on(inst, &graph, cfg.seed, Scoring::Absolute);
    let alt = local_search_on(inst, &graph, &alt, cfg.budget, cfg.seed);
    if better(&alt, &sol) {
        sol = alt;
    }
    sol.status = SolveStatus::Feasible;
    Ok(sol)
}
