//! Exact branch and bound over vehicle routes.
//!
//! Vehicles are routed one after another. A state is extended by any feasible
//! outgoing task edge or by closing the current vehicle's route. Time and
//! battery are propagated forward with no idle time: every task starts when
//! the previous one ends, and the battery is clamped at capacity after each
//! task.
//!
//! Among schedules with equal benefit the one with the least total busy time
//! wins, so charging is only planned when it is needed.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use thiserror::Error;

use crate::energy::{delta_e, EnergyError};
use crate::graph::{expand, EdgeId, ExpandedGraph, GraphError, NodeId, NodeKind, TaskEdge, BASE};
use crate::model::{Instance, TaskType, Violation};
use crate::set::PoiSet;
use crate::solution::{may_end_at, ScheduledTask, Solution, SolveStatus, VehicleRoute};
use crate::{Clock, BENEFIT_EPS, FEASIBILITY_EPS};

/// Position of one vehicle in the search.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleState {
    pub node: NodeId,
    pub t: f64,
    pub b: f64,
    pub done_research: PoiSet,
    pub done_charge: PoiSet,
}

impl VehicleState {
    /// Vehicle parked at the base at mission start with its initial energy.
    pub fn start(inst: &Instance) -> Self {
        Self {
            node: BASE,
            t: inst.t0,
            b: inst.initial_energy(),
            done_research: PoiSet::new(),
            done_charge: PoiSet::new(),
        }
    }
}

/// Per-vehicle bounds used when propagating a task.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub capacity: f64,
    pub t_max: f64,
    pub duration_scale: f64,
}

impl Limits {
    pub fn for_vehicle(inst: &Instance, vehicle: usize) -> Self {
        Self {
            capacity: inst.fleet.battery_capacity,
            t_max: inst.t_max,
            duration_scale: inst.duration_scale(vehicle),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ApplyError {
    #[error("edge {edge:?} does not leave node {node}")]
    EdgeMismatch { edge: EdgeId, node: NodeId },
    #[error(transparent)]
    Energy(#[from] EnergyError),
}

/// Propagates `state` across `edge`.
///
/// Returns `Ok(None)` when the task is infeasible: the battery would drop
/// below zero, the task would end after the horizon, or it repeats a
/// research/charging task (or a visit) the vehicle already did at that PoI.
pub fn apply_edge(state: &VehicleState, edge: &TaskEdge, limits: &Limits) -> Result<Option<VehicleState>, ApplyError> {
    if edge.from != state.node {
        return Err(ApplyError::EdgeMismatch { edge: edge.id, node: state.node });
    }
    let tau = edge.duration * limits.duration_scale;
    let t = state.t + tau;
    if t > limits.t_max + FEASIBILITY_EPS {
        return Ok(None);
    }
    let mut next = state.clone();
    match (edge.task, edge.poi) {
        (TaskType::Research, Some(p)) => {
            if !next.done_research.insert(p) {
                return Ok(None);
            }
        }
        (TaskType::Charging, Some(p)) => {
            if !next.done_charge.insert(p) {
                return Ok(None);
            }
        }
        (TaskType::Movement, Some(p)) => {
            if state.done_research.contains(p) || state.done_charge.contains(p) {
                return Ok(None);
            }
        }
        _ => {}
    }
    let delta = delta_e(state.t, tau, edge.draw, edge.gain_amp)?;
    let level = state.b + delta.net;
    if level < -FEASIBILITY_EPS {
        return Ok(None);
    }
    next.node = edge.to;
    next.t = t;
    next.b = level.max(0.0).min(limits.capacity);
    Ok(Some(next))
}

/// Edge ordering at each node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchOrder {
    /// Highest benefit per sol first, then lower target id.
    #[default]
    BenefitDensity,
    /// Shortest task first, then lower target id.
    Nearest,
    /// Graph adjacency order.
    InputOrder,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Maximum number of expanded search nodes.
    pub node_budget: u64,
    /// Wall-clock budget in seconds; only honoured when a [`Clock`] is given.
    pub time_budget: Option<f64>,
    pub dominance: bool,
    pub branching: BranchOrder,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { node_budget: u64::MAX, time_budget: None, dominance: true, branching: BranchOrder::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid instance ({} violations)", .0.len())]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid solver config: {0}")]
    Config(&'static str),
}

/// Search state across the whole fleet.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchState {
    pub vehicles: Vec<VehicleState>,
    /// Vehicle currently being routed; earlier vehicles are closed.
    pub active: usize,
    /// PoIs entered by any vehicle.
    pub visited: PoiSet,
    pub benefit: f64,
    pub trail: Vec<Vec<ScheduledTask>>,
}

impl SearchState {
    pub fn root(inst: &Instance) -> Self {
        let k = inst.fleet.vehicles;
        Self {
            vehicles: alloc::vec![VehicleState::start(inst); k],
            active: 0,
            visited: PoiSet::new(),
            benefit: 0.0,
            trail: alloc::vec![Vec::new(); k],
        }
    }
}

/// Precomputed per-PoI benefit potentials for [`upper_bound`].
#[derive(Debug, Clone)]
pub struct BoundTable {
    /// Research + charge + best arrival benefit of an untouched PoI.
    potential: Vec<f64>,
    research: Vec<f64>,
    charge: Vec<f64>,
    best_return: f64,
    vehicles: usize,
}

impl BoundTable {
    pub fn new(inst: &Instance, graph: &ExpandedGraph) -> Self {
        let n = graph.poi_count();
        let mut arrival = alloc::vec![0.0f64; n];
        let mut best_return = 0.0f64;
        for e in graph.edges.iter().filter(|e| e.task == TaskType::Movement) {
            match e.poi {
                Some(p) => arrival[p] = arrival[p].max(e.benefit),
                None => best_return = best_return.max(e.benefit),
            }
        }
        let pick = |pair: &crate::graph::GadgetPair| {
            pair.iter().map(|id| graph.edge(id).benefit).fold(0.0f64, f64::max)
        };
        let research: Vec<f64> = graph.poi_research_edges.iter().map(pick).collect();
        let charge: Vec<f64> = graph.poi_charge_edges.iter().map(pick).collect();
        let potential = (0..n).map(|p| research[p] + charge[p] + arrival[p]).collect();
        Self { potential, research, charge, best_return, vehicles: inst.fleet.vehicles }
    }

    pub fn bound(&self, st: &SearchState, graph: &ExpandedGraph) -> f64 {
        let mut ub = st.benefit;
        for (p, &value) in self.potential.iter().enumerate() {
            if !st.visited.contains(p) {
                ub += value;
            }
        }
        if let Some(vs) = st.vehicles.get(st.active) {
            let node = &graph.nodes[vs.node.0];
            if let (Some(p), NodeKind::PoiIn | NodeKind::PoiMid) = (node.poi, node.kind) {
                if !vs.done_research.contains(p) {
                    ub += self.research[p];
                }
                if !vs.done_charge.contains(p) {
                    ub += self.charge[p];
                }
            }
        }
        if graph.return_to_base {
            ub += self.best_return * self.vehicles.saturating_sub(st.active) as f64;
        }
        ub
    }
}

/// Admissible bound on the benefit reachable from `st`: everything earned so
/// far plus every benefit still on the table.
pub fn upper_bound(st: &SearchState, inst: &Instance) -> Result<f64, SolveError> {
    let graph = expand(inst)?;
    Ok(BoundTable::new(inst, &graph).bound(st, &graph))
}

/// Dominance between two vehicle states in the same search context.
///
/// States are comparable only at the same node with the same research and
/// charging history; then the earlier, fuller state dominates.
pub fn dominates(s1: &VehicleState, s2: &VehicleState) -> bool {
    s1.node == s2.node
        && s1.done_research == s2.done_research
        && s1.done_charge == s2.done_charge
        && s1.t <= s2.t
        && s1.b >= s2.b
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct LabelKey {
    vehicle: usize,
    node: NodeId,
    visited: PoiSet,
    researched: PoiSet,
    charged: PoiSet,
    /// First targets of the previous and the active vehicle; they steer the
    /// symmetry-breaking rule.
    first_targets: (Option<usize>, Option<usize>),
}

#[derive(Debug, Clone, Copy)]
struct Label {
    t: f64,
    b: f64,
    benefit: f64,
    closed_busy: f64,
}

impl Label {
    fn covers(&self, other: &Label) -> bool {
        self.t <= other.t && self.b >= other.b && self.benefit >= other.benefit && self.closed_busy <= other.closed_busy
    }
}

#[derive(Debug, Clone)]
struct Incumbent {
    benefit: f64,
    busy: f64,
    encoding: Vec<Vec<EdgeId>>,
    routes: Vec<Vec<ScheduledTask>>,
}

/// Orders candidate schedules: benefit first, then busy time, then the
/// smaller edge encoding.
fn compare(benefit: f64, busy: f64, encoding: &[Vec<EdgeId>], inc: &Incumbent) -> Ordering {
    if benefit > inc.benefit + BENEFIT_EPS {
        return Ordering::Greater;
    }
    if benefit < inc.benefit - BENEFIT_EPS {
        return Ordering::Less;
    }
    if busy < inc.busy - FEASIBILITY_EPS {
        return Ordering::Greater;
    }
    if busy > inc.busy + FEASIBILITY_EPS {
        return Ordering::Less;
    }
    inc.encoding.as_slice().cmp(encoding)
}

/// Result of [`solve_exact_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub solution: Solution,
    pub expanded: u64,
}

struct Search<'a> {
    inst: &'a Instance,
    graph: &'a ExpandedGraph,
    cfg: SolverConfig,
    clock: Option<&'a dyn Clock>,
    limits: Vec<Limits>,
    order: Vec<Vec<EdgeId>>,
    bounds: BoundTable,
    symmetric: bool,
    first_target: Vec<Option<usize>>,
    closed_busy: f64,
    labels: BTreeMap<LabelKey, Vec<Label>>,
    researched: PoiSet,
    charged: PoiSet,
    best: Option<Incumbent>,
    expanded: u64,
    stopped: bool,
}

impl Search<'_> {
    fn out_of_budget(&mut self) -> bool {
        if self.expanded > self.cfg.node_budget {
            return true;
        }
        if let (Some(clock), Some(limit)) = (self.clock, self.cfg.time_budget) {
            if self.expanded % 256 == 0 && clock.elapsed_secs() > limit {
                return true;
            }
        }
        false
    }

    fn pruned_by_bound(&self, st: &SearchState) -> bool {
        let Some(inc) = &self.best else { return false };
        let ub = self.bounds.bound(st, self.graph);
        if ub < inc.benefit - BENEFIT_EPS {
            return true;
        }
        let vs = &st.vehicles[st.active];
        let busy = self.closed_busy + (vs.t - self.inst.t0);
        ub <= inc.benefit + BENEFIT_EPS && busy >= inc.busy - FEASIBILITY_EPS
    }

    fn dominated(&mut self, st: &SearchState) -> bool {
        let vs = &st.vehicles[st.active];
        let key = LabelKey {
            vehicle: st.active,
            node: vs.node,
            visited: st.visited.clone(),
            researched: self.researched.clone(),
            charged: self.charged.clone(),
            first_targets: (
                st.active.checked_sub(1).and_then(|j| self.first_target[j]),
                self.first_target[st.active],
            ),
        };
        let label = Label { t: vs.t, b: vs.b, benefit: st.benefit, closed_busy: self.closed_busy };
        let bucket = self.labels.entry(key).or_default();
        if bucket.iter().any(|l| l.covers(&label)) {
            return true;
        }
        bucket.retain(|l| !label.covers(l));
        bucket.push(label);
        false
    }

    fn record(&mut self, st: &SearchState) {
        let busy: f64 = st
            .trail
            .iter()
            .map(|tasks| VehicleRoute { tasks: tasks.clone() }.busy_time())
            .sum();
        let encoding: Vec<Vec<EdgeId>> = st.trail.iter().map(|r| r.iter().map(|t| t.edge).collect()).collect();
        let better = match &self.best {
            None => true,
            Some(inc) => compare(st.benefit, busy, &encoding, inc) == Ordering::Greater,
        };
        if better {
            self.best = Some(Incumbent { benefit: st.benefit, busy, encoding, routes: st.trail.clone() });
        }
    }

    fn explore(&mut self, st: &mut SearchState) {
        if self.stopped {
            return;
        }
        self.expanded += 1;
        if self.out_of_budget() {
            self.stopped = true;
            return;
        }
        if self.pruned_by_bound(st) {
            return;
        }
        if self.cfg.dominance && self.dominated(st) {
            return;
        }

        let k = st.active;
        let node = st.vehicles[k].node;
        let departed = !st.trail[k].is_empty();
        let kind = self.graph.nodes[node.0].kind;
        let here = self.graph.nodes[node.0].poi;

        if !(node == BASE && departed) {
            for i in 0..self.order[node.0].len() {
                let edge = &self.graph.edges[self.order[node.0][i].0];
                if !self.admissible(st, edge, kind, here, departed) {
                    continue;
                }
                let next = match apply_edge(&st.vehicles[k], edge, &self.limits[k]) {
                    Ok(Some(next)) => next,
                    _ => continue,
                };
                self.descend(st, edge, next, departed);
                if self.stopped {
                    return;
                }
            }
        }

        let researched_here = here.is_some_and(|p| st.vehicles[k].done_research.contains(p));
        if departed && !may_end_at(self.inst, self.graph, node, researched_here) {
            return;
        }
        let busy = st.vehicles[k].t - self.inst.t0;
        if k + 1 == st.vehicles.len() || (!departed && self.symmetric) {
            self.record(st);
            return;
        }
        self.closed_busy += busy;
        st.active = k + 1;
        self.explore(st);
        st.active = k;
        self.closed_busy -= busy;
    }

    fn admissible(&self, st: &SearchState, edge: &TaskEdge, kind: NodeKind, here: Option<usize>, departed: bool) -> bool {
        if edge.task != TaskType::Movement {
            return true;
        }
        if kind == NodeKind::PoiMid {
            let p = here.expect("gadget node has a PoI");
            if !self.inst.allow_charge_only_visit && !st.vehicles[st.active].done_research.contains(p) {
                return false;
            }
        }
        let Some(p) = edge.poi else { return true };
        if st.visited.contains(p) {
            return false;
        }
        if !departed && self.symmetric && st.active > 0 {
            if let Some(prev) = self.first_target[st.active - 1] {
                return p > prev;
            }
        }
        true
    }

    fn descend(&mut self, st: &mut SearchState, edge: &TaskEdge, next: VehicleState, departed: bool) {
        let k = st.active;
        let prev = core::mem::replace(&mut st.vehicles[k], next);
        let new_visit = edge.task == TaskType::Movement && edge.poi.is_some();
        let p = edge.poi;
        if new_visit {
            st.visited.insert(p.unwrap());
            if !departed {
                self.first_target[k] = p;
            }
        }
        match (edge.task, p) {
            (TaskType::Research, Some(p)) => {
                self.researched.insert(p);
            }
            (TaskType::Charging, Some(p)) => {
                self.charged.insert(p);
            }
            _ => {}
        }
        let saved_benefit = st.benefit;
        st.benefit += edge.benefit;
        let vs = &st.vehicles[k];
        st.trail[k].push(ScheduledTask {
            edge: edge.id,
            task: edge.task,
            from: edge.from,
            to: edge.to,
            start: prev.t,
            end: vs.t,
            battery_after: vs.b,
            benefit: edge.benefit,
        });

        self.explore(st);

        st.trail[k].pop();
        st.benefit = saved_benefit;
        match (edge.task, p) {
            (TaskType::Research, Some(p)) => self.researched.remove(p),
            (TaskType::Charging, Some(p)) => self.charged.remove(p),
            _ => {}
        }
        if new_visit {
            st.visited.remove(p.unwrap());
            if !departed {
                self.first_target[k] = None;
            }
        }
        st.vehicles[k] = prev;
    }
}

fn branch_order(graph: &ExpandedGraph, order: BranchOrder) -> Vec<Vec<EdgeId>> {
    graph
        .adjacency
        .iter()
        .map(|out| {
            let mut out = out.clone();
            let key = |id: &EdgeId| {
                let e = graph.edge(*id);
                (e.to, e.task, *id)
            };
            match order {
                BranchOrder::InputOrder => {}
                BranchOrder::BenefitDensity => out.sort_by(|a, b| {
                    let (ea, eb) = (graph.edge(*a), graph.edge(*b));
                    let (da, db) = (ea.benefit / ea.duration, eb.benefit / eb.duration);
                    db.total_cmp(&da).then_with(|| key(a).cmp(&key(b)))
                }),
                BranchOrder::Nearest => out.sort_by(|a, b| {
                    let (ea, eb) = (graph.edge(*a), graph.edge(*b));
                    ea.duration.total_cmp(&eb.duration).then_with(|| key(a).cmp(&key(b)))
                }),
            }
            out
        })
        .collect()
}

/// Solves `inst` to optimality (or until the node budget runs out).
pub fn solve_exact(inst: &Instance, cfg: &SolverConfig) -> Result<Solution, SolveError> {
    let violations = inst.validate();
    if !violations.is_empty() {
        return Err(SolveError::Invalid(violations));
    }
    let graph = expand(inst)?;
    Ok(solve_exact_with(inst, &graph, cfg, None)?.solution)
}

/// Solves `inst` over a prebuilt (possibly filtered) graph, honouring the
/// time budget when a clock is supplied.
pub fn solve_exact_with(
    inst: &Instance,
    graph: &ExpandedGraph,
    cfg: &SolverConfig,
    clock: Option<&dyn Clock>,
) -> Result<SearchOutcome, SolveError> {
    if cfg.node_budget == 0 {
        return Err(SolveError::Config("node budget must be positive"));
    }
    if cfg.time_budget.is_some_and(|t| t.is_nan() || t <= 0.0) {
        return Err(SolveError::Config("time budget must be positive"));
    }
    let k = inst.fleet.vehicles;
    let mut search = Search {
        inst,
        graph,
        cfg: *cfg,
        clock,
        limits: (0..k).map(|v| Limits::for_vehicle(inst, v)).collect(),
        order: branch_order(graph, cfg.branching),
        bounds: BoundTable::new(inst, graph),
        symmetric: inst.homogeneous_fleet(),
        first_target: alloc::vec![None; k],
        closed_busy: 0.0,
        labels: BTreeMap::new(),
        researched: PoiSet::new(),
        charged: PoiSet::new(),
        best: None,
        expanded: 0,
        stopped: false,
    };
    let mut root = SearchState::root(inst);
    search.explore(&mut root);

    let status = match (search.stopped, &search.best) {
        (false, _) => SolveStatus::Optimal,
        (true, Some(_)) => SolveStatus::Feasible,
        (true, None) => SolveStatus::InfeasibleEmpty,
    };
    let solution = match search.best {
        Some(inc) => Solution {
            routes: inc.routes.into_iter().map(|tasks| VehicleRoute { tasks }).collect(),
            objective: inc.benefit,
            status,
        },
        None => Solution::empty(k, status),
    };
    Ok(SearchOutcome { solution, expanded: search.expanded })
}
