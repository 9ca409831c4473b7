//! Timed per-vehicle schedules and their independent audit.

use alloc::vec::Vec;

use thiserror::Error;

use crate::exact::{apply_edge, Limits, VehicleState};
use crate::graph::{EdgeId, ExpandedGraph, NodeId, NodeKind, BASE};
use crate::model::{Instance, TaskType};
use crate::set::PoiSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Search finished; no better schedule exists.
    Optimal,
    /// Best schedule found before a budget ran out.
    Feasible,
    /// Budget ran out before any complete schedule was found.
    InfeasibleEmpty,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::InfeasibleEmpty => "infeasible-empty",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledTask {
    pub edge: EdgeId,
    pub task: TaskType,
    pub from: NodeId,
    pub to: NodeId,
    pub start: f64,
    pub end: f64,
    pub battery_after: f64,
    pub benefit: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VehicleRoute {
    pub tasks: Vec<ScheduledTask>,
}

impl VehicleRoute {
    /// Time from departure to the end of the last task.
    pub fn busy_time(&self) -> f64 {
        match (self.tasks.first(), self.tasks.last()) {
            (Some(a), Some(b)) => b.end - a.start,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub routes: Vec<VehicleRoute>,
    pub objective: f64,
    pub status: SolveStatus,
}

impl Solution {
    pub fn empty(vehicles: usize, status: SolveStatus) -> Self {
        Self { routes: alloc::vec![VehicleRoute::default(); vehicles], objective: 0.0, status }
    }

    pub fn busy_time(&self) -> f64 {
        self.routes.iter().map(VehicleRoute::busy_time).sum()
    }

    pub fn tasks(&self) -> impl Iterator<Item = (usize, &ScheduledTask)> {
        self.routes.iter().enumerate().flat_map(|(k, r)| r.tasks.iter().map(move |t| (k, t)))
    }

    pub fn charge_count(&self) -> usize {
        self.tasks().filter(|(_, t)| t.task == TaskType::Charging).count()
    }

    /// PoIs entered by any vehicle.
    pub fn visited_pois(&self, graph: &ExpandedGraph) -> PoiSet {
        self.tasks()
            .filter(|(_, t)| graph.nodes[t.to.0].kind == NodeKind::PoiIn)
            .filter_map(|(_, t)| graph.nodes[t.to.0].poi)
            .collect()
    }

    /// PoIs where research was performed.
    pub fn researched_pois(&self, graph: &ExpandedGraph) -> PoiSet {
        self.tasks()
            .filter(|(_, t)| t.task == TaskType::Research)
            .filter_map(|(_, t)| graph.edge(t.edge).poi)
            .collect()
    }

    /// PoIs where a charging task was performed.
    pub fn charged_pois(&self, graph: &ExpandedGraph) -> PoiSet {
        self.tasks()
            .filter(|(_, t)| t.task == TaskType::Charging)
            .filter_map(|(_, t)| graph.edge(t.edge).poi)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AuditError {
    #[error("solution has {found} routes, fleet has {expected} vehicles")]
    RouteCount { expected: usize, found: usize },
    #[error("vehicle {vehicle} task {index}: unknown edge or endpoint mismatch")]
    BadEdge { vehicle: usize, index: usize },
    #[error("vehicle {vehicle} task {index}: route does not chain from the previous event")]
    Chain { vehicle: usize, index: usize },
    #[error("vehicle {vehicle} task {index}: infeasible (battery or horizon)")]
    Infeasible { vehicle: usize, index: usize },
    #[error("vehicle {vehicle} task {index}: recorded times or battery differ from replay")]
    Mismatch { vehicle: usize, index: usize },
    #[error("vehicle {vehicle} task {index}: leaves a PoI after a lone charge")]
    ChargeOnly { vehicle: usize, index: usize },
    #[error("PoI {0} visited by more than one vehicle")]
    SharedPoi(usize),
    #[error("vehicle {0} ends at a node where a route may not end")]
    BadEnd(usize),
    #[error("objective {recorded} differs from replayed benefit {replayed}")]
    Objective { recorded: f64, replayed: f64 },
}

/// Whether a vehicle may finish its route at `node`.
///
/// Closed tours end at the base. Open paths end at a gadget's middle or
/// exit, but never right after a lone charge unless charge-only visits are
/// allowed.
pub(crate) fn may_end_at(inst: &Instance, graph: &ExpandedGraph, node: NodeId, researched_here: bool) -> bool {
    match graph.nodes[node.0].kind {
        NodeKind::Base => true,
        NodeKind::PoiIn => false,
        NodeKind::PoiMid => !inst.return_to_base && (researched_here || inst.allow_charge_only_visit),
        NodeKind::PoiOut => !inst.return_to_base,
    }
}

/// Replays `sol` through [`apply_edge`] and checks that every recorded time,
/// battery level and the objective are reproduced bit for bit.
pub fn audit(inst: &Instance, graph: &ExpandedGraph, sol: &Solution) -> Result<(), AuditError> {
    if sol.routes.len() != inst.fleet.vehicles {
        return Err(AuditError::RouteCount { expected: inst.fleet.vehicles, found: sol.routes.len() });
    }
    let mut seen = PoiSet::new();
    let mut total = 0.0;
    for (k, route) in sol.routes.iter().enumerate() {
        let limits = Limits::for_vehicle(inst, k);
        let mut state = VehicleState::start(inst);
        for (i, task) in route.tasks.iter().enumerate() {
            let edge = graph.edges.get(task.edge.0).ok_or(AuditError::BadEdge { vehicle: k, index: i })?;
            if edge.from != task.from || edge.to != task.to || edge.task != task.task {
                return Err(AuditError::BadEdge { vehicle: k, index: i });
            }
            if edge.from != state.node || (state.node == BASE && i > 0) {
                return Err(AuditError::Chain { vehicle: k, index: i });
            }
            if edge.task == TaskType::Movement && graph.nodes[edge.from.0].kind == NodeKind::PoiMid {
                let here = graph.nodes[edge.from.0].poi.expect("gadget node has a PoI");
                if !state.done_research.contains(here) && !inst.allow_charge_only_visit {
                    return Err(AuditError::ChargeOnly { vehicle: k, index: i });
                }
            }
            let start = state.t;
            let next = apply_edge(&state, edge, &limits)
                .map_err(|_| AuditError::Chain { vehicle: k, index: i })?
                .ok_or(AuditError::Infeasible { vehicle: k, index: i })?;
            if task.start != start || task.end != next.t || task.battery_after != next.b || task.benefit != edge.benefit {
                return Err(AuditError::Mismatch { vehicle: k, index: i });
            }
            if graph.nodes[edge.to.0].kind == NodeKind::PoiIn {
                let p = edge.poi.expect("movement into a PoI names it");
                if !seen.insert(p) {
                    return Err(AuditError::SharedPoi(p));
                }
            }
            total += edge.benefit;
            state = next;
        }
        if !route.tasks.is_empty() {
            let here = graph.nodes[state.node.0].poi;
            let researched = here.is_some_and(|p| state.done_research.contains(p));
            if !may_end_at(inst, graph, state.node, researched) {
                return Err(AuditError::BadEnd(k));
            }
        }
    }
    if total != sol.objective {
        return Err(AuditError::Objective { recorded: sol.objective, replayed: total });
    }
    Ok(())
}
