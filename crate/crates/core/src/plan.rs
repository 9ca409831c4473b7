//! Route plans: per-vehicle PoI visit sequences, realized into timed
//! schedules over the event graph.

use alloc::vec::Vec;

use crate::exact::{apply_edge, Limits, VehicleState};
use crate::graph::{poi_in, poi_mid, poi_out, ExpandedGraph, NodeKind, BASE};
use crate::model::{Instance, TaskType};
use crate::set::PoiSet;
use crate::solution::{may_end_at, ScheduledTask, Solution, SolveStatus, VehicleRoute};

/// Internal tasks performed at a visited PoI, in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VisitMode {
    Research,
    ChargeResearch,
    ResearchCharge,
    ChargeOnly,
}

impl VisitMode {
    pub const ALL: [VisitMode; 4] =
        [VisitMode::Research, VisitMode::ChargeResearch, VisitMode::ResearchCharge, VisitMode::ChargeOnly];

    pub fn tasks(self) -> &'static [TaskType] {
        match self {
            VisitMode::Research => &[TaskType::Research],
            VisitMode::ChargeResearch => &[TaskType::Charging, TaskType::Research],
            VisitMode::ResearchCharge => &[TaskType::Research, TaskType::Charging],
            VisitMode::ChargeOnly => &[TaskType::Charging],
        }
    }

    pub fn charges(self) -> bool {
        self != VisitMode::Research
    }

    /// Modes usable on `inst`.
    pub fn available(inst: &Instance) -> &'static [VisitMode] {
        if inst.allow_charge_only_visit {
            &Self::ALL
        } else {
            &Self::ALL[..3]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Visit {
    pub poi: usize,
    pub mode: VisitMode,
}

/// One visit list per vehicle.
pub type Plan = Vec<Vec<Visit>>;

/// Timed route of one vehicle, or `None` if the visit list is infeasible
/// for it (battery, horizon, missing edge or a forbidden ending).
pub fn realize_route(inst: &Instance, graph: &ExpandedGraph, vehicle: usize, visits: &[Visit]) -> Option<VehicleRoute> {
    let limits = Limits::for_vehicle(inst, vehicle);
    let mut state = VehicleState::start(inst);
    let mut tasks = Vec::new();
    let mut step = |state: &mut VehicleState, to, task| -> Option<()> {
        let id = graph.find_edge(state.node, to, task)?;
        let edge = graph.edge(id);
        let next = apply_edge(state, edge, &limits).ok()??;
        tasks.push(ScheduledTask {
            edge: id,
            task,
            from: edge.from,
            to: edge.to,
            start: state.t,
            end: next.t,
            battery_after: next.b,
            benefit: edge.benefit,
        });
        *state = next;
        Some(())
    };
    for v in visits {
        if v.mode == VisitMode::ChargeOnly && !inst.allow_charge_only_visit {
            return None;
        }
        step(&mut state, poi_in(v.poi), TaskType::Movement)?;
        for (i, &task) in v.mode.tasks().iter().enumerate() {
            let to = if i == 0 { poi_mid(v.poi) } else { poi_out(v.poi) };
            step(&mut state, to, task)?;
        }
    }
    if let Some(last) = visits.last() {
        if inst.return_to_base {
            step(&mut state, BASE, TaskType::Movement)?;
        } else {
            let researched = state.done_research.contains(last.poi);
            if !may_end_at(inst, graph, state.node, researched) {
                return None;
            }
        }
    }
    Some(VehicleRoute { tasks })
}

/// Timed solution for `plan`, or `None` if any route is infeasible or two
/// vehicles share a PoI.
pub fn realize(inst: &Instance, graph: &ExpandedGraph, plan: &[Vec<Visit>]) -> Option<Solution> {
    let mut seen = PoiSet::new();
    for v in plan.iter().flatten() {
        if !seen.insert(v.poi) {
            return None;
        }
    }
    let routes = plan
        .iter()
        .enumerate()
        .map(|(k, visits)| realize_route(inst, graph, k, visits))
        .collect::<Option<Vec<_>>>()?;
    let objective = routes.iter().flat_map(|r| &r.tasks).fold(0.0, |acc, t| acc + t.benefit);
    Some(Solution { routes, objective, status: SolveStatus::Feasible })
}

/// Visit lists of a timed solution.
pub fn plan_of(graph: &ExpandedGraph, sol: &Solution) -> Plan {
    sol.routes
        .iter()
        .map(|route| {
            let mut visits: Vec<Visit> = Vec::new();
            let mut internal: Vec<TaskType> = Vec::new();
            let mut current: Option<usize> = None;
            let flush = |current: Option<usize>, internal: &mut Vec<TaskType>, visits: &mut Vec<Visit>| {
                if let Some(poi) = current {
                    let mode = match internal.as_slice() {
                        [TaskType::Charging, TaskType::Research] => VisitMode::ChargeResearch,
                        [TaskType::Research, TaskType::Charging] => VisitMode::ResearchCharge,
                        [TaskType::Charging] => VisitMode::ChargeOnly,
                        _ => VisitMode::Research,
                    };
                    visits.push(Visit { poi, mode });
                }
                internal.clear();
            };
            for t in &route.tasks {
                if t.task == TaskType::Movement {
                    flush(current, &mut internal, &mut visits);
                    current = match graph.nodes[t.to.0].kind {
                        NodeKind::PoiIn => graph.nodes[t.to.0].poi,
                        _ => None,
                    };
                } else {
                    internal.push(t.task);
                }
            }
            flush(current, &mut internal, &mut visits);
            visits
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::expand;
    use crate::model::fixtures::*;
    use crate::solution::audit;
    use alloc::vec;

    fn visit(poi: usize, mode: VisitMode) -> Visit {
        Visit { poi, mode }
    }

    #[test]
    fn realizes_and_audits() {
        let inst = two_poi(12.0);
        let graph = expand(&inst).unwrap();
        let plan = vec![vec![visit(0, VisitMode::Research), visit(1, VisitMode::Research)]];
        let sol = realize(&inst, &graph, &plan).unwrap();
        audit(&inst, &graph, &sol).unwrap();
        assert_eq!(sol.objective, 2.0);
        assert_eq!(sol.routes[0].tasks.len(), 4);
        assert_eq!(plan_of(&graph, &sol), plan);
    }

    #[test]
    fn rejects_infeasible_and_shared() {
        let inst = two_poi(4.0);
        let graph = expand(&inst).unwrap();
        assert!(realize(&inst, &graph, &[vec![visit(0, VisitMode::Research)]]).is_none());
        let sol = realize(&inst, &graph, &[vec![visit(0, VisitMode::ChargeResearch)]]).unwrap();
        assert_eq!(sol.objective, 1.0);
        assert_eq!(plan_of(&graph, &sol), vec![vec![visit(0, VisitMode::ChargeResearch)]]);

        let mut inst = two_poi(12.0);
        inst.fleet.vehicles = 2;
        let graph = expand(&inst).unwrap();
        let shared = vec![vec![visit(0, VisitMode::Research)], vec![visit(0, VisitMode::Research)]];
        assert!(realize(&inst, &graph, &shared).is_none());
    }

    #[test]
    fn charge_only_needs_permission() {
        let mut inst = single(0.0, 0.5, 1.0, 10.0);
        let graph = expand(&inst).unwrap();
        let plan = vec![vec![visit(0, VisitMode::ChargeOnly)]];
        let sol = realize(&inst, &graph, &plan).unwrap();
        audit(&inst, &graph, &sol).unwrap();
        assert_eq!(plan_of(&graph, &sol), plan);
        inst.allow_charge_only_visit = false;
        assert!(realize(&inst, &graph, &plan).is_none());
    }
}
