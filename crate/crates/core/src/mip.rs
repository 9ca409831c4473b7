//! Mixed-integer linear model of the routing problem.
//!
//! Per vehicle `k` the model has a binary `x` per graph edge, a binary `y`
//! per event node (visited or not), and continuous arrival time `t` and
//! battery level `b` per node, plus `tr`/`br` for the arrival back at base on
//! closed tours. Solar gain is linearized through the cumulative daylight
//! `D(t)`, written at every timed point as a piecewise-linear function with
//! a breakpoint at every half sol (incremental encoding: one `d` variable per
//! segment and one `z` binary per inner breakpoint).
//!
//! Battery rows keep the inequality `b_j <= b_i + gain - draw` so energy may
//! be discarded at capacity.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use libm::{ceil, floor};
use thiserror::Error;

use crate::energy::solar_power;
use crate::graph::{expand, EdgeId, GraphError, NodeId, NodeKind, BASE};
use crate::model::{Instance, TaskType, Violation};

/// Default limit on half-sol segments in the horizon.
pub const MAX_SEGMENTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

/// Coefficient and variable index.
pub type Term = (f64, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<Term>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A maximization model.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MipModel {
    pub variables: Vec<Variable>,
    pub objective: Vec<Term>,
    pub constraints: Vec<Constraint>,
}

/// Variable and constraint counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Census {
    pub binaries: usize,
    pub continuous: usize,
    pub constraints: usize,
}

impl MipModel {
    pub fn add_var(&mut self, name: String, kind: VarKind, lower: f64, upper: f64) -> usize {
        self.variables.push(Variable { name, kind, lower, upper });
        self.variables.len() - 1
    }

    pub fn add_constraint(&mut self, name: String, terms: Vec<Term>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint { name, terms, relation, rhs });
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn census(&self) -> Census {
        let binaries = self.variables.iter().filter(|v| v.kind == VarKind::Binary).count();
        Census { binaries, continuous: self.variables.len() - binaries, constraints: self.constraints.len() }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MipError {
    #[error("invalid instance ({} violations)", .0.len())]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("horizon spans {found} half-sol segments, limit is {limit}")]
    TooManySegments { found: usize, limit: usize },
}

/// Segment of the daylight breakpoint grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub len: f64,
    pub lit: bool,
}

/// Splits `[t0, t_max]` at every half sol.
pub fn segments(t0: f64, t_max: f64) -> Vec<Segment> {
    let mut cuts = Vec::new();
    cuts.push(t0);
    let mut h = floor(t0 * 2.0) + 1.0;
    while h / 2.0 < t_max {
        if h / 2.0 > t0 {
            cuts.push(h / 2.0);
        }
        h += 1.0;
    }
    cuts.push(t_max);
    cuts.windows(2)
        .map(|w| Segment { start: w[0], len: w[1] - w[0], lit: solar_power((w[0] + w[1]) / 2.0) > 0.0 })
        .collect()
}

/// Upper estimate of the segment count, used to refuse huge horizons
/// before building the grid.
fn segment_estimate(t0: f64, t_max: f64) -> usize {
    (ceil(t_max * 2.0) - floor(t0 * 2.0)).max(1.0) as usize
}

fn node_name(n: NodeId) -> String {
    format!("n{}", n.0)
}

/// Builds the model for `inst` with the default segment limit.
pub fn linearize(inst: &Instance) -> Result<MipModel, MipError> {
    linearize_with_limit(inst, MAX_SEGMENTS)
}

pub fn linearize_with_limit(inst: &Instance, max_segments: usize) -> Result<MipModel, MipError> {
    let violations = inst.validate();
    if !violations.is_empty() {
        return Err(MipError::Invalid(violations));
    }
    if segment_estimate(inst.t0, inst.t_max) > max_segments + 1 {
        return Err(MipError::TooManySegments { found: segment_estimate(inst.t0, inst.t_max), limit: max_segments });
    }
    let segs = segments(inst.t0, inst.t_max);
    if segs.len() > max_segments {
        return Err(MipError::TooManySegments { found: segs.len(), limit: max_segments });
    }
    let graph = expand(inst)?;
    let closed = inst.return_to_base;
    let (t0, t_max) = (inst.t0, inst.t_max);
    let capacity = inst.fleet.battery_capacity;
    let amps = inst.energy.gain_amplitude;
    let max_gain = amps.movement.max(amps.research).max(amps.charging);
    let daylight_range: f64 = segs.iter().filter(|s| s.lit).map(|s| s.len).sum();

    let mut m = MipModel::default();
    let nodes = graph.nodes.len();
    let mut y_by_vehicle: Vec<Vec<usize>> = Vec::new();

    for k in 0..inst.fleet.vehicles {
        let scale = inst.duration_scale(k);
        let tau = |e: EdgeId| graph.edge(e).duration * scale;
        let max_tau = graph.edges.iter().map(|e| tau(e.id)).fold(0.0, f64::max);
        let max_draw = graph.edges.iter().map(|e| e.draw * tau(e.id)).fold(0.0, f64::max);
        let big_t = t_max - t0 + max_tau;
        let big_b = capacity + max_draw + max_gain * daylight_range + 1.0;

        let x: Vec<usize> = graph
            .edges
            .iter()
            .map(|e| {
                let name = format!("x_k{k}_{}_{}_{}", node_name(e.from), node_name(e.to), e.task.code());
                m.add_var(name, VarKind::Binary, 0.0, 1.0)
            })
            .collect();
        let y: Vec<usize> = (0..nodes)
            .map(|j| m.add_var(format!("y_k{k}_n{j}"), VarKind::Binary, 0.0, 1.0))
            .collect();
        let t: Vec<usize> = (0..nodes)
            .map(|j| {
                let lower = t0;
                let upper = if j == BASE.0 { t0 } else { t_max };
                m.add_var(format!("t_k{k}_n{j}"), VarKind::Continuous, lower, upper)
            })
            .collect();
        let b: Vec<usize> = (0..nodes)
            .map(|j| {
                let b0 = inst.initial_energy();
                let (lower, upper) = if j == BASE.0 { (b0, b0) } else { (0.0, capacity) };
                m.add_var(format!("b_k{k}_n{j}"), VarKind::Continuous, lower, upper)
            })
            .collect();
        let ret = closed.then(|| {
            let tr = m.add_var(format!("tr_k{k}"), VarKind::Continuous, t0, t_max);
            let br = m.add_var(format!("br_k{k}"), VarKind::Continuous, 0.0, capacity);
            (tr, br)
        });

        // Timed points carrying a daylight expression: every PoI node, then
        // the return arrival.
        let mut points: Vec<(String, usize)> = (1..nodes).map(|j| (format!("n{j}"), t[j])).collect();
        if let Some((tr, _)) = ret {
            points.push((String::from("r"), tr));
        }
        // Lit-segment d variables per point, indexed like `points`; the base
        // sits at t0 and contributes none.
        let mut lit_terms: Vec<Vec<usize>> = Vec::new();
        for (label, tv) in &points {
            let d: Vec<usize> = segs
                .iter()
                .enumerate()
                .map(|(s, seg)| m.add_var(format!("d_k{k}_{label}_s{s}"), VarKind::Continuous, 0.0, seg.len))
                .collect();
            let z: Vec<usize> = (0..segs.len().saturating_sub(1))
                .map(|s| m.add_var(format!("z_k{k}_{label}_s{s}"), VarKind::Binary, 0.0, 1.0))
                .collect();
            let mut terms = alloc::vec![(1.0, *tv)];
            terms.extend(d.iter().map(|&v| (-1.0, v)));
            m.add_constraint(format!("pw_k{k}_{label}"), terms, Relation::Eq, t0);
            for s in 0..z.len() {
                m.add_constraint(
                    format!("pwlo_k{k}_{label}_s{s}"),
                    alloc::vec![(1.0, d[s]), (-segs[s].len, z[s])],
                    Relation::Ge,
                    0.0,
                );
                m.add_constraint(
                    format!("pwhi_k{k}_{label}_s{s}"),
                    alloc::vec![(1.0, d[s + 1]), (-segs[s + 1].len, z[s])],
                    Relation::Le,
                    0.0,
                );
            }
            lit_terms.push(d.iter().zip(&segs).filter(|(_, s)| s.lit).map(|(&v, _)| v).collect());
        }
        let point_of = |node: NodeId, is_return: bool| -> Option<usize> {
            if is_return {
                Some(nodes - 1)
            } else if node == BASE {
                None
            } else {
                Some(node.0 - 1)
            }
        };

        // Degree rows.
        for j in 1..nodes {
            let mut terms: Vec<Term> = graph.incoming(NodeId(j)).map(|e| (1.0, x[e.id.0])).collect();
            terms.push((-1.0, y[j]));
            m.add_constraint(format!("in_k{k}_n{j}"), terms, Relation::Eq, 0.0);
        }
        if closed {
            let mut terms: Vec<Term> = graph.incoming(BASE).map(|e| (1.0, x[e.id.0])).collect();
            terms.push((-1.0, y[0]));
            m.add_constraint(format!("in_k{k}_n0"), terms, Relation::Eq, 0.0);
        }
        for j in 0..nodes {
            let node = NodeId(j);
            let mut terms: Vec<Term> = graph.adjacency[j].iter().map(|&e| (1.0, x[e.0])).collect();
            terms.push((-1.0, y[j]));
            let kind = graph.nodes[j].kind;
            let relation = if closed || matches!(kind, NodeKind::Base | NodeKind::PoiIn) { Relation::Eq } else { Relation::Le };
            m.add_constraint(format!("out_k{k}_{}", node_name(node)), terms, relation, 0.0);
        }

        // Research and charging at most once per PoI; a visit must research
        // unless charge-only visits are allowed.
        for p in 0..graph.poi_count() {
            let research: Vec<Term> = graph.poi_research_edges[p].iter().map(|e| (1.0, x[e.0])).collect();
            let charge: Vec<Term> = graph.poi_charge_edges[p].iter().map(|e| (1.0, x[e.0])).collect();
            m.add_constraint(format!("oneR_k{k}_p{p}"), research.clone(), Relation::Le, 1.0);
            m.add_constraint(format!("oneC_k{k}_p{p}"), charge.clone(), Relation::Le, 1.0);
            let mut terms: Vec<Term> = alloc::vec![(1.0, y[3 * p + 1])];
            terms.extend(research.iter().map(|&(_, v)| (-1.0, v)));
            if inst.allow_charge_only_visit {
                if let Some(first) = graph.poi_charge_edges[p].first {
                    terms.push((-1.0, x[first.0]));
                }
            }
            m.add_constraint(format!("visit_k{k}_p{p}"), terms, Relation::Le, 0.0);
        }

        // Time chaining: equality when the edge is used.
        for e in &graph.edges {
            let is_return = e.to == BASE;
            let (ti, tj) = (t[e.from.0], if is_return { ret.expect("returns imply closed tours").0 } else { t[e.to.0] });
            let d = tau(e.id);
            m.add_constraint(
                format!("tlo_k{k}_e{}", e.id.0),
                alloc::vec![(1.0, tj), (-1.0, ti), (-big_t, x[e.id.0])],
                Relation::Ge,
                d - big_t,
            );
            m.add_constraint(
                format!("thi_k{k}_e{}", e.id.0),
                alloc::vec![(1.0, tj), (-1.0, ti), (big_t, x[e.id.0])],
                Relation::Le,
                d + big_t,
            );
        }

        // Battery recursion.
        for e in &graph.edges {
            let is_return = e.to == BASE;
            let bj = if is_return { ret.expect("returns imply closed tours").1 } else { b[e.to.0] };
            let g = e.gain_amp;
            let mut terms: Vec<Term> = alloc::vec![(1.0, bj), (-1.0, b[e.from.0])];
            if g != 0.0 {
                if let Some(pj) = point_of(e.to, is_return) {
                    terms.extend(lit_terms[pj].iter().map(|&v| (-g, v)));
                }
                if let Some(pi) = point_of(e.from, false) {
                    terms.extend(lit_terms[pi].iter().map(|&v| (g, v)));
                }
            }
            terms.push((big_b, x[e.id.0]));
            m.add_constraint(format!("bat_k{k}_e{}", e.id.0), terms, Relation::Le, big_b - e.draw * tau(e.id));
        }

        for e in graph.edges.iter().filter(|e| e.benefit != 0.0) {
            m.objective.push((e.benefit, x[e.id.0]));
        }
        y_by_vehicle.push(y);
    }

    for j in 1..nodes {
        let terms: Vec<Term> = y_by_vehicle.iter().map(|y| (1.0, y[j])).collect();
        m.add_constraint(format!("once_n{j}"), terms, Relation::Le, 1.0);
    }
    Ok(m)
}

/// Reads a task type back from an `x` variable name.
pub fn task_of_x(name: &str) -> Option<TaskType> {
    name.strip_prefix("x_").and_then(|rest| rest.rsplit('_').next()).and_then(TaskType::from_code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use alloc::collections::BTreeSet;

    /// Counts derived by hand from the row and column lists in the module
    /// docs, for `n` PoIs, `k` vehicles and `s` segments.
    fn expected(n: usize, k: usize, closed: bool, s: usize) -> Census {
        let c = closed as usize;
        let nodes = 3 * n + 1;
        let edges = 4 * n + n + 2 * n * n.saturating_sub(1) + 2 * n * c;
        let points = 3 * n + c;
        let per_vehicle_rows =
            (3 * n + c) + nodes + 3 * n + 2 * edges + edges + points * (1 + 2 * (s - 1));
        Census {
            binaries: k * (edges + nodes + points * (s - 1)),
            continuous: k * (2 * nodes + 2 * c + points * s),
            constraints: k * per_vehicle_rows + 3 * n,
        }
    }

    #[test]
    fn segment_grid() {
        let s = segments(0.0, 8.0);
        assert_eq!(s.len(), 16);
        assert!(s[0].lit && !s[1].lit);
        let s = segments(0.25, 1.25);
        assert_eq!(s.len(), 3);
        assert_eq!((s[0].len, s[1].len, s[2].len), (0.25, 0.5, 0.25));
        assert_eq!((s[0].lit, s[1].lit, s[2].lit), (true, false, true));
        assert_eq!(segments(0.1, 0.2).len(), 1);
    }

    #[test]
    fn fixture_counts() {
        let inst = two_poi(6.0);
        let m = linearize(&inst).unwrap();
        let xs = m.variables.iter().filter(|v| v.name.starts_with("x_")).count();
        assert_eq!(xs, 14);
        assert_eq!(m.census(), expected(2, 1, false, 16));

        let mut closed = two_poi(6.0);
        closed.return_to_base = true;
        let m = linearize(&closed).unwrap();
        assert_eq!(m.variables.iter().filter(|v| v.name.starts_with("x_")).count(), 18);
        assert_eq!(m.census(), expected(2, 1, true, 16));
    }

    #[test]
    fn empty_instance() {
        let mut inst = two_poi(6.0);
        inst.pois.clear();
        inst.movements.clear();
        let m = linearize(&inst).unwrap();
        assert!(m.objective.is_empty());
        assert_eq!(m.variables.iter().filter(|v| v.name.starts_with("x_")).count(), 0);
    }

    #[test]
    fn names_unique_and_referenced() {
        let mut inst = two_poi(6.0);
        inst.fleet.vehicles = 2;
        inst.return_to_base = true;
        let m = linearize(&inst).unwrap();
        let names: BTreeSet<&str> = m.variables.iter().map(|v| v.name.as_str()).collect();
        assert_eq!(names.len(), m.variables.len());
        let rows: BTreeSet<&str> = m.constraints.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(rows.len(), m.constraints.len());
        for c in &m.constraints {
            assert!(c.terms.iter().all(|&(_, v)| v < m.variables.len()));
        }
        assert_eq!(task_of_x("x_k1_n0_n1_M"), Some(TaskType::Movement));
    }

    #[test]
    fn segment_guard() {
        let mut inst = two_poi(6.0);
        inst.t_max = 40.0;
        assert!(matches!(linearize(&inst), Err(MipError::TooManySegments { .. })));
        assert!(linearize_with_limit(&inst, 80).is_ok());
    }
}
