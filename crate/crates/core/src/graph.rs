//! Event graph: one base node plus a three-node gadget per PoI.
//!
//! Node ids are dense: the base is 0 and PoI `p` owns `3p + 1` (entry),
//! `3p + 2` (middle) and `3p + 3` (exit). Research and charging edges run in
//! parallel from entry to middle and from middle to exit, so a visit can do
//! research, charge, or both in either order. Movements leave from the middle
//! (after one internal task) or the exit (after two) and arrive at another
//! PoI's entry, or at the base when tours are closed.

use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::model::{Instance, Site, TaskType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Base,
    PoiIn,
    PoiMid,
    PoiOut,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventNode {
    pub id: NodeId,
    pub kind: NodeKind,
    /// Index into `Instance::pois`; `None` for the base.
    pub poi: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskEdge {
    pub id: EdgeId,
    pub from: NodeId,
    pub to: NodeId,
    pub task: TaskType,
    /// Nominal duration, before any per-vehicle scale.
    pub duration: f64,
    pub draw: f64,
    pub gain_amp: f64,
    pub benefit: f64,
    /// PoI whose gadget the edge belongs to (internal edges) or enters
    /// (movements); `None` for returns to base.
    pub poi: Option<usize>,
}

/// The two parallel edges of one task type inside a gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GadgetPair {
    /// Entry -> middle.
    pub first: Option<EdgeId>,
    /// Middle -> exit.
    pub second: Option<EdgeId>,
}

impl GadgetPair {
    pub fn iter(&self) -> impl Iterator<Item = EdgeId> {
        self.first.into_iter().chain(self.second)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedGraph {
    pub nodes: Vec<EventNode>,
    pub edges: Vec<TaskEdge>,
    /// Outgoing edges per node, ordered by target id then task type.
    pub adjacency: Vec<Vec<EdgeId>>,
    pub poi_research_edges: Vec<GadgetPair>,
    pub poi_charge_edges: Vec<GadgetPair>,
    pub return_to_base: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("no movement from {from} to {to}")]
    MissingMovement { from: alloc::string::String, to: alloc::string::String },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

pub const BASE: NodeId = NodeId(0);

pub fn poi_in(poi: usize) -> NodeId {
    NodeId(3 * poi + 1)
}

pub fn poi_mid(poi: usize) -> NodeId {
    NodeId(3 * poi + 2)
}

pub fn poi_out(poi: usize) -> NodeId {
    NodeId(3 * poi + 3)
}

/// Builds the event graph of `inst`.
pub fn expand(inst: &Instance) -> Result<ExpandedGraph, GraphError> {
    let n = inst.pois.len();
    let mut nodes = Vec::with_capacity(3 * n + 1);
    nodes.push(EventNode { id: BASE, kind: NodeKind::Base, poi: None });
    for p in 0..n {
        nodes.push(EventNode { id: poi_in(p), kind: NodeKind::PoiIn, poi: Some(p) });
        nodes.push(EventNode { id: poi_mid(p), kind: NodeKind::PoiMid, poi: Some(p) });
        nodes.push(EventNode { id: poi_out(p), kind: NodeKind::PoiOut, poi: Some(p) });
    }

    let gains = inst.energy.gain_amplitude;
    let mut edges: Vec<TaskEdge> = Vec::new();
    let mut push = |from, to, task, duration, draw, benefit, poi| {
        let id = EdgeId(edges.len());
        edges.push(TaskEdge { id, from, to, task, duration, draw, gain_amp: gains.get(task), benefit, poi });
    };

    for (p, spec) in inst.pois.iter().enumerate() {
        for (from, to) in [(poi_in(p), poi_mid(p)), (poi_mid(p), poi_out(p))] {
            let r = &spec.research;
            push(from, to, TaskType::Research, r.duration, r.draw, r.benefit, Some(p));
            let c = &spec.charge;
            push(from, to, TaskType::Charging, c.duration, c.draw, c.benefit, Some(p));
        }
    }

    let movement = |from: Option<usize>, to: Option<usize>| {
        let (a, b) = (inst.site_of(from), inst.site_of(to));
        inst.movement(&a, &b).ok_or_else(|| GraphError::MissingMovement {
            from: a.name().into(),
            to: b.name().into(),
        })
    };

    for p in 0..n {
        let m = movement(None, Some(p))?;
        let benefit = m.benefit + inst.pois[p].move_benefit;
        push(BASE, poi_in(p), TaskType::Movement, m.duration, m.draw, benefit, Some(p));
    }
    for p in 0..n {
        for q in (0..n).filter(|&q| q != p) {
            let m = movement(Some(q), Some(p))?;
            let benefit = m.benefit + inst.pois[p].move_benefit;
            for from in [poi_mid(q), poi_out(q)] {
                push(from, poi_in(p), TaskType::Movement, m.duration, m.draw, benefit, Some(p));
            }
        }
    }
    if inst.return_to_base {
        for p in 0..n {
            let m = movement(Some(p), None)?;
            for from in [poi_mid(p), poi_out(p)] {
                push(from, BASE, TaskType::Movement, m.duration, m.draw, m.benefit, None);
            }
        }
    }

    Ok(ExpandedGraph::from_parts(nodes, edges, n, inst.return_to_base))
}

impl ExpandedGraph {
    fn from_parts(nodes: Vec<EventNode>, edges: Vec<TaskEdge>, pois: usize, return_to_base: bool) -> Self {
        let mut adjacency = alloc::vec![Vec::new(); nodes.len()];
        for e in &edges {
            adjacency[e.from.0].push(e.id);
        }
        for out in &mut adjacency {
            out.sort_by_key(|id| (edges[id.0].to, edges[id.0].task, *id));
        }
        let mut research = alloc::vec![GadgetPair::default(); pois];
        let mut charge = alloc::vec![GadgetPair::default(); pois];
        for e in &edges {
            let table = match e.task {
                TaskType::Research => &mut research,
                TaskType::Charging => &mut charge,
                TaskType::Movement => continue,
            };
            let Some(p) = e.poi else { continue };
            if e.from == poi_in(p) {
                table[p].first = Some(e.id);
            } else {
                table[p].second = Some(e.id);
            }
        }
        Self { nodes, edges, adjacency, poi_research_edges: research, poi_charge_edges: charge, return_to_base }
    }

    pub fn poi_count(&self) -> usize {
        self.poi_research_edges.len()
    }

    pub fn edge(&self, id: EdgeId) -> &TaskEdge {
        &self.edges[id.0]
    }

    pub fn node(&self, id: NodeId) -> Option<&EventNode> {
        self.nodes.get(id.0)
    }

    /// Outgoing edges of `node` in stable order (target id, then task type).
    pub fn outgoing(&self, node: NodeId) -> Result<impl Iterator<Item = &TaskEdge> + '_, GraphError> {
        let out = self.adjacency.get(node.0).ok_or(GraphError::UnknownNode(node))?;
        Ok(out.iter().map(move |id| &self.edges[id.0]))
    }

    pub fn incoming(&self, node: NodeId) -> impl Iterator<Item = &TaskEdge> + '_ {
        self.edges.iter().filter(move |e| e.to == node)
    }

    pub fn find_edge(&self, from: NodeId, to: NodeId, task: TaskType) -> Option<EdgeId> {
        self.adjacency
            .get(from.0)?
            .iter()
            .copied()
            .find(|id| self.edges[id.0].to == to && self.edges[id.0].task == task)
    }

    /// Copy of the graph keeping only edges accepted by `keep`; edge ids are
    /// renumbered densely.
    pub fn retain_edges(&self, mut keep: impl FnMut(&TaskEdge) -> bool) -> Self {
        let mut edges: Vec<TaskEdge> = self.edges.iter().filter(|e| keep(e)).cloned().collect();
        for (i, e) in edges.iter_mut().enumerate() {
            e.id = EdgeId(i);
        }
        Self::from_parts(self.nodes.clone(), edges, self.poi_count(), self.return_to_base)
    }

    /// Site name of a node's PoI, or `base`.
    pub fn site_name<'a>(&self, inst: &'a Instance, node: NodeId) -> &'a str {
        match self.nodes[node.0].poi {
            Some(p) => &inst.pois[p].id,
            None => Site::BASE_NAME,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;

    #[test]
    fn fixture_counts() {
        let mut inst = two_poi(4.0);
        inst.return_to_base = true;
        let g = expand(&inst).unwrap();
        assert_eq!(g.nodes.len(), 7);
        assert_eq!(g.edges.len(), 18);
        inst.return_to_base = false;
        assert_eq!(expand(&inst).unwrap().edges.len(), 14);
    }

    #[test]
    fn empty_instance() {
        let mut inst = two_poi(4.0);
        inst.pois.clear();
        inst.movements.clear();
        let g = expand(&inst).unwrap();
        assert_eq!(g.nodes.len(), 1);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn outgoing_examples() {
        let mut inst = two_poi(4.0);
        inst.return_to_base = true;
        let g = expand(&inst).unwrap();
        let base: Vec<_> = g.outgoing(BASE).unwrap().map(|e| (e.to, e.task)).collect();
        assert_eq!(base, [(poi_in(0), TaskType::Movement), (poi_in(1), TaskType::Movement)]);
        let in1: Vec<_> = g.outgoing(poi_in(0)).unwrap().map(|e| (e.to, e.task)).collect();
        assert_eq!(in1, [(poi_mid(0), TaskType::Research), (poi_mid(0), TaskType::Charging)]);
        assert!(matches!(g.outgoing(NodeId(99)), Err(GraphError::UnknownNode(_))));

        inst.return_to_base = false;
        let g = expand(&inst).unwrap();
        let out1: Vec<_> = g.outgoing(poi_out(0)).unwrap().map(|e| (e.to, e.task)).collect();
        assert_eq!(out1, [(poi_in(1), TaskType::Movement)]);
    }

    #[test]
    fn missing_movement() {
        let mut inst = two_poi(4.0);
        inst.movements.retain(|m| !(m.from == Site::from_name("poi2") && m.to == Site::from_name("poi1")));
        assert_eq!(
            expand(&inst),
            Err(GraphError::MissingMovement { from: "poi2".into(), to: "poi1".into() })
        );
    }

    #[test]
    fn attributes_follow_specs() {
        let mut inst = two_poi(4.0);
        inst.return_to_base = true;
        inst.pois[1].move_benefit = 2.0;
        let g = expand(&inst).unwrap();
        for e in &g.edges {
            assert!(e.duration > 0.0);
            let src = g.nodes[e.from.0].poi;
            let dst = g.nodes[e.to.0].poi;
            match e.task {
                TaskType::Movement => {
                    assert_eq!(g.nodes[e.to.0].kind != NodeKind::PoiIn, dst.is_none());
                    let m = inst.movement(&inst.site_of(src), &inst.site_of(dst)).unwrap();
                    assert_eq!((e.duration, e.draw), (m.duration, m.draw));
                    let bonus = dst.map_or(0.0, |p| inst.pois[p].move_benefit);
                    assert_eq!(e.benefit, m.benefit + bonus);
                    assert_eq!(e.gain_amp, 4.0);
                }
                TaskType::Research | TaskType::Charging => {
                    assert_eq!(src, dst);
                    let p = &inst.pois[src.unwrap()];
                    let spec = if e.task == TaskType::Research { &p.research } else { &p.charge };
                    assert_eq!((e.duration, e.draw, e.benefit), (spec.duration, spec.draw, spec.benefit));
                }
            }
        }
        for p in 0..2 {
            assert_eq!(g.poi_research_edges[p].iter().count(), 2);
            assert_eq!(g.poi_charge_edges[p].iter().count(), 2);
        }
    }

    #[test]
    fn retain_drops_charging() {
        let g = expand(&two_poi(4.0)).unwrap();
        let h = g.retain_edges(|e| e.task != TaskType::Charging);
        assert_eq!(h.edges.len(), g.edges.len() - 4);
        assert!(h.poi_charge_edges.iter().all(|p| p.iter().count() == 0));
        assert!(h.edges.iter().enumerate().all(|(i, e)| e.id.0 == i));
    }

    #[test]
    fn node_count_law() {
        for n in 0..6 {
            let mut inst = two_poi(4.0);
            inst.pois.clear();
            inst.movements.clear();
            for p in 0..n {
                inst.pois.push(poi(&alloc::format!("p{p}"), 1.0, 1.0));
            }
            let names: Vec<_> = core::iter::once(alloc::string::String::from("base"))
                .chain(inst.pois.iter().map(|p| p.id.clone()))
                .collect();
            for a in &names {
                for b in &names {
                    if a != b {
                        inst.movements.push(mv(a, b, 1.0));
                    }
                }
            }
            let g = expand(&inst).unwrap();
            assert_eq!(g.nodes.len(), 3 * n + 1);
            assert_eq!(g.edges.len(), 4 * n + n + 2 * n * n.saturating_sub(1));
            for p in 0..n {
                assert!(g.incoming(poi_in(p)).any(|e| e.from == BASE));
                assert!(g.incoming(poi_mid(p)).all(|e| e.from == poi_in(p)));
            }
        }
    }
}
