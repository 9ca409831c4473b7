//! Graphviz dump of the event graph.

use std::fmt::Write;

use sprrp_core::{ExpandedGraph, Instance, NodeKind};

use crate::report::node_label;

/// DOT text with one node per event and one labelled edge per task.
pub fn to_dot(inst: &Instance, graph: &ExpandedGraph) -> String {
    let mut out = String::from("digraph sprrp {\n  rankdir=LR;\n");
    for node in &graph.nodes {
        let shape = if node.kind == NodeKind::Base { "box" } else { "ellipse" };
        let _ = writeln!(out, "  {} [label=\"{}\", shape={shape}];", node.id, escape(&node_label(inst, graph, node.id)));
    }
    for e in &graph.edges {
        let _ = writeln!(
            out,
            "  {} -> {} [label=\"{} d={} w={} b={}\"];",
            e.from, e.to, e.task, e.duration, e.draw, e.benefit
        );
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
