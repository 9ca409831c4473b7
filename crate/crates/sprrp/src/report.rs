//! Solution artifacts: JSON, timeline CSV and a text summary.

use std::fmt::Write;

use serde_json::{Map, Value};
use sprrp_core::plan::{plan_of, VisitMode};
use sprrp_core::{ExpandedGraph, Instance, NodeId, NodeKind, Solution};

use crate::format::{canonical, num};

/// Human-readable event name: `base`, `<id>.in`, `<id>.mid` or `<id>.out`.
pub fn node_label(inst: &Instance, graph: &ExpandedGraph, node: NodeId) -> String {
    let n = &graph.nodes[node.0];
    match (n.kind, n.poi) {
        (NodeKind::Base, _) | (_, None) => String::from("base"),
        (NodeKind::PoiIn, Some(p)) => format!("{}.in", inst.pois[p].id),
        (NodeKind::PoiMid, Some(p)) => format!("{}.mid", inst.pois[p].id),
        (NodeKind::PoiOut, Some(p)) => format!("{}.out", inst.pois[p].id),
    }
}

fn mode_code(mode: VisitMode) -> &'static str {
    match mode {
        VisitMode::Research => "R",
        VisitMode::ChargeResearch => "C>R",
        VisitMode::ResearchCharge => "R>C",
        VisitMode::ChargeOnly => "C",
    }
}

/// Compact route description, e.g. `v0: poi1[C>R] poi2[R]; v1: -`.
pub fn plan_string(inst: &Instance, graph: &ExpandedGraph, sol: &Solution) -> String {
    plan_of(graph, sol)
        .iter()
        .enumerate()
        .map(|(k, visits)| {
            let body = if visits.is_empty() {
                String::from("-")
            } else {
                visits.iter().map(|v| format!("{}[{}]", inst.pois[v.poi].id, mode_code(v.mode))).collect::<Vec<_>>().join(" ")
            };
            format!("v{k}: {body}")
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// Ids of visited PoIs in instance order.
pub fn visited_ids(inst: &Instance, graph: &ExpandedGraph, sol: &Solution) -> Vec<String> {
    let visited = sol.visited_pois(graph);
    visited.iter().map(|p| inst.pois[p].id.clone()).collect()
}

/// JSON solution artifact.
pub fn solution_value(inst: &Instance, graph: &ExpandedGraph, sol: &Solution, solver: &str) -> Value {
    let routes: Vec<Value> = sol
        .routes
        .iter()
        .enumerate()
        .map(|(k, route)| {
            let tasks: Vec<Value> = route
                .tasks
                .iter()
                .map(|t| {
                    let mut m = Map::new();
                    m.insert("battery_after".into(), num(t.battery_after));
                    m.insert("benefit".into(), num(t.benefit));
                    m.insert("edge".into(), Value::from(t.edge.0));
                    m.insert("from_node".into(), Value::String(node_label(inst, graph, t.from)));
                    m.insert("t_end".into(), num(t.end));
                    m.insert("t_start".into(), num(t.start));
                    m.insert("task_type".into(), Value::String(t.task.to_string()));
                    m.insert("to_node".into(), Value::String(node_label(inst, graph, t.to)));
                    Value::Object(m)
                })
                .collect();
            let mut m = Map::new();
            m.insert("busy_time".into(), num(route.busy_time()));
            m.insert("tasks".into(), Value::Array(tasks));
            m.insert("vehicle".into(), Value::from(k));
            Value::Object(m)
        })
        .collect();
    let mut root = Map::new();
    root.insert("busy_time".into(), num(sol.busy_time()));
    root.insert("charge_tasks".into(), Value::from(sol.charge_count()));
    root.insert("objective".into(), num(sol.objective));
    root.insert("plan".into(), Value::String(plan_string(inst, graph, sol)));
    root.insert("routes".into(), Value::Array(routes));
    root.insert("solver".into(), Value::String(solver.to_string()));
    root.insert("status".into(), Value::String(sol.status.as_str().to_string()));
    root.insert("visited".into(), visited_ids(inst, graph, sol).into_iter().map(Value::String).collect());
    Value::Object(root)
}

pub fn solution_json(inst: &Instance, graph: &ExpandedGraph, sol: &Solution, solver: &str) -> String {
    canonical(&solution_value(inst, graph, sol, solver))
}

pub const TIMELINE_HEADER: [&str; 8] =
    ["vehicle", "task_type", "from_node", "to_node", "t_start", "t_end", "battery_after", "benefit"];

/// One row per scheduled task, vehicles in order.
pub fn timeline_csv(inst: &Instance, graph: &ExpandedGraph, sol: &Solution) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TIMELINE_HEADER).expect("writing to memory");
    for (k, t) in sol.tasks() {
        w.write_record([
            k.to_string(),
            t.task.to_string(),
            node_label(inst, graph, t.from),
            node_label(inst, graph, t.to),
            t.start.to_string(),
            t.end.to_string(),
            t.battery_after.to_string(),
            t.benefit.to_string(),
        ])
        .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("CSV of UTF-8 fields")
}

/// Text report for standard output.
pub fn summary(inst: &Instance, graph: &ExpandedGraph, sol: &Solution, solver: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "solver: {solver} ({})", sol.status.as_str());
    let _ = writeln!(out, "objective: {}", sol.objective);
    let _ = writeln!(out, "plan: {}", plan_string(inst, graph, sol));
    for (k, route) in sol.routes.iter().enumerate() {
        let _ = writeln!(out, "vehicle {k}:");
        if route.tasks.is_empty() {
            let _ = writeln!(out, "  (idle)");
        }
        for t in &route.tasks {
            let _ = writeln!(
                out,
                "  {} {:>9} -> {:<9} t {} .. {}  battery {}  benefit {}",
                t.task,
                node_label(inst, graph, t.from),
                node_label(inst, graph, t.to),
                t.start,
                t.end,
                t.battery_after,
                t.benefit
            );
        }
    }
    out
}
