//! Parameter sweeps.

use std::time::Instant;

use sprrp_core::{expand, Instance};
use thiserror::Error;

use crate::report::plan_string;
use crate::solvers::{solve, SolveFailure, SolveOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepParam {
    Battery,
    InitialEnergy,
    TMax,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Battery => "battery",
            SweepParam::InitialEnergy => "initial-energy",
            SweepParam::TMax => "t-max",
        }
    }

    /// Copy of `inst` with the parameter set to `value`.
    pub fn apply(self, inst: &Instance, value: f64) -> Instance {
        let mut out = inst.clone();
        match self {
            SweepParam::Battery => out.fleet.battery_capacity = value,
            SweepParam::InitialEnergy => out.fleet.initial_energy = Some(value),
            SweepParam::TMax => out.t_max = value,
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("step must be positive and finite")]
    BadStep,
    #[error("range is empty: from {from} > to {to}")]
    EmptyRange { from: f64, to: f64 },
    #[error("{param} = {value}: {source}")]
    Solve { param: &'static str, value: f64, source: SolveFailure },
}

/// `from + i * step` for every `i` that stays within `to` (with a little
/// slack for rounding).
pub fn sweep_values(from: f64, to: f64, step: f64) -> Result<Vec<f64>, SweepError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(SweepError::BadStep);
    }
    if !(from <= to) {
        return Err(SweepError::EmptyRange { from, to });
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| from + i as f64 * step).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub objective: f64,
    pub visited: Vec<bool>,
    pub charge_tasks: usize,
    pub plan: String,
    pub status: &'static str,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub param: SweepParam,
    pub poi_ids: Vec<String>,
    pub rows: Vec<SweepRow>,
}

pub fn run_sweep(inst: &Instance, param: SweepParam, values: &[f64], opts: &SolveOptions) -> Result<SweepResult, SweepError> {
    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let variant = param.apply(inst, value);
        let started = Instant::now();
        let fail = |source| SweepError::Solve { param: param.name(), value, source };
        let sol = solve(&variant, opts).map_err(fail)?;
        let wall_time = started.elapsed().as_secs_f64();
        let graph = expand(&variant).map_err(|e| fail(SolveFailure::Exact(e.into())))?;
        let visited = sol.visited_pois(&graph);
        log::debug!("{} = {value}: objective {}", param.name(), sol.objective);
        rows.push(SweepRow {
            value,
            objective: sol.objective,
            visited: (0..inst.pois.len()).map(|p| visited.contains(p)).collect(),
            charge_tasks: sol.charge_count(),
            plan: plan_string(&variant, &graph, &sol),
            status: sol.status.as_str(),
            wall_time,
        });
    }
    Ok(SweepResult { param, poi_ids: inst.pois.iter().map(|p| p.id.clone()).collect(), rows })
}

/// CSV table; the wall-time column is only written when `timings` is set so
/// that repeated runs produce identical files.
pub fn sweep_csv(result: &SweepResult, timings: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![String::from("value"), String::from("objective")];
    header.extend(result.poi_ids.iter().map(|id| format!("visited_{id}")));
    header.extend(["charge_tasks", "plan", "status"].map(String::from));
    if timings {
        header.push(String::from("wall_time_s"));
    }
    w.write_record(&header).expect("writing to memory");
    for r in &result.rows {
        let mut rec = vec![r.value.to_string(), r.objective.to_string()];
        rec.extend(r.visited.iter().map(|&v| (v as u8).to_string()));
        rec.push(r.charge_tasks.to_string());
        rec.push(r.plan.clone());
        rec.push(r.status.to_string());
        if timings {
            rec.push(format!("{:.6}", r.wall_time));
        }
        w.write_record(&rec).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("CSV of UTF-8 fields")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        assert_eq!(sweep_values(4.0, 12.0, 1.0).unwrap().len(), 9);
        assert_eq!(sweep_values(0.0, 1.0, 0.1).unwrap().len(), 11);
        assert_eq!(sweep_values(1.0, 1.0, 0.5).unwrap(), vec![1.0]);
        assert!(matches!(sweep_values(0.0, 1.0, 0.0), Err(SweepError::BadStep)));
        assert!(matches!(sweep_values(2.0, 1.0, 1.0), Err(SweepError::EmptyRange { .. })));
        let v = sweep_values(0.0, 3.0, 0.3).unwrap();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }
}
