//! Brute-force reference solver for desk-sized instances.
//!
//! Every ordered subset of PoIs, with every visit mode, is enumerated for
//! every vehicle, and every assignment of pairwise disjoint routes to the
//! fleet is scored. Time and battery are propagated here from the instance
//! data directly, and solar gain comes from a composite midpoint rule over
//! the `sgn(sin)` square wave. Nothing in this module calls the exact
//! solver's propagation or the closed-form daylight function, so agreement
//! between the two solvers is real evidence.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use libm::{ceil, floor, sin};
use thiserror::Error;

use crate::graph::{expand, poi_in, poi_mid, poi_out, GraphError, NodeId, BASE};
use crate::model::{Instance, Site, TaskType, Violation};
use crate::solution::{ScheduledTask, Solution, SolveStatus, VehicleRoute};
use crate::{BENEFIT_EPS, FEASIBILITY_EPS};

/// Route-set budget that admits four PoIs and two vehicles.
pub const DEFAULT_LIMIT: u64 = 50_000;

/// Quadrature cell width, 2^-20 sol (just under 1e-6). Half-sol instants
/// fall on cell boundaries, so the rule never straddles a switch.
pub const QUADRATURE_STEP: f64 = 1.0 / 1_048_576.0;

/// Cells spanning a quarter sol; blocks this short hold at most one switch.
const QUARTER_CELLS: i64 = 1 << 18;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{count} route sets exceed the oracle limit {limit}")]
    LimitExceeded { count: u128, limit: u64 },
    #[error("invalid instance ({} violations)", .0.len())]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// What a vehicle does at a PoI it enters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum VisitMode {
    Research,
    ChargeResearch,
    ResearchCharge,
    ChargeOnly,
}

impl VisitMode {
    fn tasks(self) -> &'static [TaskType] {
        match self {
            VisitMode::Research => &[TaskType::Research],
            VisitMode::ChargeResearch => &[TaskType::Charging, TaskType::Research],
            VisitMode::ResearchCharge => &[TaskType::Research, TaskType::Charging],
            VisitMode::ChargeOnly => &[TaskType::Charging],
        }
    }

    fn available(charge_only: bool) -> &'static [VisitMode] {
        const ALL: [VisitMode; 4] =
            [VisitMode::Research, VisitMode::ChargeResearch, VisitMode::ResearchCharge, VisitMode::ChargeOnly];
        if charge_only {
            &ALL
        } else {
            &ALL[..3]
        }
    }
}

fn sunlit(s: f64) -> bool {
    sin(2.0 * PI * s) > 0.0
}

/// Lit cells among `[lo, hi)`.
fn lit_cells(lo: i64, hi: i64) -> i64 {
    let span = hi - lo;
    if span <= 0 {
        return 0;
    }
    let first = sunlit((lo as f64 + 0.5) * QUADRATURE_STEP);
    if span == 1 {
        return first as i64;
    }
    if span <= QUARTER_CELLS {
        let last = sunlit((hi as f64 - 0.5) * QUADRATURE_STEP);
        if first == last {
            return if first { span } else { 0 };
        }
    }
    let mid = lo + span / 2;
    lit_cells(lo, mid) + lit_cells(mid, hi)
}

/// Daylight in `[t, t + tau]` by the composite midpoint rule on the global
/// lattice of width [`QUADRATURE_STEP`].
pub fn quadrature_daylight(t: f64, tau: f64) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    let h = QUADRATURE_STEP;
    let (a, b) = (t, t + tau);
    let i0 = ceil(a / h) as i64;
    let i1 = floor(b / h) as i64;
    let value = |x: f64| if sunlit(x) { 1.0 } else { 0.0 };
    if i0 > i1 {
        return value((a + b) / 2.0) * (b - a);
    }
    let (la, rb) = (i0 as f64 * h, i1 as f64 * h);
    let left = if la > a { value((a + la) / 2.0) * (la - a) } else { 0.0 };
    let right = if b > rb { value((rb + b) / 2.0) * (b - rb) } else { 0.0 };
    left + lit_cells(i0, i1) as f64 * h + right
}

/// Number of route sets the oracle enumerates: every way to pick `j` PoIs,
/// split them into `vehicles` ordered lists and give each a mode.
pub fn route_set_count(pois: usize, vehicles: usize, modes: usize) -> u128 {
    let choose = |n: u128, k: u128| -> u128 {
        if k > n {
            return 0;
        }
        (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
    };
    let (n, k, m) = (pois as u128, vehicles as u128, modes as u128);
    (0..=n)
        .map(|j| {
            let arrangements = (1..=j).product::<u128>() * choose(j + k - 1, k - 1);
            choose(n, j) * arrangements * m.pow(j as u32)
        })
        .sum()
}

#[derive(Debug, Clone)]
struct Step {
    task: TaskType,
    from: NodeId,
    to: NodeId,
    start: f64,
    end: f64,
    battery: f64,
    benefit: f64,
}

#[derive(Debug, Clone)]
struct Route {
    visits: Vec<(usize, VisitMode)>,
    mask: u64,
    /// `None` when infeasible.
    steps: Option<Vec<Step>>,
    benefit: f64,
    busy: f64,
}

struct Walker<'a> {
    inst: &'a Instance,
    scale: f64,
    t: f64,
    b: f64,
    node: NodeId,
    steps: Vec<Step>,
}

impl Walker<'_> {
    fn step(&mut self, task: TaskType, to: NodeId, duration: f64, draw: f64, benefit: f64) -> Option<()> {
        let tau = duration * self.scale;
        let end = self.t + tau;
        if end > self.inst.t_max + FEASIBILITY_EPS {
            return None;
        }
        let gain = self.inst.energy.gain_amplitude.get(task) * quadrature_daylight(self.t, tau);
        let level = self.b + (gain - draw * tau);
        if level < -FEASIBILITY_EPS {
            return None;
        }
        let battery = level.max(0.0).min(self.inst.fleet.battery_capacity);
        self.steps.push(Step { task, from: self.node, to, start: self.t, end, battery, benefit });
        self.t = end;
        self.b = battery;
        self.node = to;
        Some(())
    }
}

fn walk(inst: &Instance, vehicle: usize, visits: &[(usize, VisitMode)]) -> Option<Vec<Step>> {
    let mut w = Walker {
        inst,
        scale: inst.duration_scale(vehicle),
        t: inst.t0,
        b: inst.initial_energy(),
        node: BASE,
        steps: Vec::new(),
    };
    let mut prev: Option<usize> = None;
    for &(p, mode) in visits {
        let poi = &inst.pois[p];
        let m = inst.movement(&inst.site_of(prev), &inst.site_of(Some(p)))?;
        w.step(TaskType::Movement, poi_in(p), m.duration, m.draw, m.benefit + poi.move_benefit)?;
        for (i, &task) in mode.tasks().iter().enumerate() {
            let spec = if task == TaskType::Research { &poi.research } else { &poi.charge };
            let to = if i == 0 { poi_mid(p) } else { poi_out(p) };
            w.step(task, to, spec.duration, spec.draw, spec.benefit)?;
        }
        prev = Some(p);
    }
    if inst.return_to_base {
        if let Some(p) = prev {
            let m = inst.movement(&inst.site_of(Some(p)), &Site::Base)?;
            w.step(TaskType::Movement, BASE, m.duration, m.draw, m.benefit)?;
        }
    }
    Some(w.steps)
}

fn routes_for(inst: &Instance, vehicle: usize, modes: &[VisitMode]) -> Vec<Route> {
    let n = inst.pois.len();
    let mut out = Vec::new();
    let mut prefix: Vec<(usize, VisitMode)> = Vec::new();
    fn grow(
        inst: &Instance,
        vehicle: usize,
        n: usize,
        modes: &[VisitMode],
        prefix: &mut Vec<(usize, VisitMode)>,
        out: &mut Vec<Route>,
    ) {
        let mask = prefix.iter().fold(0u64, |m, &(p, _)| m | 1 << p);
        let steps = walk(inst, vehicle, prefix);
        let (benefit, busy) = match &steps {
            Some(s) => (
                s.iter().map(|x| x.benefit).sum(),
                s.last().map_or(0.0, |l| l.end - inst.t0),
            ),
            None => (0.0, 0.0),
        };
        out.push(Route { visits: prefix.clone(), mask, steps, benefit, busy });
        for p in (0..n).filter(|p| mask & (1 << p) == 0) {
            for &mode in modes {
                prefix.push((p, mode));
                grow(inst, vehicle, n, modes, prefix, out);
                prefix.pop();
            }
        }
    }
    grow(inst, vehicle, n, modes, &mut prefix, &mut out);
    out
}

struct Best {
    benefit: f64,
    busy: f64,
    picks: Vec<usize>,
}

struct Combiner<'a> {
    per_vehicle: &'a [Vec<Route>],
    by_mask: Vec<BTreeMap<u64, Vec<usize>>>,
    picks: Vec<usize>,
    explored: u64,
    best: Option<Best>,
}

impl Combiner<'_> {
    fn encoding(&self, picks: &[usize]) -> Vec<&[(usize, VisitMode)]> {
        picks.iter().enumerate().map(|(k, &r)| self.per_vehicle[k][r].visits.as_slice()).collect()
    }

    fn consider(&mut self) {
        self.explored += 1;
        let routes: Vec<&Route> = self.picks.iter().enumerate().map(|(k, &r)| &self.per_vehicle[k][r]).collect();
        if routes.iter().any(|r| r.steps.is_none()) {
            return;
        }
        let benefit: f64 = routes.iter().map(|r| r.benefit).sum();
        let busy: f64 = routes.iter().map(|r| r.busy).sum();
        let better = match &self.best {
            None => true,
            Some(best) => {
                if benefit > best.benefit + BENEFIT_EPS {
                    true
                } else if benefit < best.benefit - BENEFIT_EPS {
                    false
                } else if busy < best.busy - FEASIBILITY_EPS {
                    true
                } else if busy > best.busy + FEASIBILITY_EPS {
                    false
                } else {
                    self.encoding(&self.picks).cmp(&self.encoding(&best.picks)) == Ordering::Less
                }
            }
        };
        if better {
            self.best = Some(Best { benefit, busy, picks: self.picks.clone() });
        }
    }

    fn assign(&mut self, vehicle: usize, used: u64) {
        if vehicle == self.per_vehicle.len() {
            self.consider();
            return;
        }
        let masks: Vec<u64> = self.by_mask[vehicle].keys().copied().filter(|m| m & used == 0).collect();
        for mask in masks {
            for i in 0..self.by_mask[vehicle][&mask].len() {
                let r = self.by_mask[vehicle][&mask][i];
                self.picks.push(r);
                self.assign(vehicle + 1, used | mask);
                self.picks.pop();
            }
        }
    }
}

/// Enumerates every feasible route set and returns the best one with the
/// number of route sets explored.
///
/// Ties on benefit go to the smaller total busy time, then to the
/// lexicographically smallest route encoding.
pub fn enumerate_all(inst: &Instance, hard_limit: u64) -> Result<(Solution, u64), OracleError> {
    let violations = inst.validate();
    if !violations.is_empty() {
        return Err(OracleError::Invalid(violations));
    }
    let modes = VisitMode::available(inst.allow_charge_only_visit);
    let count = route_set_count(inst.pois.len(), inst.fleet.vehicles, modes.len());
    if count > hard_limit as u128 || inst.pois.len() > 63 {
        return Err(OracleError::LimitExceeded { count, limit: hard_limit });
    }
    let graph = expand(inst)?;

    let per_vehicle: Vec<Vec<Route>> = (0..inst.fleet.vehicles).map(|k| routes_for(inst, k, modes)).collect();
    let by_mask = per_vehicle
        .iter()
        .map(|routes| {
            let mut map: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
            for (i, r) in routes.iter().enumerate() {
                map.entry(r.mask).or_default().push(i);
            }
            map
        })
        .collect();
    let mut comb = Combiner { per_vehicle: &per_vehicle, by_mask, picks: Vec::new(), explored: 0, best: None };
    comb.assign(0, 0);

    let best = comb.best.expect("the all-idle route set is always feasible");
    let mut objective = 0.0;
    let mut routes = Vec::with_capacity(best.picks.len());
    for (k, &r) in best.picks.iter().enumerate() {
        let steps = per_vehicle[k][r].steps.as_ref().expect("chosen routes are feasible");
        let mut tasks = Vec::with_capacity(steps.len());
        for s in steps {
            let edge = graph.find_edge(s.from, s.to, s.task).expect("oracle step matches a graph edge");
            objective += s.benefit;
            tasks.push(ScheduledTask {
                edge,
                task: s.task,
                from: s.from,
                to: s.to,
                start: s.start,
                end: s.end,
                battery_after: s.battery,
                benefit: s.benefit,
            });
        }
        routes.push(VehicleRoute { tasks });
    }
    Ok((Solution { routes, objective, status: SolveStatus::Optimal }, comb.explored))
}
