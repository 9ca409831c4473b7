//! Problem instances and their validation.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Kind of work a rover performs along a task edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TaskType {
    Movement,
    Research,
    Charging,
}

impl TaskType {
    pub const ALL: [TaskType; 3] = [TaskType::Movement, TaskType::Research, TaskType::Charging];

    /// Single-letter code: `M`, `R` or `C`.
    pub fn code(self) -> char {
        match self {
            TaskType::Movement => 'M',
            TaskType::Research => 'R',
            TaskType::Charging => 'C',
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "M" => Some(TaskType::Movement),
            "R" => Some(TaskType::Research),
            "C" => Some(TaskType::Charging),
            _ => None,
        }
    }
}

impl fmt::Display for TaskType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

/// Duration, power draw and benefit of one task at a PoI.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    /// Sols.
    pub duration: f64,
    /// Energy per sol.
    pub draw: f64,
    pub benefit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoiSpec {
    pub id: String,
    pub research: TaskSpec,
    pub charge: TaskSpec,
    /// Added to the benefit of every movement that arrives at this PoI.
    pub move_benefit: f64,
}

/// Endpoint of a movement: the base or a PoI id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    Base,
    Poi(String),
}

impl Site {
    /// Reserved name of the base in instance files.
    pub const BASE_NAME: &'static str = "base";

    pub fn name(&self) -> &str {
        match self {
            Site::Base => Self::BASE_NAME,
            Site::Poi(id) => id,
        }
    }

    pub fn from_name(name: &str) -> Self {
        if name == Self::BASE_NAME {
            Site::Base
        } else {
            Site::Poi(name.into())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MovementSpec {
    pub from: Site,
    pub to: Site,
    pub duration: f64,
    pub draw: f64,
    pub benefit: f64,
}

/// Solar gain amplitude per task type (energy per sol of daylight).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainAmplitudes {
    pub movement: f64,
    pub research: f64,
    pub charging: f64,
}

impl GainAmplitudes {
    pub const fn uniform(value: f64) -> Self {
        Self { movement: value, research: value, charging: value }
    }

    pub fn get(&self, task: TaskType) -> f64 {
        match task {
            TaskType::Movement => self.movement,
            TaskType::Research => self.research,
            TaskType::Charging => self.charging,
        }
    }
}

impl Default for GainAmplitudes {
    fn default() -> Self {
        Self::uniform(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParams {
    /// Length of a sol; fixed to 1.
    pub sol_period: f64,
    pub gain_amplitude: GainAmplitudes,
}

impl Default for EnergyParams {
    fn default() -> Self {
        Self { sol_period: 1.0, gain_amplitude: GainAmplitudes::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FleetSpec {
    pub vehicles: usize,
    pub battery_capacity: f64,
    /// `None` means a full battery at departure.
    pub initial_energy: Option<f64>,
    /// Per-vehicle multiplier on every task duration. Empty means all 1.
    pub duration_scale: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub description: Option<String>,
    pub pois: Vec<PoiSpec>,
    pub movements: Vec<MovementSpec>,
    pub fleet: FleetSpec,
    pub energy: EnergyParams,
    pub t0: f64,
    pub t_max: f64,
    pub return_to_base: bool,
    pub allow_charge_only_visit: bool,
}

impl Instance {
    pub fn initial_energy(&self) -> f64 {
        self.fleet.initial_energy.unwrap_or(self.fleet.battery_capacity)
    }

    pub fn duration_scale(&self, vehicle: usize) -> f64 {
        self.fleet.duration_scale.get(vehicle).copied().unwrap_or(1.0)
    }

    /// True when every vehicle has the same duration scale.
    pub fn homogeneous_fleet(&self) -> bool {
        let first = self.duration_scale(0);
        (1..self.fleet.vehicles).all(|k| self.duration_scale(k) == first)
    }

    pub fn poi_index(&self, id: &str) -> Option<usize> {
        self.pois.iter().position(|p| p.id == id)
    }

    pub fn movement(&self, from: &Site, to: &Site) -> Option<&MovementSpec> {
        self.movements.iter().find(|m| &m.from == from && &m.to == to)
    }

    pub fn site_of(&self, poi: Option<usize>) -> Site {
        match poi {
            None => Site::Base,
            Some(p) => Site::Poi(self.pois[p].id.clone()),
        }
    }

    /// Lists every violated invariant; empty iff the instance is valid.
    pub fn validate(&self) -> Vec<Violation> {
        validate(self)
    }
}

/// One broken invariant: the offending field and the rule it breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub rule: &'static str,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: violates \"{}\"", self.field, self.rule)
    }
}

pub mod rules {
    pub const DURATION_POSITIVE: &str = "duration > 0";
    pub const DRAW_NONNEGATIVE: &str = "draw >= 0";
    pub const BENEFIT_NONNEGATIVE: &str = "benefit >= 0";
    pub const ID_UNIQUE: &str = "PoI ids unique";
    pub const ID_NONEMPTY: &str = "PoI id non-empty";
    pub const ID_NOT_BASE: &str = "PoI id must not be \"base\"";
    pub const MOVE_DISTINCT: &str = "movement endpoints differ";
    pub const MOVE_KNOWN_SITE: &str = "movement endpoints name base or a known PoI";
    pub const MOVE_UNIQUE: &str = "at most one movement per ordered pair";
    pub const MOVE_COMPLETE: &str = "movement matrix complete";
    pub const SOL_PERIOD: &str = "T = 1";
    pub const GAIN_NONNEGATIVE: &str = "amplitudes >= 0";
    pub const VEHICLES: &str = "|K| >= 1";
    pub const CAPACITY: &str = "B >= 0";
    pub const INITIAL_ENERGY: &str = "0 <= b0 <= B";
    pub const SCALE_LEN: &str = "duration_scale has one entry per vehicle";
    pub const SCALE_POSITIVE: &str = "duration_scale > 0";
    pub const HORIZON: &str = "t0 < t_max";
    pub const FINITE: &str = "value is finite";
}

fn finite_check(out: &mut Vec<Violation>, field: String, value: f64) -> bool {
    if value.is_finite() {
        true
    } else {
        out.push(Violation { field, rule: rules::FINITE });
        false
    }
}

fn check_task(out: &mut Vec<Violation>, prefix: &str, duration: f64, draw: f64, benefit: f64) {
    if finite_check(out, format!("{prefix}.duration"), duration) && duration <= 0.0 {
        out.push(Violation { field: format!("{prefix}.duration"), rule: rules::DURATION_POSITIVE });
    }
    if finite_check(out, format!("{prefix}.draw"), draw) && draw < 0.0 {
        out.push(Violation { field: format!("{prefix}.draw"), rule: rules::DRAW_NONNEGATIVE });
    }
    if finite_check(out, format!("{prefix}.benefit"), benefit) && benefit < 0.0 {
        out.push(Violation { field: format!("{prefix}.benefit"), rule: rules::BENEFIT_NONNEGATIVE });
    }
}

pub fn validate(inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();

    for (i, poi) in inst.pois.iter().enumerate() {
        let prefix = format!("pois[{i}]");
        if poi.id.is_empty() {
            out.push(Violation { field: format!("{prefix}.id"), rule: rules::ID_NONEMPTY });
        }
        if poi.id == Site::BASE_NAME {
            out.push(Violation { field: format!("{prefix}.id"), rule: rules::ID_NOT_BASE });
        }
        if inst.pois[..i].iter().any(|q| q.id == poi.id) {
            out.push(Violation { field: format!("{prefix}.id"), rule: rules::ID_UNIQUE });
        }
        check_task(&mut out, &format!("{prefix}.research"), poi.research.duration, poi.research.draw, poi.research.benefit);
        check_task(&mut out, &format!("{prefix}.charge"), poi.charge.duration, poi.charge.draw, poi.charge.benefit);
        if finite_check(&mut out, format!("{prefix}.move_benefit"), poi.move_benefit) && poi.move_benefit < 0.0 {
            out.push(Violation { field: format!("{prefix}.move_benefit"), rule: rules::BENEFIT_NONNEGATIVE });
        }
    }

    let known = |site: &Site| match site {
        Site::Base => true,
        Site::Poi(id) => inst.poi_index(id).is_some(),
    };
    for (i, m) in inst.movements.iter().enumerate() {
        let prefix = format!("movements[{i}]");
        check_task(&mut out, &prefix, m.duration, m.draw, m.benefit);
        if m.from == m.to {
            out.push(Violation { field: prefix.clone(), rule: rules::MOVE_DISTINCT });
        }
        if !known(&m.from) || !known(&m.to) {
            out.push(Violation { field: prefix.clone(), rule: rules::MOVE_KNOWN_SITE });
        }
        if inst.movements[..i].iter().any(|o| o.from == m.from && o.to == m.to) {
            out.push(Violation { field: prefix, rule: rules::MOVE_UNIQUE });
        }
    }
    let sites: Vec<Site> = core::iter::once(Site::Base)
        .chain(inst.pois.iter().map(|p| Site::Poi(p.id.clone())))
        .collect();
    for from in &sites {
        for to in &sites {
            if from != to && inst.movement(from, to).is_none() {
                out.push(Violation {
                    field: format!("movements[{}->{}]", from.name(), to.name()),
                    rule: rules::MOVE_COMPLETE,
                });
            }
        }
    }

    if inst.energy.sol_period != 1.0 {
        out.push(Violation { field: "energy.sol_period".into(), rule: rules::SOL_PERIOD });
    }
    for task in TaskType::ALL {
        let amp = inst.energy.gain_amplitude.get(task);
        let field = format!("energy.gain_amplitude.{}", task.code());
        if finite_check(&mut out, field.clone(), amp) && amp < 0.0 {
            out.push(Violation { field, rule: rules::GAIN_NONNEGATIVE });
        }
    }

    let fleet = &inst.fleet;
    if fleet.vehicles < 1 {
        out.push(Violation { field: "fleet.vehicles".into(), rule: rules::VEHICLES });
    }
    let capacity_ok = finite_check(&mut out, "fleet.battery_capacity".into(), fleet.battery_capacity);
    if capacity_ok && fleet.battery_capacity < 0.0 {
        out.push(Violation { field: "fleet.battery_capacity".into(), rule: rules::CAPACITY });
    }
    if let Some(b0) = fleet.initial_energy {
        if finite_check(&mut out, "fleet.initial_energy".into(), b0)
            && capacity_ok
            && !(0.0..=fleet.battery_capacity).contains(&b0)
        {
            out.push(Violation { field: "fleet.initial_energy".into(), rule: rules::INITIAL_ENERGY });
        }
    }
    if !fleet.duration_scale.is_empty() && fleet.duration_scale.len() != fleet.vehicles {
        out.push(Violation { field: "fleet.duration_scale".into(), rule: rules::SCALE_LEN });
    }
    for (k, &s) in fleet.duration_scale.iter().enumerate() {
        let field = format!("fleet.duration_scale[{k}]");
        if finite_check(&mut out, field.clone(), s) && s <= 0.0 {
            out.push(Violation { field, rule: rules::SCALE_POSITIVE });
        }
    }

    let t0_ok = finite_check(&mut out, "horizon.t0".into(), inst.t0);
    let tmax_ok = finite_check(&mut out, "horizon.t_max".into(), inst.t_max);
    if t0_ok && tmax_ok && inst.t0 >= inst.t_max {
        out.push(Violation { field: "horizon.t_max".into(), rule: rules::HORIZON });
    }
    out
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use alloc::vec;

    pub fn task(duration: f64, draw: f64, benefit: f64) -> TaskSpec {
        TaskSpec { duration, draw, benefit }
    }

    pub fn poi(id: &str, research_draw: f64, charge_draw: f64) -> PoiSpec {
        PoiSpec {
            id: id.into(),
            research: task(1.0, research_draw, 1.0),
            charge: task(1.0, charge_draw, 0.0),
            move_benefit: 0.0,
        }
    }

    pub fn mv(from: &str, to: &str, draw: f64) -> MovementSpec {
        MovementSpec { from: Site::from_name(from), to: Site::from_name(to), duration: 1.0, draw, benefit: 0.0 }
    }

    /// The bundled two-PoI example: fixed draws and fitted gain amplitudes.
    pub fn two_poi(battery: f64) -> Instance {
        Instance {
            description: None,
            pois: vec![poi("poi1", 5.0, 1.0), poi("poi2", 5.0, 1.0)],
            movements: vec![
                mv("base", "poi1", 6.0),
                mv("base", "poi2", 10.0),
                mv("poi1", "base", 6.0),
                mv("poi1", "poi2", 4.0),
                mv("poi2", "base", 10.0),
                mv("poi2", "poi1", 4.0),
            ],
            fleet: FleetSpec { vehicles: 1, battery_capacity: battery, initial_energy: None, duration_scale: vec![] },
            energy: EnergyParams {
                sol_period: 1.0,
                gain_amplitude: GainAmplitudes { movement: 4.0, research: 8.0, charging: 4.0 },
            },
            t0: 0.0,
            t_max: 8.0,
            return_to_base: false,
            allow_charge_only_visit: true,
        }
    }

    /// One PoI with uniform, easily tuned parameters.
    pub fn single(draw: f64, duration: f64, battery: f64, t_max: f64) -> Instance {
        let t = task(duration, draw, 1.0);
        Instance {
            description: None,
            pois: vec![PoiSpec { id: "p".into(), research: t.clone(), charge: task(duration, draw, 0.0), move_benefit: 0.0 }],
            movements: vec![
                MovementSpec { from: Site::Base, to: Site::from_name("p"), duration, draw, benefit: 0.0 },
                MovementSpec { from: Site::from_name("p"), to: Site::Base, duration, draw, benefit: 0.0 },
            ],
            fleet: FleetSpec { vehicles: 1, battery_capacity: battery, initial_energy: None, duration_scale: vec![] },
            energy: EnergyParams { sol_period: 1.0, gain_amplitude: GainAmplitudes::uniform(0.0) },
            t0: 0.0,
            t_max,
            return_to_base: true,
            allow_charge_only_visit: true,
        }
    }
}
