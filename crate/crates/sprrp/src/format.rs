//! JSON instance files.
//!
//! Parsing is strict: unknown keys and wrong types are errors that name the
//! offending path. Serialization is canonical (sorted keys, two-space
//! indentation, trailing newline, integral numbers without a fraction), so
//! parse followed by serialize is a fixed point.

use serde_json::{Map, Number, Value};
use sprrp_core::model::{EnergyParams, FleetSpec, GainAmplitudes, MovementSpec, PoiSpec, TaskSpec};
use sprrp_core::{Instance, Site};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("JSON syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: missing required field")]
    Missing { path: String },
    #[error("{path}: unknown field")]
    UnknownField { path: String },
    #[error("{path}: expected {expected}")]
    Type { path: String, expected: &'static str },
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

/// A JSON object being consumed field by field.
struct Obj<'a> {
    path: String,
    map: &'a Map<String, Value>,
    allowed: &'static [&'static str],
}

impl<'a> Obj<'a> {
    fn new(path: String, value: &'a Value, allowed: &'static [&'static str]) -> Result<Self, FormatError> {
        let map = value.as_object().ok_or(FormatError::Type { path: path.clone(), expected: "an object" })?;
        if let Some(key) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(FormatError::UnknownField { path: join(&path, key) });
        }
        Ok(Self { path, map, allowed })
    }

    fn field(&self, key: &str) -> Option<&'a Value> {
        debug_assert!(self.allowed.contains(&key));
        self.map.get(key)
    }

    fn required(&self, key: &str) -> Result<&'a Value, FormatError> {
        self.field(key).ok_or_else(|| FormatError::Missing { path: join(&self.path, key) })
    }

    fn number(&self, key: &str) -> Result<f64, FormatError> {
        number(&join(&self.path, key), self.required(key)?)
    }

    fn number_or(&self, key: &str, default: f64) -> Result<f64, FormatError> {
        self.field(key).map_or(Ok(default), |v| number(&join(&self.path, key), v))
    }

    fn bool_or(&self, key: &str, default: bool) -> Result<bool, FormatError> {
        match self.field(key) {
            None => Ok(default),
            Some(v) => v.as_bool().ok_or(FormatError::Type { path: join(&self.path, key), expected: "a boolean" }),
        }
    }

    fn string(&self, key: &str) -> Result<&'a str, FormatError> {
        self.required(key)?.as_str().ok_or(FormatError::Type { path: join(&self.path, key), expected: "a string" })
    }

    fn array(&self, key: &str) -> Result<&'a Vec<Value>, FormatError> {
        self.required(key)?.as_array().ok_or(FormatError::Type { path: join(&self.path, key), expected: "an array" })
    }
}

fn number(path: &str, v: &Value) -> Result<f64, FormatError> {
    v.as_f64().ok_or(FormatError::Type { path: path.to_string(), expected: "a number" })
}

fn task(path: String, v: &Value, default_benefit: f64) -> Result<TaskSpec, FormatError> {
    let o = Obj::new(path, v, &["benefit", "draw", "duration"])?;
    Ok(TaskSpec { duration: o.number("duration")?, draw: o.number("draw")?, benefit: o.number_or("benefit", default_benefit)? })
}

/// Parses an instance document. Structural problems are reported here;
/// value rules (positive durations, complete movement matrix, ...) are left
/// to [`Instance::validate`].
pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let root: Value = serde_json::from_str(text).map_err(|e| FormatError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let top = Obj::new(String::new(), &root, &["description", "energy", "fleet", "horizon", "movements", "options", "pois"])?;

    let description = match top.field("description") {
        None => None,
        Some(v) => Some(v.as_str().ok_or(FormatError::Type { path: "description".into(), expected: "a string" })?.to_string()),
    };

    let mut pois = Vec::new();
    for (i, v) in top.array("pois")?.iter().enumerate() {
        let path = format!("pois[{i}]");
        let o = Obj::new(path.clone(), v, &["charge", "id", "move_benefit", "research"])?;
        pois.push(PoiSpec {
            id: o.string("id")?.to_string(),
            research: task(join(&path, "research"), o.required("research")?, 1.0)?,
            charge: task(join(&path, "charge"), o.required("charge")?, 0.0)?,
            move_benefit: o.number_or("move_benefit", 0.0)?,
        });
    }

    let mut movements = Vec::new();
    for (i, v) in top.array("movements")?.iter().enumerate() {
        let o = Obj::new(format!("movements[{i}]"), v, &["benefit", "draw", "duration", "from", "to"])?;
        movements.push(MovementSpec {
            from: Site::from_name(o.string("from")?),
            to: Site::from_name(o.string("to")?),
            duration: o.number("duration")?,
            draw: o.number("draw")?,
            benefit: o.number_or("benefit", 0.0)?,
        });
    }

    let f = Obj::new("fleet".into(), top.required("fleet")?, &["battery_capacity", "duration_scale", "initial_energy", "vehicles"])?;
    let vehicles = f.required("vehicles")?;
    let vehicles = vehicles
        .as_u64()
        .ok_or(FormatError::Type { path: "fleet.vehicles".into(), expected: "a non-negative integer" })?
        as usize;
    let initial_energy = match f.field("initial_energy") {
        None | Some(Value::Null) => None,
        Some(v) => Some(number("fleet.initial_energy", v)?),
    };
    let duration_scale = match f.field("duration_scale") {
        None => Vec::new(),
        Some(v) => v
            .as_array()
            .ok_or(FormatError::Type { path: "fleet.duration_scale".into(), expected: "an array" })?
            .iter()
            .enumerate()
            .map(|(k, s)| number(&format!("fleet.duration_scale[{k}]"), s))
            .collect::<Result<_, _>>()?,
    };
    let fleet = FleetSpec { vehicles, battery_capacity: f.number("battery_capacity")?, initial_energy, duration_scale };

    let energy = match top.field("energy") {
        None => EnergyParams::default(),
        Some(v) => {
            let e = Obj::new("energy".into(), v, &["gain_amplitude", "sol_period"])?;
            let gain_amplitude = match e.field("gain_amplitude") {
                None => GainAmplitudes::default(),
                Some(g) => {
                    let g = Obj::new("energy.gain_amplitude".into(), g, &["C", "M", "R"])?;
                    GainAmplitudes {
                        movement: g.number_or("M", 1.0)?,
                        research: g.number_or("R", 1.0)?,
                        charging: g.number_or("C", 1.0)?,
                    }
                }
            };
            EnergyParams { sol_period: e.number_or("sol_period", 1.0)?, gain_amplitude }
        }
    };

    let h = Obj::new("horizon".into(), top.required("horizon")?, &["t0", "t_max"])?;
    let (t0, t_max) = (h.number_or("t0", 0.0)?, h.number("t_max")?);

    let (return_to_base, allow_charge_only_visit) = match top.field("options") {
        None => (true, true),
        Some(v) => {
            let o = Obj::new("options".into(), v, &["allow_charge_only_visit", "return_to_base"])?;
            (o.bool_or("return_to_base", true)?, o.bool_or("allow_charge_only_visit", true)?)
        }
    };

    Ok(Instance { description, pois, movements, fleet, energy, t0, t_max, return_to_base, allow_charge_only_visit })
}

/// Integral values print without a fraction.
pub fn num(x: f64) -> Value {
    if x.fract() == 0.0 && x.abs() < 9.0e15 {
        Value::Number(Number::from(x as i64))
    } else {
        Number::from_f64(x).map_or(Value::Null, Value::Number)
    }
}

fn obj<const N: usize>(fields: [(&str, Value); N]) -> Value {
    Value::Object(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

fn task_value(t: &TaskSpec) -> Value {
    obj([("benefit", num(t.benefit)), ("draw", num(t.draw)), ("duration", num(t.duration))])
}

/// JSON value of an instance with every defaulted field spelled out.
pub fn instance_value(inst: &Instance) -> Value {
    let pois = inst
        .pois
        .iter()
        .map(|p| {
            obj([
                ("charge", task_value(&p.charge)),
                ("id", Value::String(p.id.clone())),
                ("move_benefit", num(p.move_benefit)),
                ("research", task_value(&p.research)),
            ])
        })
        .collect();
    let movements = inst
        .movements
        .iter()
        .map(|m| {
            obj([
                ("benefit", num(m.benefit)),
                ("draw", num(m.draw)),
                ("duration", num(m.duration)),
                ("from", Value::String(m.from.name().to_string())),
                ("to", Value::String(m.to.name().to_string())),
            ])
        })
        .collect();
    let mut fleet = Map::new();
    fleet.insert("battery_capacity".into(), num(inst.fleet.battery_capacity));
    fleet.insert("vehicles".into(), Value::from(inst.fleet.vehicles));
    if let Some(b0) = inst.fleet.initial_energy {
        fleet.insert("initial_energy".into(), num(b0));
    }
    if !inst.fleet.duration_scale.is_empty() {
        fleet.insert("duration_scale".into(), inst.fleet.duration_scale.iter().map(|&s| num(s)).collect());
    }
    let g = inst.energy.gain_amplitude;
    let mut root = Map::new();
    if let Some(d) = &inst.description {
        root.insert("description".into(), Value::String(d.clone()));
    }
    root.insert(
        "energy".into(),
        obj([
            ("gain_amplitude", obj([("C", num(g.charging)), ("M", num(g.movement)), ("R", num(g.research))])),
            ("sol_period", num(inst.energy.sol_period)),
        ]),
    );
    root.insert("fleet".into(), Value::Object(fleet));
    root.insert("horizon".into(), obj([("t0", num(inst.t0)), ("t_max", num(inst.t_max))]));
    root.insert("movements".into(), Value::Array(movements));
    root.insert(
        "options".into(),
        obj([
            ("allow_charge_only_visit", Value::Bool(inst.allow_charge_only_visit)),
            ("return_to_base", Value::Bool(inst.return_to_base)),
        ]),
    );
    root.insert("pois".into(), Value::Array(pois));
    Value::Object(root)
}

/// Canonical text of a JSON value: sorted keys, pretty, newline-terminated.
pub fn canonical(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn serialize_instance(inst: &Instance) -> String {
    canonical(&instance_value(inst))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "pois": [{"id": "a", "research": {"duration": 1, "draw": 2}, "charge": {"duration": 0.5, "draw": 0}}],
        "movements": [
            {"from": "base", "to": "a", "duration": 1, "draw": 1},
            {"from": "a", "to": "base", "duration": 1, "draw": 1}
        ],
        "fleet": {"vehicles": 1, "battery_capacity": 4},
        "horizon": {"t_max": 3}
    }"#;

    #[test]
    fn defaults_apply() {
        let inst = parse_instance(MINIMAL).unwrap();
        assert!(inst.validate().is_empty());
        assert_eq!(inst.t0, 0.0);
        assert_eq!(inst.pois[0].research.benefit, 1.0);
        assert_eq!(inst.pois[0].charge.benefit, 0.0);
        assert_eq!(inst.energy.gain_amplitude, GainAmplitudes::uniform(1.0));
        assert!(inst.return_to_base && inst.allow_charge_only_visit);
        assert_eq!(inst.initial_energy(), 4.0);
    }

    #[test]
    fn canonical_is_a_fixed_point() {
        let inst = parse_instance(MINIMAL).unwrap();
        let text = serialize_instance(&inst);
        assert_eq!(parse_instance(&text).unwrap(), inst);
        assert_eq!(serialize_instance(&parse_instance(&text).unwrap()), text);
        assert!(text.ends_with("}\n"));
        let keys: Vec<&str> = ["\"energy\"", "\"fleet\"", "\"horizon\"", "\"movements\"", "\"options\"", "\"pois\""].to_vec();
        let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn missing_t_max() {
        let text = MINIMAL.replace(r#""horizon": {"t_max": 3}"#, r#""horizon": {}"#);
        let err = parse_instance(&text).unwrap_err();
        assert_eq!(err.to_string(), "horizon.t_max: missing required field");
    }

    #[test]
    fn unknown_and_mistyped_fields() {
        let text = MINIMAL.replace(r#""vehicles": 1"#, r#""vehicles": 1, "colour": "red""#);
        assert_eq!(parse_instance(&text).unwrap_err().to_string(), "fleet.colour: unknown field");
        let text = MINIMAL.replace(r#""draw": 2"#, r#""draw": "2""#);
        assert_eq!(parse_instance(&text).unwrap_err().to_string(), "pois[0].research.draw: expected a number");
    }

    #[test]
    fn zero_pois() {
        let text = r#"{"pois": [], "movements": [], "fleet": {"vehicles": 2, "battery_capacity": 1}, "horizon": {"t_max": 1}}"#;
        let inst = parse_instance(text).unwrap();
        assert!(inst.validate().is_empty());
        assert!(inst.pois.is_empty());
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_instance("{\n  \"pois\": [,]\n}").unwrap_err();
        match err {
            FormatError::Syntax { line, column, .. } => assert_eq!((line, column), (2, 12)),
            other => panic!("unexpected {other}"),
        }
    }
}
