//! Seeded random instances for tests and benchmarks.
//!
//! Every number is a small dyadic fraction (durations in eighths, draws and
//! amplitudes in quarters, integer benefits), so floating point sums and
//! products over these instances are exact.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{EnergyParams, FleetSpec, GainAmplitudes, Instance, MovementSpec, PoiSpec, Site, TaskSpec};

/// Size and option ranges for [`random_instance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpec {
    pub min_pois: usize,
    pub max_pois: usize,
    pub max_vehicles: usize,
    /// Longest horizon, in sols.
    pub max_span: f64,
    /// Pick `return_to_base` and charge-only visits at random; otherwise
    /// closed tours with charge-only visits allowed.
    pub vary_options: bool,
    /// Draw distinct per-vehicle duration scales now and then.
    pub vary_scales: bool,
}

impl Default for RandomSpec {
    fn default() -> Self {
        Self { min_pois: 1, max_pois: 3, max_vehicles: 2, max_span: 6.0, vary_options: true, vary_scales: true }
    }
}

fn quarters(rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> f64 {
    rng.gen_range(lo..=hi) as f64 / 4.0
}

fn eighths(rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> f64 {
    rng.gen_range(lo..=hi) as f64 / 8.0
}

fn task(rng: &mut ChaCha8Rng, benefit: f64) -> TaskSpec {
    TaskSpec { duration: eighths(rng, 1, 8), draw: quarters(rng, 0, 16), benefit }
}

/// A valid instance drawn from `seed`.
pub fn random_instance(seed: u64, spec: &RandomSpec) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(spec.min_pois..=spec.max_pois);
    let vehicles = rng.gen_range(1..=spec.max_vehicles.max(1));

    let pois: Vec<PoiSpec> = (0..n)
        .map(|i| {
            let research_benefit = rng.gen_range(1..=5) as f64;
            let charge_benefit = if rng.gen_ratio(1, 8) { 1.0 } else { 0.0 };
            PoiSpec {
                id: format!("p{}", i + 1),
                research: task(&mut rng, research_benefit),
                charge: task(&mut rng, charge_benefit),
                move_benefit: if rng.gen_ratio(1, 8) { 1.0 } else { 0.0 },
            }
        })
        .collect();

    let sites: Vec<Site> = core::iter::once(Site::Base).chain(pois.iter().map(|p| Site::Poi(p.id.clone()))).collect();
    let mut movements = Vec::new();
    for from in &sites {
        for to in &sites {
            if from != to {
                movements.push(MovementSpec {
                    from: from.clone(),
                    to: to.clone(),
                    duration: eighths(&mut rng, 1, 8),
                    draw: quarters(&mut rng, 0, 16),
                    benefit: 0.0,
                });
            }
        }
    }

    let battery_capacity = quarters(&mut rng, 1, 40);
    let initial_energy = if rng.gen_ratio(1, 3) {
        Some(rng.gen_range(0..=(battery_capacity * 4.0) as u32) as f64 / 4.0)
    } else {
        None
    };
    let duration_scale = if spec.vary_scales && vehicles > 1 && rng.gen_ratio(1, 3) {
        (0..vehicles).map(|_| [0.5, 1.0, 1.5, 2.0][rng.gen_range(0..4)]).collect()
    } else {
        Vec::new()
    };
    let gain_amplitude = GainAmplitudes {
        movement: quarters(&mut rng, 0, 24),
        research: quarters(&mut rng, 0, 24),
        charging: quarters(&mut rng, 0, 24),
    };
    let t0 = eighths(&mut rng, 0, 8);
    let span_quarters = (spec.max_span * 4.0).max(1.0) as u32;
    let t_max = t0 + quarters(&mut rng, 1, span_quarters);
    let (return_to_base, allow_charge_only_visit) =
        if spec.vary_options { (rng.gen_bool(0.5), rng.gen_bool(0.5)) } else { (true, true) };

    Instance {
        description: Some(format!("random instance, seed {seed}")),
        pois,
        movements,
        fleet: FleetSpec { vehicles, battery_capacity, initial_energy, duration_scale },
        energy: EnergyParams { sol_period: 1.0, gain_amplitude },
        t0,
        t_max,
        return_to_base,
        allow_charge_only_visit,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valid_and_reproducible() {
        let spec = RandomSpec::default();
        for seed in 0..200 {
            let inst = random_instance(seed, &spec);
            assert!(inst.validate().is_empty(), "seed {seed}: {:?}", inst.validate());
            assert!((1..=3).contains(&inst.pois.len()));
            assert!((1..=2).contains(&inst.fleet.vehicles));
            assert_eq!(inst, random_instance(seed, &spec));
        }
    }

    #[test]
    fn sizes_stay_in_range() {
        let spec = RandomSpec { min_pois: 6, max_pois: 6, max_vehicles: 1, ..RandomSpec::default() };
        let inst = random_instance(7, &spec);
        assert_eq!(inst.pois.len(), 6);
        assert_eq!(inst.movements.len(), 7 * 6);
        assert_eq!(inst.fleet.vehicles, 1);
    }
}
