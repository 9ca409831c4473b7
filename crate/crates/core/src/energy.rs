//! Solar gain and task energy deltas.
//!
//! Solar power is a square wave of period one sol: full gain during the first
//! half of every sol, nothing during the second half. The wave is taken as
//! half-open, `[k, k + 0.5) -> 1`, which only differs from the `sgn(sin)`
//! form on a measure-zero set of instants and so never changes an integral.
//!
//! The energy delta of a task is the solar gain accumulated while it runs
//! minus its constant draw times its duration.

use libm::floor;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EnergyError {
    #[error("negative task duration {0}")]
    NegativeDuration(f64),
    #[error("negative power draw {0}")]
    NegativeDraw(f64),
    #[error("negative gain amplitude {0}")]
    NegativeGain(f64),
}

/// Normalized solar power at instant `t` (sols): 1 in daylight, 0 at night.
pub fn solar_power(t: f64) -> f64 {
    if t - floor(t) < 0.5 {
        1.0
    } else {
        0.0
    }
}

/// Daylight accumulated over `[0, x]` for `x >= 0`.
fn cumulative(x: f64) -> f64 {
    let whole = floor(x);
    whole * 0.5 + (x - whole).min(0.5)
}

/// Length of daylight inside `[t, t + tau]`.
///
/// The start is reduced to its position within the sol first so that large
/// absolute times do not cost precision.
pub fn daylight(t: f64, tau: f64) -> Result<f64, EnergyError> {
    if tau.is_nan() || tau < 0.0 {
        return Err(EnergyError::NegativeDuration(tau));
    }
    let offset = t - floor(t);
    let lit = cumulative(offset + tau) - offset.min(0.5);
    Ok(lit.clamp(0.0, tau))
}

/// Gain, draw and net energy of one task.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyDelta {
    pub gain: f64,
    pub draw: f64,
    pub net: f64,
}

/// Energy delta of a task starting at `t` and lasting `tau`, with constant
/// `draw` (energy per sol) and solar `gain_amp` (energy per sol of daylight).
pub fn delta_e(t: f64, tau: f64, draw: f64, gain_amp: f64) -> Result<EnergyDelta, EnergyError> {
    if draw.is_nan() || draw < 0.0 {
        return Err(EnergyError::NegativeDraw(draw));
    }
    if gain_amp.is_nan() || gain_amp < 0.0 {
        return Err(EnergyError::NegativeGain(gain_amp));
    }
    let gain = gain_amp * daylight(t, tau)?;
    let draw = draw * tau;
    Ok(EnergyDelta { gain, draw, net: gain - draw })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Uniform composite midpoint rule over the square wave, written from
    /// `sin` rather than `floor` so it shares nothing with the closed form.
    fn midpoint_daylight(t: f64, tau: f64, step: f64) -> f64 {
        let n = libm::ceil(tau / step) as u64;
        if n == 0 {
            return 0.0;
        }
        let h = tau / n as f64;
        let lit = (0..n)
            .filter(|i| libm::sin(2.0 * core::f64::consts::PI * (t + (*i as f64 + 0.5) * h)) > 0.0)
            .count();
        lit as f64 * h
    }

    #[test]
    fn square_wave_samples() {
        assert_eq!(solar_power(0.25), 1.0);
        assert_eq!(solar_power(0.75), 0.0);
        assert_eq!(solar_power(1.25), 1.0);
        assert_eq!(solar_power(0.0), 1.0);
        assert_eq!(solar_power(0.5), 0.0);
        assert_eq!(solar_power(-0.25), 0.0);
    }

    #[test]
    fn daylight_examples() {
        assert_eq!(daylight(0.0, 1.0).unwrap(), 0.5);
        assert_eq!(daylight(0.5, 0.5).unwrap(), 0.0);
        assert_eq!(daylight(0.25, 0.5).unwrap(), 0.25);
        assert!(matches!(daylight(0.0, -1.0), Err(EnergyError::NegativeDuration(_))));
    }

    #[test]
    fn quadrature_oracle_agrees_on_examples() {
        // Frozen expectations above were produced by this oracle at step 1e-6.
        for (t, tau, expected) in [(0.0, 1.0, 0.5), (0.5, 0.5, 0.0), (0.25, 0.5, 0.25)] {
            let q = midpoint_daylight(t, tau, 1e-6);
            assert!((q - expected).abs() <= 1e-5, "({t}, {tau}) -> {q}");
        }
        let q = midpoint_daylight(0.0, 1.0, 1e-6);
        assert!((1.0 * q - 6.0 - (-5.5)).abs() <= 1e-5);
    }

    #[test]
    fn delta_examples() {
        let d = delta_e(0.0, 1.0, 6.0, 1.0).unwrap();
        assert_eq!(d.net, -5.5);
        assert_eq!((d.gain, d.draw), (0.5, 6.0));
        let d = delta_e(3.7, 0.0, 6.0, 1.0).unwrap();
        assert_eq!(d.net, 0.0);
        let d = delta_e(0.5, 0.5, 0.0, 1.0).unwrap();
        assert_eq!(d.net, 0.0);
        assert!(delta_e(0.0, 1.0, -1.0, 1.0).is_err());
        assert!(delta_e(0.0, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn closed_form_matches_uniform_midpoint_rule() {
        let mut seed = 0x9e37_79b9_7f4a_7c15_u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..40 {
            let t = next() * 20.0 - 5.0;
            let tau = next() * 2.0;
            let exact = daylight(t, tau).unwrap();
            let q = midpoint_daylight(t, tau, 1e-6);
            assert!((exact - q).abs() <= 1e-5, "t={t} tau={tau}: {exact} vs {q}");
        }
    }

    proptest! {
        #[test]
        fn additive(t in -50.0..50.0f64, a in 0.0..5.0f64, b in 0.0..5.0f64) {
            let whole = daylight(t, a + b).unwrap();
            let split = daylight(t, a).unwrap() + daylight(t + a, b).unwrap();
            prop_assert!((whole - split).abs() <= 1e-12);
        }

        #[test]
        fn periodic(t in -50.0..50.0f64, tau in 0.0..5.0f64) {
            let a = daylight(t + 1.0, tau).unwrap();
            let b = daylight(t, tau).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
        }

        #[test]
        fn full_periods(t in -50.0..50.0f64, n in 0u32..20) {
            let d = daylight(t, n as f64).unwrap();
            prop_assert!((d - n as f64 / 2.0).abs() <= 1e-12);
        }

        #[test]
        fn monotone_and_bounded(t in -50.0..50.0f64, tau in 0.0..5.0f64, extra in 0.0..2.0f64) {
            let d = daylight(t, tau).unwrap();
            prop_assert!(d >= 0.0 && d <= tau);
            prop_assert!(daylight(t, tau + extra).unwrap() >= d);
        }
    }
}
