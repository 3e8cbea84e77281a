//! Volume model of one household unit: septic tank plus grinder pump.
//!
//! The tank is a pure volume balance. Level sensors of a real installation
//! map to volume thresholds here, which keeps tank geometry out of the
//! model: every control decision is a comparison against a threshold.

use crate::error::{Error, Result};
use crate::scalar::{sc, Scalar};

/// Volume thresholds and pump characteristics of one unit.
///
/// All thresholds are volumes in m³, ordered
/// `0 <= dead_volume < learn_low < learn_high <= warn_level < high_start < capacity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TankParams<S> {
    /// Total storage before overflow (m³).
    pub capacity: S,
    /// Floor below which the pump cannot draw (m³).
    pub dead_volume: S,
    /// Lower adaptation threshold; dropping below it shortens the learned
    /// pump time (m³).
    pub learn_low: S,
    /// Upper adaptation threshold; rising above it lengthens the learned
    /// pump time (m³).
    pub learn_high: S,
    /// Eligibility level for the shared relief slot (m³).
    pub warn_level: S,
    /// Level at which the fail-safe starts pumping (m³).
    pub high_start: S,
    /// Level at which the fail-safe stops pumping (m³).
    pub low_stop: S,
    /// Constant pump draw rate (m³/s).
    pub pump_rate: S,
}

impl<S: Scalar> Default for TankParams<S> {
    /// Sized so one tank stores at least a day of mean production
    /// (see [`crate::inflow::InflowProfile::default`]).
    fn default() -> Self {
        TankParams {
            capacity: sc(1.0),
            dead_volume: sc(0.05),
            learn_low: sc(0.10),
            learn_high: sc(0.55),
            warn_level: sc(0.55),
            high_start: sc(0.85),
            low_stop: sc(0.10),
            pump_rate: sc(9.0e-4),
        }
    }
}

/// Volume band the current level falls into.
///
/// Classification is total and monotone in the volume: `Depleted` below
/// `learn_low`, `Critical` at or above `high_start`, `Warning` at or above
/// `warn_level`, `Normal` for everything in between.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Zone {
    /// Below `learn_low`; pumping down here signals an oversized budget.
    Depleted,
    /// Regular operating band.
    Normal,
    /// At or above `warn_level`; eligible for shared relief slots.
    Warning,
    /// At or above `high_start`; the fail-safe takes over.
    Critical,
}

impl<S: Scalar> TankParams<S> {
    pub fn validate(&self, field_prefix: &str) -> Result<()> {
        let f = |name: &str| format!("{field_prefix}.{name}");
        let finite = [
            ("capacity", self.capacity),
            ("dead_volume", self.dead_volume),
            ("learn_low", self.learn_low),
            ("learn_high", self.learn_high),
            ("warn_level", self.warn_level),
            ("high_start", self.high_start),
            ("low_stop", self.low_stop),
            ("pump_rate", self.pump_rate),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(f(name), "must be finite"));
            }
        }
        if self.dead_volume < S::zero() {
            return Err(Error::invalid(f("dead_volume"), "must be >= 0"));
        }
        if !(self.dead_volume < self.learn_low) {
            return Err(Error::invalid(f("learn_low"), "must exceed dead_volume"));
        }
        if !(self.learn_low < self.learn_high) {
            return Err(Error::invalid(f("learn_high"), "must exceed learn_low"));
        }
        if !(self.learn_high <= self.warn_level) {
            return Err(Error::invalid(f("warn_level"), "must be >= learn_high"));
        }
        if !(self.warn_level < self.high_start) {
            return Err(Error::invalid(f("high_start"), "must exceed warn_level"));
        }
        if !(self.high_start < self.capacity) {
            return Err(Error::invalid(f("capacity"), "must exceed high_start"));
        }
        if !(self.dead_volume <= self.low_stop && self.low_stop <= self.warn_level) {
            return Err(Error::invalid(
                f("low_stop"),
                "must lie between dead_volume and warn_level",
            ));
        }
        if !(self.pump_rate > S::zero()) {
            return Err(Error::invalid(f("pump_rate"), "must be > 0"));
        }
        Ok(())
    }

    /// Classifies a volume into its control zone.
    pub fn zone_of(&self, volume: S) -> Zone {
        if volume < self.learn_low {
            Zone::Depleted
        } else if volume >= self.high_start {
            Zone::Critical
        } else if volume >= self.warn_level {
            Zone::Warning
        } else {
            Zone::Normal
        }
    }
}

/// Instantaneous state of one tank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TankState<S> {
    /// Stored volume (m³), always within `[0, capacity]`.
    pub volume: S,
    /// Whether the pump ran during the last step.
    pub pump_on: bool,
    /// Cumulative volume lost over the rim (m³).
    pub overflow_total: S,
}

/// Outcome of one balance step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome<S> {
    pub state: TankState<S>,
    /// Volume drawn into the network this step (m³).
    pub pumped: S,
    /// Volume lost to overflow this step (m³).
    pub overflowed: S,
}

impl<S: Scalar> TankState<S> {
    pub fn new(volume: S) -> Self {
        TankState {
            volume,
            pump_on: false,
            overflow_total: S::zero(),
        }
    }

    /// Advances the tank by one step of `dt` seconds.
    ///
    /// The pump draws at `pump_rate` but never below `dead_volume`; whatever
    /// does not fit in the tank overflows and is accounted, never silently
    /// lost. The balance `volume' - volume = inflow - pumped - overflowed`
    /// holds to rounding.
    pub fn step(&self, params: &TankParams<S>, inflow: S, pump_on: bool, dt: u64) -> StepOutcome<S> {
        debug_assert!(dt > 0);
        debug_assert!(inflow >= S::zero());

        let pumped = if pump_on {
            let drawable = (self.volume - params.dead_volume).max(S::zero());
            (params.pump_rate * sc(dt as f64)).min(drawable)
        } else {
            S::zero()
        };
        let net = self.volume + inflow - pumped;
        let overflowed = (net - params.capacity).max(S::zero());
        let volume = net.min(params.capacity).max(S::zero());
        StepOutcome {
            state: TankState {
                volume,
                pump_on,
                overflow_total: self.overflow_total + overflowed,
            },
            pumped,
            overflowed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn params() -> TankParams<f64> {
        TankParams::default()
    }

    #[test]
    fn default_params_are_valid() {
        params().validate("tank").unwrap();
        TankParams::<f32>::default().validate("tank").unwrap();
    }

    #[test]
    fn idle_step_is_identity() {
        let s = TankState::new(0.10);
        let out = s.step(&params(), 0.0, false, 60);
        assert_eq!(out.state.volume, 0.10);
        assert_eq!(out.pumped, 0.0);
        assert_eq!(out.overflowed, 0.0);
    }

    #[test]
    fn pumping_step_draws_at_rate() {
        // 9e-4 m³/s for 60 s from 0.20 m³ leaves 0.146 m³.
        let mut p = params();
        p.dead_volume = 0.05;
        p.pump_rate = 9.0e-4;
        let out = TankState::new(0.20).step(&p, 0.0, true, 60);
        assert_relative_eq!(out.pumped, 0.054, max_relative = 1e-12);
        assert_relative_eq!(out.state.volume, 0.146, max_relative = 1e-12);
    }

    #[test]
    fn pumping_is_floor_limited() {
        // Only 0.01 m³ sits above the dead volume.
        let mut p = params();
        p.dead_volume = 0.05;
        p.pump_rate = 9.0e-4;
        let out = TankState::new(0.06).step(&p, 0.0, true, 60);
        assert_relative_eq!(out.pumped, 0.01, max_relative = 1e-12);
        assert_relative_eq!(out.state.volume, 0.05, max_relative = 1e-12);
    }

    #[test]
    fn overflow_is_tracked_not_lost() {
        let p = params();
        let out = TankState::new(0.95).step(&p, 0.10, false, 10);
        assert_relative_eq!(out.overflowed, 0.05, max_relative = 1e-12);
        assert_eq!(out.state.volume, p.capacity);
        assert_relative_eq!(out.state.overflow_total, 0.05, max_relative = 1e-12);
    }

    #[test]
    fn zone_classification() {
        let p = params();
        assert_eq!(p.zone_of(0.0), Zone::Depleted);
        assert_eq!(p.zone_of(p.learn_low), Zone::Normal);
        assert_eq!(p.zone_of(p.high_start), Zone::Critical);
        assert_eq!(p.zone_of(p.capacity), Zone::Critical);
        // Mid band between learn_high and warn_level is Normal when they differ.
        let mut q = p;
        q.learn_high = 0.40;
        q.warn_level = 0.60;
        assert_eq!(q.zone_of(0.50), Zone::Normal);
        assert_eq!(q.zone_of(0.60), Zone::Warning);
    }

    #[test]
    fn zone_is_monotone_in_volume() {
        let p = params();
        let rank = |z: Zone| match z {
            Zone::Depleted => 0,
            Zone::Normal => 1,
            Zone::Warning => 2,
            Zone::Critical => 3,
        };
        let mut last = 0;
        let mut v = 0.0;
        while v <= 1.0 {
            let r = rank(p.zone_of(v));
            assert!(r >= last);
            last = r;
            v += 0.005;
        }
    }

    #[test]
    fn rejects_bad_threshold_order() {
        let mut p = params();
        p.learn_low = 0.60;
        let err = p.validate("tank").unwrap_err().to_string();
        assert!(err.contains("learn_high"), "got: {err}");
    }

    proptest! {
        /// Mass is conserved over arbitrary step sequences.
        #[test]
        fn mass_conservation(
            v0 in 0.0f64..1.0,
            steps in proptest::collection::vec((0.0f64..0.01, any::<bool>()), 1..200),
        ) {
            let p = params();
            let mut state = TankState::new(v0.min(p.capacity));
            let mut inflow_sum = 0.0;
            let mut pumped_sum = 0.0;
            let mut overflow_sum = 0.0;
            let initial = state.volume;
            for (inflow, on) in steps {
                let out = state.step(&p, inflow, on, 10);
                inflow_sum += inflow;
                pumped_sum += out.pumped;
                overflow_sum += out.overflowed;
                state = out.state;
            }
            let balance = pumped_sum + overflow_sum + (state.volume - initial);
            let scale = inflow_sum.abs().max(1.0);
            prop_assert!((inflow_sum - balance).abs() <= 1e-9 * scale);
        }

        /// With the pump off, volume never decreases (until capacity clamps).
        #[test]
        fn volume_monotone_without_pumping(
            v0 in 0.0f64..1.0,
            inflows in proptest::collection::vec(0.0f64..0.01, 1..100),
        ) {
            let p = params();
            let mut state = TankState::new(v0);
            for inflow in inflows {
                let next = state.step(&p, inflow, false, 10).state;
                prop_assert!(next.volume >= state.volume || next.volume == p.capacity);
                state = next;
            }
        }

        /// A single step never pumps the tank below the dead volume.
        #[test]
        fn pump_respects_floor(v0 in 0.0f64..1.0, inflow in 0.0f64..0.01, dt in 1u64..3600) {
            let p = params();
            let out = TankState::new(v0).step(&p, inflow, true, dt);
            // Post-step volume may only be under the floor if it started there.
            prop_assert!(out.state.volume >= p.dead_volume.min(v0) - 1e-15);
            prop_assert!(out.pumped <= p.pump_rate * dt as f64 + 1e-15);
        }
    }
}
