//! Per-unit adaptation of the slot pump time.
//!
//! Each unit keeps one learned value: the offset added to the base pump
//! time of its regular slots. Crossing below `learn_low` shortens the
//! offset by one step, crossing above `learn_high` lengthens it by the
//! same amount. Triggers are edge-based with re-arming: after a fire the
//! corresponding trigger stays disarmed until the volume re-enters the
//! band `[learn_low, learn_high]`, so a level holding at a threshold fires
//! exactly once.

use crate::scalar::{sc, Scalar};
use crate::tank::TankParams;

#[derive(Debug, Clone, Copy, PartialEq)]
struct UnitLearning<S> {
    offset: S,
    armed_low: bool,
    armed_high: bool,
}

/// Learned pump-time offsets for every unit.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningState<S> {
    units: Vec<UnitLearning<S>>,
}

impl<S: Scalar> LearningState<S> {
    /// All offsets start at zero with both triggers armed.
    pub fn new(n_units: usize) -> Self {
        LearningState {
            units: vec![
                UnitLearning {
                    offset: S::zero(),
                    armed_low: true,
                    armed_high: true,
                };
                n_units
            ],
        }
    }

    pub fn n_units(&self) -> usize {
        self.units.len()
    }

    /// Current offset of `unit` in seconds; may be negative.
    pub fn offset(&self, unit: usize) -> S {
        self.units[unit].offset
    }

    #[cfg(test)]
    pub(crate) fn set_offset(&mut self, unit: usize, offset: S) {
        self.units[unit].offset = offset;
    }

    /// Feeds one level observation for `unit`. The simulation loop samples
    /// the level once per owned slot, at entry.
    ///
    /// The resulting offset is clamped so the effective slot budget
    /// `base_pump_time + offset` stays within `[0, slot_len]`. Returns
    /// whether the offset changed.
    pub fn update(
        &mut self,
        unit: usize,
        volume: S,
        params: &TankParams<S>,
        learn_step: S,
        slot_len: u64,
        base_pump_time: S,
    ) -> bool {
        let u = &mut self.units[unit];
        let mut changed = false;
        if u.armed_low && volume < params.learn_low {
            u.offset = u.offset - learn_step;
            u.armed_low = false;
            changed = true;
        }
        if u.armed_high && volume > params.learn_high {
            u.offset = u.offset + learn_step;
            u.armed_high = false;
            changed = true;
        }
        if volume >= params.learn_low && volume <= params.learn_high {
            u.armed_low = true;
            u.armed_high = true;
        }
        if changed {
            let lo = -base_pump_time;
            let hi = sc::<S>(slot_len as f64) - base_pump_time;
            u.offset = u.offset.max(lo).min(hi);
        }
        changed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> TankParams<f64> {
        TankParams::default()
    }

    fn update(learn: &mut LearningState<f64>, volume: f64) -> bool {
        learn.update(0, volume, &params(), 10.0, 600, 150.0)
    }

    #[test]
    fn downward_crossing_shortens() {
        let mut learn = LearningState::new(1);
        assert!(update(&mut learn, params().learn_low - 0.001));
        assert_relative_eq!(learn.offset(0), -10.0);
    }

    #[test]
    fn upward_crossing_lengthens() {
        let mut learn = LearningState::new(1);
        assert!(update(&mut learn, params().learn_high + 0.001));
        assert_relative_eq!(learn.offset(0), 10.0);
    }

    #[test]
    fn in_band_volume_changes_nothing() {
        let mut learn = LearningState::new(1);
        for v in [0.10, 0.20, 0.35, 0.55] {
            assert!(!update(&mut learn, v));
        }
        assert_eq!(learn.offset(0), 0.0);
    }

    #[test]
    fn held_threshold_fires_once() {
        let mut learn = LearningState::new(1);
        let low = params().learn_low - 0.001;
        assert!(update(&mut learn, low));
        // Holding below the threshold must not fire again.
        for _ in 0..100 {
            assert!(!update(&mut learn, low));
        }
        assert_relative_eq!(learn.offset(0), -10.0);
        // Re-entering the band re-arms, and the next crossing fires.
        assert!(!update(&mut learn, 0.2));
        assert!(update(&mut learn, low));
        assert_relative_eq!(learn.offset(0), -20.0);
    }

    #[test]
    fn sitting_exactly_on_a_threshold_never_fires() {
        let mut learn = LearningState::new(1);
        let p = params();
        for _ in 0..10 {
            assert!(!update(&mut learn, p.learn_low));
            assert!(!update(&mut learn, p.learn_high));
        }
        assert_eq!(learn.offset(0), 0.0);
    }

    #[test]
    fn offset_is_clamped_to_the_slot() {
        let mut learn = LearningState::new(1);
        // Drive the offset down: effective budget never drops below zero.
        for _ in 0..100 {
            update(&mut learn, 0.2); // re-arm
            update(&mut learn, 0.05); // fire low
        }
        assert_relative_eq!(learn.offset(0), -150.0);
        // And up: base + offset never exceeds the slot length.
        let mut learn = LearningState::new(1);
        for _ in 0..100 {
            update(&mut learn, 0.2);
            update(&mut learn, 0.60);
        }
        assert_relative_eq!(learn.offset(0), 600.0 - 150.0);
    }

    #[test]
    fn units_learn_independently() {
        let mut learn = LearningState::new(3);
        learn.update(1, 0.05, &params(), 10.0, 600, 150.0);
        assert_eq!(learn.offset(0), 0.0);
        assert_relative_eq!(learn.offset(1), -10.0);
        assert_eq!(learn.offset(2), 0.0);
    }
}
