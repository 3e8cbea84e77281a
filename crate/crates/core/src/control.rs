//! The composable control layers and their priority composition.
//!
//! Four layers cooperate, from highest to lowest priority:
//!
//! 1. **Fail-safe on-off (A)** — classic two-sensor hysteresis. Starts at
//!    `high_start`, stops at `low_stop`, runs independently of everything
//!    else and overrides it.
//! 2. **Emergent slot (C)** — in the shared relief slot, any unit at or
//!    above `warn_level` pumps for at most the slot length, draining only
//!    the excess above the warning level.
//! 3. **Regular slot (B)** — a unit may start pumping only at the entry of
//!    a slot it owns, for the base pump time plus its learned offset.
//! 4. **Learning (D)** — never issues commands; it adapts the per-unit
//!    pump-time offset on threshold crossings.
//!
//! Budgets never survive a slot boundary, and a fail-safe run cancels any
//! slot budget in flight.

use crate::error::{Error, Result};
use crate::learning::LearningState;
use crate::scalar::{sc, Scalar};
use crate::schedule::{SlotInfo, SlotKind, SlotSchedule};
use crate::tank::TankParams;

/// Which optional modules run on top of the always-on fail-safe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModuleSet {
    /// Regular time-slot control (B).
    pub time_slot: bool,
    /// Shared relief slot (C); requires `time_slot`.
    pub emergent: bool,
    /// Pump-time adaptation (D); requires `time_slot`.
    pub learning: bool,
}

impl ModuleSet {
    /// Fail-safe only.
    pub const ON_OFF: ModuleSet = ModuleSet {
        time_slot: false,
        emergent: false,
        learning: false,
    };

    pub const ALL: ModuleSet = ModuleSet {
        time_slot: true,
        emergent: true,
        learning: true,
    };

    /// Parses labels like `"A"`, `"AB"`, `"ABD"`, `"ABC"`, `"ABCD"`.
    pub fn parse(label: &str) -> Result<ModuleSet> {
        let mut set = ModuleSet::ON_OFF;
        let mut has_a = false;
        for ch in label.chars() {
            match ch.to_ascii_uppercase() {
                'A' => has_a = true,
                'B' => set.time_slot = true,
                'C' => set.emergent = true,
                'D' => set.learning = true,
                other => {
                    return Err(Error::invalid(
                        "control.enabled",
                        format!("unknown module '{other}'; expected letters from ABCD"),
                    ))
                }
            }
        }
        if !has_a {
            return Err(Error::invalid(
                "control.enabled",
                "the fail-safe module A must be enabled",
            ));
        }
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        if self.learning && !self.time_slot {
            return Err(Error::invalid(
                "control.enabled",
                "learning (D) requires time-slot control (B)",
            ));
        }
        if self.emergent && !self.time_slot {
            return Err(Error::invalid(
                "control.enabled",
                "the emergent slot (C) requires time-slot control (B)",
            ));
        }
        Ok(())
    }

    /// Canonical label, e.g. `"ABD"`.
    pub fn label(&self) -> String {
        let mut s = String::from("A");
        if self.time_slot {
            s.push('B');
        }
        if self.emergent {
            s.push('C');
        }
        if self.learning {
            s.push('D');
        }
        s
    }
}

impl std::fmt::Display for ModuleSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

impl std::str::FromStr for ModuleSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModuleSet::parse(s)
    }
}

/// The five configurations of the standard comparison, in canonical order.
pub const EXPERIMENT_SETS: [ModuleSet; 5] = [
    ModuleSet {
        time_slot: false,
        emergent: false,
        learning: false,
    },
    ModuleSet {
        time_slot: true,
        emergent: false,
        learning: false,
    },
    ModuleSet {
        time_slot: true,
        emergent: false,
        learning: true,
    },
    ModuleSet {
        time_slot: true,
        emergent: true,
        learning: false,
    },
    ModuleSet {
        time_slot: true,
        emergent: true,
        learning: true,
    },
];

/// Full controller parameterization of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlConfig<S> {
    pub modules: ModuleSet,
    /// Seconds of pumping per owned slot before adaptation.
    pub base_pump_time: S,
    /// Seconds added or removed per adaptation event.
    pub learn_step: S,
    pub schedule: SlotSchedule,
}

impl<S: Scalar> ControlConfig<S> {
    pub fn validate(&self) -> Result<()> {
        self.modules.validate()?;
        let slot_len = sc::<S>(self.schedule.slot_len() as f64);
        if !(self.base_pump_time > S::zero() && self.base_pump_time <= slot_len) {
            return Err(Error::invalid(
                "control.base_pump_time",
                format!(
                    "must be in (0, slot_len = {} s], got {}",
                    self.schedule.slot_len(),
                    self.base_pump_time
                ),
            ));
        }
        if !(self.learn_step >= S::zero() && self.learn_step.is_finite()) {
            return Err(Error::invalid("control.learn_step", "must be >= 0 and finite"));
        }
        Ok(())
    }
}

/// Who asked for the pump to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CommandSource {
    FailSafe,
    RegularSlot,
    EmergentSlot,
    Idle,
}

impl CommandSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            CommandSource::FailSafe => "FailSafe",
            CommandSource::RegularSlot => "RegularSlot",
            CommandSource::EmergentSlot => "EmergentSlot",
            CommandSource::Idle => "Idle",
        }
    }
}

/// One actuation decision for one unit and one step.
///
/// `budget` is the commanded pump time remaining within the current slot;
/// it is positive exactly when a slot-driven command is running. Fail-safe
/// runs carry no budget: they stop on the level, not on a timer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpCommand<S> {
    pub run: bool,
    pub budget: S,
    pub source: CommandSource,
}

impl<S: Scalar> PumpCommand<S> {
    pub fn idle() -> Self {
        PumpCommand {
            run: false,
            budget: S::zero(),
            source: CommandSource::Idle,
        }
    }

    pub fn failsafe() -> Self {
        PumpCommand {
            run: true,
            budget: S::zero(),
            source: CommandSource::FailSafe,
        }
    }
}

/// Two-sensor hysteresis: on at `high_start`, off at `low_stop`, held
/// in between.
pub fn on_off_decide<S: Scalar>(volume: S, params: &TankParams<S>, was_on: bool) -> bool {
    if volume >= params.high_start {
        true
    } else if volume <= params.low_stop {
        false
    } else {
        was_on
    }
}

/// Base pump time derived from the mass balance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasePumpTime<S> {
    pub seconds: S,
    /// True when the balance requires more than a whole slot; the schedule
    /// is undersized and the value was capped.
    pub capped: bool,
}

/// Pump seconds per slot that balance the expected daily production:
/// `daily_mean / (pump_rate * slots_per_unit_per_day)`, capped at the slot
/// length.
pub fn mass_balance_pump_time<S: Scalar>(
    daily_mean: S,
    pump_rate: S,
    slots_per_unit_per_day: S,
    slot_len: u64,
) -> Result<BasePumpTime<S>> {
    if !(daily_mean > S::zero()) {
        return Err(Error::invalid("profile.daily_mean", "must be > 0 to size the pump time"));
    }
    if !(pump_rate > S::zero()) {
        return Err(Error::invalid("tank.pump_rate", "must be > 0"));
    }
    if !(slots_per_unit_per_day > S::zero()) {
        return Err(Error::invalid("control.slots_per_unit", "must be > 0"));
    }
    let raw = daily_mean / (pump_rate * slots_per_unit_per_day);
    let cap = sc::<S>(slot_len as f64);
    if raw > cap {
        Ok(BasePumpTime {
            seconds: cap,
            capped: true,
        })
    } else {
        Ok(BasePumpTime {
            seconds: raw,
            capped: false,
        })
    }
}

/// Entry decision of a regular slot owned by `unit`.
///
/// The start test happens only at slot entry: a unit that declines (empty
/// tank) or stops (budget spent, floor reached) does not restart within the
/// same slot. `elapsed_pumping` is the seconds already pumped in this slot.
pub fn slot_decide<S: Scalar>(
    unit: usize,
    volume: S,
    params: &TankParams<S>,
    cfg: &ControlConfig<S>,
    learn: &LearningState<S>,
    slot: &SlotInfo,
    elapsed_pumping: S,
) -> PumpCommand<S> {
    debug_assert!(cfg.modules.time_slot);
    debug_assert_eq!(slot.kind, SlotKind::Regular(unit));

    let offset = if cfg.modules.learning {
        learn.offset(unit)
    } else {
        S::zero()
    };
    let slot_len = sc::<S>(cfg.schedule.slot_len() as f64);
    let total = (cfg.base_pump_time + offset).max(S::zero()).min(slot_len);
    let remaining = total - elapsed_pumping;
    if remaining > S::zero() && volume > params.dead_volume {
        PumpCommand {
            run: true,
            budget: remaining,
            source: CommandSource::RegularSlot,
        }
    } else {
        PumpCommand::idle()
    }
}

/// Entry decision of the shared relief slot.
///
/// Every unit at or above `warn_level` joins and pumps for at most the slot
/// length, draining only down to the warning level — in contrast to the
/// fail-safe, which empties the tank to `low_stop`.
pub fn emergent_decide<S: Scalar>(
    _unit: usize,
    volume: S,
    params: &TankParams<S>,
    cfg: &ControlConfig<S>,
    slot: &SlotInfo,
) -> PumpCommand<S> {
    debug_assert!(cfg.modules.emergent);
    debug_assert_eq!(slot.kind, SlotKind::Emergent);

    if volume >= params.warn_level {
        PumpCommand {
            run: true,
            budget: sc(cfg.schedule.slot_len() as f64),
            source: CommandSource::EmergentSlot,
        }
    } else {
        PumpCommand::idle()
    }
}

/// Priority composition producing the one command for this unit and step.
///
/// `prior` is the previous step's command with its remaining budget; the
/// caller decrements the budget after every running step. `was_failsafe_on`
/// is the hysteresis latch of the fail-safe.
pub fn compose_decide<S: Scalar>(
    unit: usize,
    volume: S,
    params: &TankParams<S>,
    cfg: &ControlConfig<S>,
    learn: &LearningState<S>,
    slot: &SlotInfo,
    prior: &PumpCommand<S>,
    was_failsafe_on: bool,
) -> PumpCommand<S> {
    if on_off_decide(volume, params, was_failsafe_on) {
        // Overrides everything and cancels any slot budget in flight.
        return PumpCommand::failsafe();
    }
    let at_entry = slot.t_into_slot == 0;
    match slot.kind {
        SlotKind::Emergent if cfg.modules.emergent => {
            if at_entry {
                emergent_decide(unit, volume, params, cfg, slot)
            } else if prior.run
                && prior.source == CommandSource::EmergentSlot
                && prior.budget > S::zero()
                && volume > params.warn_level
            {
                PumpCommand {
                    run: true,
                    budget: prior.budget,
                    source: CommandSource::EmergentSlot,
                }
            } else {
                PumpCommand::idle()
            }
        }
        SlotKind::Regular(owner) if cfg.modules.time_slot && owner == unit => {
            if at_entry {
                slot_decide(unit, volume, params, cfg, learn, slot, S::zero())
            } else if prior.run
                && prior.source == CommandSource::RegularSlot
                && prior.budget > S::zero()
                && volume > params.dead_volume
            {
                PumpCommand {
                    run: true,
                    budget: prior.budget,
                    source: CommandSource::RegularSlot,
                }
            } else {
                PumpCommand::idle()
            }
        }
        _ => PumpCommand::idle(),
    }
}
