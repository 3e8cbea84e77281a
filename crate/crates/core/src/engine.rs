//! Deterministic fixed-step simulation over N independent units.
//!
//! The loop advances every unit by `dt` each step: draw inflow, compose the
//! pump decision, apply the tank balance, feed the learning module. Units
//! interact only through the aggregate outflow sum, so the result is
//! independent of evaluation order and fully reproducible from the
//! configuration alone.

use crate::control::{
    compose_decide, mass_balance_pump_time, CommandSource, ControlConfig, ModuleSet, PumpCommand,
};
use crate::error::{Error, Result};
use crate::inflow::{InflowGenerator, InflowProfile};
use crate::learning::LearningState;
use crate::scalar::{sc, Accumulator, Scalar};
use crate::schedule::{build_schedule, SECONDS_PER_DAY};
use crate::tank::{TankParams, TankState};

/// Complete description of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<S> {
    pub n_units: usize,
    /// Simulated horizon in whole days, at least 1.
    pub horizon_days: u32,
    /// Step length in seconds; must divide the slot length.
    pub dt: u64,
    /// Master seed; every random quantity of the run derives from it.
    pub seed: u64,
    /// Tank parameters shared by all units.
    pub tank: TankParams<S>,
    /// Per-unit parameter overrides as `(unit, params)` pairs.
    pub tank_overrides: Vec<(usize, TankParams<S>)>,
    /// Start volume of every tank; defaults to the middle of the learning
    /// band when absent.
    pub init_volume: Option<S>,
    pub profile: InflowProfile<S>,
    pub control: ControlConfig<S>,
    /// Explicit per-unit noise streams; testing hook, normally derived from
    /// the master seed.
    pub unit_stream_seeds: Option<Vec<u64>>,
}

impl<S: Scalar> SimConfig<S> {
    /// Reference setup: default tank and profile, 600 s slots with every
    /// tenth shared, all modules enabled, base pump time from the mass
    /// balance.
    pub fn defaults(n_units: usize, horizon_days: u32, seed: u64) -> Result<SimConfig<S>> {
        let schedule = build_schedule(n_units, 600, 10, seed)?;
        let tank = TankParams::default();
        let profile = InflowProfile::default();
        let base = mass_balance_pump_time(
            profile.daily_mean,
            tank.pump_rate,
            sc(schedule.mean_slots_per_unit()),
            schedule.slot_len(),
        )?;
        Ok(SimConfig {
            n_units,
            horizon_days,
            dt: 10,
            seed,
            tank,
            tank_overrides: Vec::new(),
            init_volume: None,
            profile,
            control: ControlConfig {
                modules: ModuleSet::ALL,
                base_pump_time: base.seconds,
                learn_step: sc(10.0),
                schedule,
            },
            unit_stream_seeds: None,
        })
    }

    pub fn with_modules(mut self, modules: ModuleSet) -> Self {
        self.control.modules = modules;
        self
    }

    pub fn total_steps(&self) -> u64 {
        self.horizon_days as u64 * SECONDS_PER_DAY / self.dt
    }

    /// Effective tank parameters of `unit`.
    pub fn tank_of(&self, unit: usize) -> &TankParams<S> {
        self.tank_overrides
            .iter()
            .rev()
            .find(|(u, _)| *u == unit)
            .map(|(_, p)| p)
            .unwrap_or(&self.tank)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_units == 0 {
            return Err(Error::invalid("n_units", "must be >= 1"));
        }
        if self.horizon_days == 0 {
            return Err(Error::invalid("horizon", "must be at least 1 day"));
        }
        let slot_len = self.control.schedule.slot_len();
        if self.dt == 0 || self.dt > slot_len || slot_len % self.dt != 0 {
            return Err(Error::invalid(
                "dt",
                format!("must be positive and divide slot_len = {slot_len} s, got {} s", self.dt),
            ));
        }
        if self.control.schedule.n_units() != self.n_units {
            return Err(Error::invalid(
                "control.schedule",
                format!(
                    "built for {} units but the run has {}",
                    self.control.schedule.n_units(),
                    self.n_units
                ),
            ));
        }
        self.tank.validate("tank")?;
        for (i, (unit, params)) in self.tank_overrides.iter().enumerate() {
            if *unit >= self.n_units {
                return Err(Error::invalid(
                    format!("tank_overrides[{i}]"),
                    format!("unit {unit} out of range for {} units", self.n_units),
                ));
            }
            params.validate(&format!("tank_overrides[{i}]"))?;
        }
        self.profile.validate(self.n_units)?;
        self.control.validate()?;
        if let Some(v) = self.init_volume {
            for unit in 0..self.n_units {
                let cap = self.tank_of(unit).capacity;
                if !(v >= S::zero() && v <= cap) {
                    return Err(Error::invalid(
                        "init_volume",
                        format!("must lie in [0, capacity = {cap}]"),
                    ));
                }
            }
        }
        if let Some(seeds) = &self.unit_stream_seeds {
            if seeds.len() != self.n_units {
                return Err(Error::invalid(
                    "unit_stream_seeds",
                    format!("expected {} entries, got {}", self.n_units, seeds.len()),
                ));
            }
        }
        Ok(())
    }

    /// True when both configs describe the identical scenario, ignoring
    /// which modules are enabled. Comparisons across configurations are
    /// only meaningful under this condition.
    pub fn scenario_matches(&self, other: &SimConfig<S>) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        a.control.modules = ModuleSet::ON_OFF;
        b.control.modules = ModuleSet::ON_OFF;
        a == b
    }
}

/// One continuous drawing of one unit into the network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrawEvent<S> {
    pub unit: usize,
    pub t_start: u64,
    pub t_end: u64,
    /// Volume transferred (m³); at most `pump_rate * (t_end - t_start)`.
    pub volume: S,
    pub source: CommandSource,
}

/// One contiguous overflow episode. Should stay absent in any healthy
/// configuration; tracked as a failure signal, never silently dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverflowEvent<S> {
    pub unit: usize,
    pub t_start: u64,
    pub t_end: u64,
    pub volume: S,
}

/// One recorded change of a learned pump-time offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningSample<S> {
    pub t: u64,
    pub unit: usize,
    /// Offset in force from `t` onward (s).
    pub offset: S,
}

/// Mass bookkeeping of a whole run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassTotals<S> {
    pub inflow: S,
    pub pumped: S,
    pub overflow: S,
    /// Final minus initial storage, summed over units.
    pub storage_delta: S,
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult<S> {
    pub config: SimConfig<S>,
    /// All drawings, sorted by start time then unit.
    pub events: Vec<DrawEvent<S>>,
    /// Total pumped volume per step (m³/step).
    pub aggregate_outflow: Vec<S>,
    /// Changes of the learned offsets; one baseline sample per unit at t=0
    /// when learning is enabled, then one sample per change.
    pub learning_trace: Vec<LearningSample<S>>,
    pub overflow_events: Vec<OverflowEvent<S>>,
    pub final_states: Vec<TankState<S>>,
    pub totals: MassTotals<S>,
}

impl<S: Scalar> SimResult<S> {
    pub fn scenario_matches(&self, other: &SimResult<S>) -> bool {
        self.config.scenario_matches(&other.config)
    }

    pub fn events_of(&self, unit: usize) -> impl Iterator<Item = &DrawEvent<S>> {
        self.events.iter().filter(move |e| e.unit == unit)
    }

    /// Relative mass-balance defect of the whole run.
    pub fn mass_balance_error(&self) -> S {
        let t = &self.totals;
        let defect = t.inflow - (t.pumped + t.overflow + t.storage_delta);
        let scale = t
            .inflow
            .abs()
            .max(t.pumped.abs())
            .max(t.storage_delta.abs())
            .max(sc(1e-12));
        defect.abs() / scale
    }

    /// Learned offset of `unit` in force at time `t`.
    pub fn offset_at(&self, unit: usize, t: u64) -> S {
        self.learning_trace
            .iter()
            .filter(|s| s.unit == unit && s.t <= t)
            .last()
            .map(|s| s.offset)
            .unwrap_or(S::zero())
    }
}

#[derive(Debug, Clone, Copy)]
struct PendingEvent<S> {
    t_start: u64,
    t_end: u64,
    volume: S,
    source: CommandSource,
}

/// Mutable state of a run in progress.
///
/// [`run_simulation`] drives this to completion; tests can also step it
/// manually.
#[derive(Debug)]
pub struct World<S> {
    cfg: SimConfig<S>,
    generator: InflowGenerator,
    unit_params: Vec<TankParams<S>>,
    states: Vec<TankState<S>>,
    initial_volumes: Vec<S>,
    learn: LearningState<S>,
    prior: Vec<PumpCommand<S>>,
    was_failsafe: Vec<bool>,
    open_events: Vec<Option<PendingEvent<S>>>,
    open_overflows: Vec<Option<PendingEvent<S>>>,
    t_step: u64,
    events: Vec<DrawEvent<S>>,
    overflow_events: Vec<OverflowEvent<S>>,
    learning_trace: Vec<LearningSample<S>>,
    aggregate_outflow: Vec<S>,
    inflow_total: Accumulator<S>,
    pumped_total: Accumulator<S>,
    overflow_total: Accumulator<S>,
}

impl<S: Scalar> World<S> {
    pub fn new(cfg: SimConfig<S>) -> Result<World<S>> {
        cfg.validate()?;
        let n = cfg.n_units;
        let generator = match &cfg.unit_stream_seeds {
            Some(streams) => InflowGenerator::with_streams(cfg.seed, cfg.dt, streams.clone()),
            None => InflowGenerator::new(cfg.seed, cfg.dt),
        };
        let unit_params: Vec<TankParams<S>> = (0..n).map(|u| *cfg.tank_of(u)).collect();
        let states: Vec<TankState<S>> = (0..n)
            .map(|u| {
                let p = &unit_params[u];
                let v0 = cfg
                    .init_volume
                    .unwrap_or_else(|| (p.learn_low + p.learn_high) / sc(2.0));
                TankState::new(v0)
            })
            .collect();
        let initial_volumes = states.iter().map(|s| s.volume).collect();
        let mut learning_trace = Vec::new();
        if cfg.control.modules.learning {
            for unit in 0..n {
                learning_trace.push(LearningSample {
                    t: 0,
                    unit,
                    offset: S::zero(),
                });
            }
        }
        let steps = cfg.total_steps() as usize;
        Ok(World {
            generator,
            unit_params,
            states,
            initial_volumes,
            learn: LearningState::new(n),
            prior: vec![PumpCommand::idle(); n],
            was_failsafe: vec![false; n],
            open_events: vec![None; n],
            open_overflows: vec![None; n],
            t_step: 0,
            events: Vec::new(),
            overflow_events: Vec::new(),
            learning_trace,
            aggregate_outflow: Vec::with_capacity(steps),
            inflow_total: Accumulator::new(),
            pumped_total: Accumulator::new(),
            overflow_total: Accumulator::new(),
            cfg,
        })
    }

    pub fn time(&self) -> u64 {
        self.t_step * self.cfg.dt
    }

    pub fn states(&self) -> &[TankState<S>] {
        &self.states
    }

    pub fn learning(&self) -> &LearningState<S> {
        &self.learn
    }

    /// Advances every unit by one step of `dt`.
    pub fn step(&mut self) {
        let dt = self.cfg.dt;
        let t = self.t_step * dt;
        let ctl = &self.cfg.control;
        let slot = ctl.schedule.slot_at(t);
        let mut aggregate = S::zero();

        for unit in 0..self.cfg.n_units {
            let params = &self.unit_params[unit];
            let inflow = self.generator.inflow_at(&self.cfg.profile, unit, t);

            // The learning module samples the level once per owned slot, at
            // entry, right before the budget decision uses the offset.
            // Evaluating it against the continuous level instead would see
            // the pump's own drain-refill sawtooth and re-fire on every
            // cycle spent near a threshold.
            if ctl.modules.learning
                && slot.t_into_slot == 0
                && slot.kind == crate::schedule::SlotKind::Regular(unit)
            {
                let changed = self.learn.update(
                    unit,
                    self.states[unit].volume,
                    params,
                    ctl.learn_step,
                    ctl.schedule.slot_len(),
                    ctl.base_pump_time,
                );
                if changed {
                    self.learning_trace.push(LearningSample {
                        t,
                        unit,
                        offset: self.learn.offset(unit),
                    });
                }
            }

            let cmd = compose_decide(
                unit,
                self.states[unit].volume,
                params,
                ctl,
                &self.learn,
                &slot,
                &self.prior[unit],
                self.was_failsafe[unit],
            );
            let out = self.states[unit].step(params, inflow, cmd.run, dt);

            // Event bookkeeping: contiguous pumped steps of one source form
            // one drawing.
            if cmd.run && out.pumped > S::zero() {
                match &mut self.open_events[unit] {
                    Some(ev) if ev.source == cmd.source => {
                        ev.t_end = t + dt;
                        ev.volume = ev.volume + out.pumped;
                    }
                    open => {
                        if let Some(done) = open.take() {
                            self.events.push(DrawEvent {
                                unit,
                                t_start: done.t_start,
                                t_end: done.t_end,
                                volume: done.volume,
                                source: done.source,
                            });
                        }
                        *open = Some(PendingEvent {
                            t_start: t,
                            t_end: t + dt,
                            volume: out.pumped,
                            source: cmd.source,
                        });
                    }
                }
            } else if let Some(done) = self.open_events[unit].take() {
                self.events.push(DrawEvent {
                    unit,
                    t_start: done.t_start,
                    t_end: done.t_end,
                    volume: done.volume,
                    source: done.source,
                });
            }

            if out.overflowed > S::zero() {
                match &mut self.open_overflows[unit] {
                    Some(ov) => {
                        ov.t_end = t + dt;
                        ov.volume = ov.volume + out.overflowed;
                    }
                    open => {
                        *open = Some(PendingEvent {
                            t_start: t,
                            t_end: t + dt,
                            volume: out.overflowed,
                            source: CommandSource::Idle,
                        });
                    }
                }
            } else if let Some(done) = self.open_overflows[unit].take() {
                self.overflow_events.push(OverflowEvent {
                    unit,
                    t_start: done.t_start,
                    t_end: done.t_end,
                    volume: done.volume,
                });
            }

            self.inflow_total.add(inflow);
            self.pumped_total.add(out.pumped);
            self.overflow_total.add(out.overflowed);
            aggregate += out.pumped;

            // Slot budgets tick down only while running; the fail-safe
            // carries none.
            let mut next = cmd;
            if cmd.run
                && matches!(
                    cmd.source,
                    CommandSource::RegularSlot | CommandSource::EmergentSlot
                )
            {
                next.budget = cmd.budget - sc(dt as f64);
            }
            self.prior[unit] = next;
            self.was_failsafe[unit] = cmd.run && cmd.source == CommandSource::FailSafe;
            self.states[unit] = out.state;
        }

        self.aggregate_outflow.push(aggregate);
        self.t_step += 1;
    }

    /// Closes open episodes and assembles the result.
    pub fn finish(mut self) -> SimResult<S> {
        for unit in 0..self.cfg.n_units {
            if let Some(done) = self.open_events[unit].take() {
                self.events.push(DrawEvent {
                    unit,
                    t_start: done.t_start,
                    t_end: done.t_end,
                    volume: done.volume,
                    source: done.source,
                });
            }
            if let Some(done) = self.open_overflows[unit].take() {
                self.overflow_events.push(OverflowEvent {
                    unit,
                    t_start: done.t_start,
                    t_end: done.t_end,
                    volume: done.volume,
                });
            }
        }
        self.events.sort_by_key(|e| (e.t_start, e.unit));
        self.overflow_events.sort_by_key(|e| (e.t_start, e.unit));

        let storage_delta = crate::scalar::neumaier_sum(
            self.states
                .iter()
                .zip(&self.initial_volumes)
                .map(|(s, &v0)| s.volume - v0),
        );
        SimResult {
            totals: MassTotals {
                inflow: self.inflow_total.total(),
                pumped: self.pumped_total.total(),
                overflow: self.overflow_total.total(),
                storage_delta,
            },
            config: self.cfg,
            events: self.events,
            aggregate_outflow: self.aggregate_outflow,
            learning_trace: self.learning_trace,
            overflow_events: self.overflow_events,
            final_states: self.states,
        }
    }
}

/// Runs a configuration to completion.
///
/// Fully deterministic: equal configurations produce equal results, field
/// for field.
pub fn run_simulation<S: Scalar>(cfg: SimConfig<S>) -> Result<SimResult<S>> {
    let steps = cfg.total_steps();
    let mut world = World::new(cfg)?;
    for _ in 0..steps {
        world.step();
    }
    Ok(world.finish())
}
