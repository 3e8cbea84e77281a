//! Deterministic simulation and control library for pressure sewer systems.
//!
//! A pressure sewer consists of many independent household units, each with
//! a septic tank and a grinder pump feeding a shared pressurised network.
//! Plain on-off level control transmits every fluctuation of effluent
//! production straight into the network. This crate implements a layered
//! alternative that uses the tanks as buffers to level the load:
//!
//! * an always-on **on-off fail-safe** (two-sensor hysteresis),
//! * **time-slot control**: each unit pumps only in slots it owns, for a
//!   mass-balance-sized duration,
//! * a periodic shared **emergent slot** relieving tanks above a warning
//!   level,
//! * a **learning layer** adapting each unit's pump time to its actual
//!   production.
//!
//! [`engine::run_simulation`] executes a scenario over N units and a
//! multi-day horizon; [`metrics`] evaluates the leveling effect via moving
//! window sums and their standard deviation across the five standard module
//! combinations.
//!
//! All model code is generic over the scalar type (see [`scalar::Scalar`]);
//! the `*F64` aliases below are the concrete types the CLI uses. Runs are
//! bit-reproducible: every random draw is a pure function of the master
//! seed.

pub mod control;
pub mod engine;
pub mod error;
pub mod inflow;
pub mod learning;
pub mod metrics;
mod rng;
pub mod scalar;
pub mod schedule;
pub mod tank;

pub use control::{
    compose_decide, emergent_decide, mass_balance_pump_time, on_off_decide, slot_decide,
    BasePumpTime, CommandSource, ControlConfig, ModuleSet, PumpCommand, EXPERIMENT_SETS,
};
pub use engine::{
    run_simulation, DrawEvent, LearningSample, MassTotals, OverflowEvent, SimConfig, SimResult,
    World,
};
pub use error::{Error, Result};
pub use inflow::{InflowGenerator, InflowProfile, UnitScales};
pub use learning::LearningState;
pub use metrics::{
    block_sum, compare_experiments, moving_sum, summary_stats, ComparisonRow, ComparisonTable,
    MovingSeries, SummaryStats,
};
pub use scalar::Scalar;
pub use schedule::{
    build_schedule, schedule_with_owners, SlotInfo, SlotKind, SlotSchedule, SECONDS_PER_DAY,
};
pub use tank::{StepOutcome, TankParams, TankState, Zone};

/// Concrete `f64` aliases; the precision used by the command line tools.
pub type TankParamsF64 = TankParams<f64>;
pub type TankStateF64 = TankState<f64>;
pub type InflowProfileF64 = InflowProfile<f64>;
pub type ControlConfigF64 = ControlConfig<f64>;
pub type SimConfigF64 = SimConfig<f64>;
pub type SimResultF64 = SimResult<f64>;
pub type ComparisonTableF64 = ComparisonTable<f64>;

/// Single-precision aliases for memory-constrained embedding.
pub type TankParamsF32 = TankParams<f32>;
pub type SimConfigF32 = SimConfig<f32>;
pub type SimResultF32 = SimResult<f32>;
