//! Stochastic effluent production with a daily profile.
//!
//! Production is modelled as a piecewise-constant hourly intensity times
//! multiplicative log-normal noise with mean one. Every draw is a pure
//! function of `(seed, unit, step time)`, so the full inflow series of a
//! unit can be recomputed independently of simulation order.

use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::{sc, Scalar};
use crate::schedule::SECONDS_PER_DAY;

pub const HOURS_PER_DAY: usize = 24;

/// Per-unit production scale factors.
#[derive(Debug, Clone, PartialEq)]
pub enum UnitScales<S> {
    /// Drawn once per unit from a seeded uniform in `[min, max)`.
    Uniform { min: S, max: S },
    /// One explicit factor per unit.
    Explicit(Vec<S>),
}

/// Shape of the effluent production of one unit.
#[derive(Debug, Clone, PartialEq)]
pub struct InflowProfile<S> {
    /// Mean production of a scale-1.0 unit (m³/day).
    pub daily_mean: S,
    /// Relative intensity per hour of day; non-negative, summing to 24.
    pub hourly_weights: [S; HOURS_PER_DAY],
    /// Coefficient of variation of the multiplicative noise; 0 disables it.
    pub noise_cv: S,
    /// Spread of production across units.
    pub unit_scales: UnitScales<S>,
}

/// Default weights: low overnight, a morning peak and a higher evening
/// peak. They sum to exactly 24.
const DEFAULT_WEIGHTS: [f64; HOURS_PER_DAY] = [
    0.3, 0.3, 0.3, 0.3, 0.3, 0.3, // 00-05
    0.9, 1.6, 1.7, 1.2, // 06-09
    0.9, 0.9, 1.0, 1.0, // 10-13
    0.8, 0.8, 0.8, // 14-16
    1.4, 1.9, 2.1, 2.0, 1.6, // 17-21
    1.0, 0.6, // 22-23
];

impl<S: Scalar> Default for InflowProfile<S> {
    fn default() -> Self {
        InflowProfile {
            daily_mean: sc(0.54),
            hourly_weights: DEFAULT_WEIGHTS.map(sc),
            noise_cv: sc(0.3),
            unit_scales: UnitScales::Uniform {
                min: sc(0.5),
                max: sc(1.5),
            },
        }
    }
}

impl<S: Scalar> InflowProfile<S> {
    /// Constant, noise-free production: flat weights and unit scale 1.
    pub fn constant(daily_mean: S) -> Self {
        InflowProfile {
            daily_mean,
            hourly_weights: [S::one(); HOURS_PER_DAY],
            noise_cv: S::zero(),
            unit_scales: UnitScales::Uniform {
                min: S::one(),
                max: S::one(),
            },
        }
    }

    pub fn validate(&self, n_units: usize) -> Result<()> {
        if !(self.daily_mean >= S::zero() && self.daily_mean.is_finite()) {
            return Err(Error::invalid("profile.daily_mean", "must be >= 0 and finite"));
        }
        if !(self.noise_cv >= S::zero() && self.noise_cv.is_finite()) {
            return Err(Error::invalid("profile.noise_cv", "must be >= 0 and finite"));
        }
        let mut sum = S::zero();
        for (h, &w) in self.hourly_weights.iter().enumerate() {
            if !(w >= S::zero() && w.is_finite()) {
                return Err(Error::invalid(
                    format!("profile.hourly_weights[{h}]"),
                    "must be >= 0 and finite",
                ));
            }
            sum += w;
        }
        if (sum - sc(HOURS_PER_DAY as f64)).abs() > sc(1e-9) {
            return Err(Error::invalid(
                "profile.hourly_weights",
                format!("must sum to 24, got {sum}"),
            ));
        }
        match &self.unit_scales {
            UnitScales::Uniform { min, max } => {
                if !(*min > S::zero() && *max >= *min && max.is_finite()) {
                    return Err(Error::invalid(
                        "profile.unit_scales",
                        "uniform range must satisfy 0 < min <= max",
                    ));
                }
            }
            UnitScales::Explicit(scales) => {
                if scales.len() != n_units {
                    return Err(Error::invalid(
                        "profile.unit_scales",
                        format!("expected {n_units} entries, got {}", scales.len()),
                    ));
                }
                if scales.iter().any(|s| !(*s >= S::zero() && s.is_finite())) {
                    return Err(Error::invalid(
                        "profile.unit_scales",
                        "entries must be >= 0 and finite",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Seeded production source shared by all units of a run.
#[derive(Debug, Clone)]
pub struct InflowGenerator {
    seed: u64,
    dt: u64,
    stream_seeds: Option<Vec<u64>>,
}

impl InflowGenerator {
    pub fn new(seed: u64, dt: u64) -> Self {
        InflowGenerator {
            seed,
            dt,
            stream_seeds: None,
        }
    }

    /// Overrides the per-unit noise streams. Mainly a testing hook: permuting
    /// streams together with unit definitions permutes per-unit traces
    /// without changing the aggregate.
    pub fn with_streams(seed: u64, dt: u64, streams: Vec<u64>) -> Self {
        InflowGenerator {
            seed,
            dt,
            stream_seeds: Some(streams),
        }
    }

    #[inline]
    fn stream(&self, unit: usize) -> u64 {
        match &self.stream_seeds {
            Some(v) => v[unit],
            None => rng::mix(&[self.seed, rng::STREAM_UNIT, unit as u64]),
        }
    }

    /// Production scale of a unit; constant over the run.
    pub fn unit_scale<S: Scalar>(&self, profile: &InflowProfile<S>, unit: usize) -> S {
        match &profile.unit_scales {
            UnitScales::Uniform { min, max } => {
                if min == max {
                    *min
                } else {
                    let w = rng::mix(&[self.stream(unit), rng::STREAM_SCALE]);
                    sc(rng::uniform(
                        w,
                        min.to_f64().unwrap(),
                        max.to_f64().unwrap(),
                    ))
                }
            }
            UnitScales::Explicit(scales) => scales[unit],
        }
    }

    /// Effluent volume produced by `unit` during the step starting at `t`.
    ///
    /// Non-negative; its expectation over the noise is
    /// `daily_mean * scale(unit) * weight(hour(t)) / 24 * dt / 3600`.
    pub fn inflow_at<S: Scalar>(&self, profile: &InflowProfile<S>, unit: usize, t: u64) -> S {
        let hour = ((t % SECONDS_PER_DAY) / 3600) as usize;
        let base = profile.daily_mean
            * self.unit_scale(profile, unit)
            * profile.hourly_weights[hour]
            / sc(24.0)
            * sc(self.dt as f64 / 3600.0);
        let cv = profile.noise_cv.to_f64().unwrap();
        if cv <= 0.0 || base == S::zero() {
            return base;
        }
        // Log-normal multiplier with mean 1 and the requested CV.
        let sigma2 = (1.0 + cv * cv).ln();
        let stream = self.stream(unit);
        let z = rng::standard_normal(
            rng::mix(&[stream, rng::STREAM_NOISE, t, 1]),
            rng::mix(&[stream, rng::STREAM_NOISE, t, 2]),
        );
        base * sc((-0.5 * sigma2 + sigma2.sqrt() * z).exp())
    }
}
