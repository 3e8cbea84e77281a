//! Scenario files: a flat TOML document with one dotted section per
//! concern. Every key has a default except `seed`, which must be written
//! out so published results stay reproducible. Unknown keys are rejected.

use std::path::Path;

use psewer_core::{
    build_schedule, mass_balance_pump_time, ControlConfig, InflowProfile, ModuleSet, SimConfig,
    TankParams, UnitScales,
};
use serde::Deserialize;

use crate::commands::CliError;

/// How windowed sums are taken for the summary and plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SumMode {
    /// Sliding window, stepped by dt.
    Moving,
    /// Non-overlapping blocks.
    Block,
}

/// Parsed scenario document.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default = "default_label")]
    pub label: String,
    /// Mandatory: runs are only published with a pinned seed.
    pub seed: u64,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub tank: TankSection,
    #[serde(default, rename = "tank_override")]
    pub tank_overrides: Vec<TankOverrideSection>,
    #[serde(default)]
    pub profile: ProfileSection,
    #[serde(default)]
    pub control: ControlSection,
    #[serde(default)]
    pub metrics: MetricsSection,
}

fn default_label() -> String {
    "scenario".to_string()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSection {
    pub n_units: usize,
    pub horizon_days: u32,
    pub dt_s: u64,
}

impl Default for SimSection {
    fn default() -> Self {
        SimSection {
            n_units: 12,
            horizon_days: 10,
            dt_s: 10,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TankSection {
    pub capacity_m3: f64,
    pub dead_volume_m3: f64,
    pub learn_low_m3: f64,
    pub learn_high_m3: f64,
    pub warn_level_m3: f64,
    pub high_start_m3: f64,
    pub low_stop_m3: f64,
    pub pump_rate_m3_per_s: f64,
    /// Start volume of every tank; middle of the learning band when absent.
    pub init_volume_m3: Option<f64>,
}

impl Default for TankSection {
    fn default() -> Self {
        let t = TankParams::<f64>::default();
        TankSection {
            capacity_m3: t.capacity,
            dead_volume_m3: t.dead_volume,
            learn_low_m3: t.learn_low,
            learn_high_m3: t.learn_high,
            warn_level_m3: t.warn_level,
            high_start_m3: t.high_start,
            low_stop_m3: t.low_stop,
            pump_rate_m3_per_s: t.pump_rate,
            init_volume_m3: None,
        }
    }
}

impl TankSection {
    fn to_params(&self) -> TankParams<f64> {
        TankParams {
            capacity: self.capacity_m3,
            dead_volume: self.dead_volume_m3,
            learn_low: self.learn_low_m3,
            learn_high: self.learn_high_m3,
            warn_level: self.warn_level_m3,
            high_start: self.high_start_m3,
            low_stop: self.low_stop_m3,
            pump_rate: self.pump_rate_m3_per_s,
        }
    }
}

/// Partial per-unit tank override; unset keys inherit from `[tank]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TankOverrideSection {
    pub unit: usize,
    pub capacity_m3: Option<f64>,
    pub dead_volume_m3: Option<f64>,
    pub learn_low_m3: Option<f64>,
    pub learn_high_m3: Option<f64>,
    pub warn_level_m3: Option<f64>,
    pub high_start_m3: Option<f64>,
    pub low_stop_m3: Option<f64>,
    pub pump_rate_m3_per_s: Option<f64>,
}

impl TankOverrideSection {
    fn apply(&self, base: &TankParams<f64>) -> TankParams<f64> {
        TankParams {
            capacity: self.capacity_m3.unwrap_or(base.capacity),
            dead_volume: self.dead_volume_m3.unwrap_or(base.dead_volume),
            learn_low: self.learn_low_m3.unwrap_or(base.learn_low),
            learn_high: self.learn_high_m3.unwrap_or(base.learn_high),
            warn_level: self.warn_level_m3.unwrap_or(base.warn_level),
            high_start: self.high_start_m3.unwrap_or(base.high_start),
            low_stop: self.low_stop_m3.unwrap_or(base.low_stop),
            pump_rate: self.pump_rate_m3_per_s.unwrap_or(base.pump_rate),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileSection {
    pub daily_mean_m3: f64,
    pub noise_cv: f64,
    pub unit_scale_min: f64,
    pub unit_scale_max: f64,
    /// Explicit per-unit scales; override the uniform range when present.
    pub unit_scales: Option<Vec<f64>>,
    /// 24 relative hourly intensities summing to 24; a built-in profile
    /// with a morning and a higher evening peak when absent.
    pub hourly_weights: Option<Vec<f64>>,
    /// Explicit per-unit noise streams; derived from the seed when absent.
    pub unit_stream_seeds: Option<Vec<u64>>,
}

impl Default for ProfileSection {
    fn default() -> Self {
        ProfileSection {
            daily_mean_m3: 0.54,
            noise_cv: 0.3,
            unit_scale_min: 0.5,
            unit_scale_max: 1.5,
            unit_scales: None,
            hourly_weights: None,
            unit_stream_seeds: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControlSection {
    /// Enabled modules as letters, e.g. "A", "AB", "ABCD".
    pub enabled: String,
    pub slot_len_s: u64,
    /// Every n-th slot is the shared relief slot; 0 disables them.
    pub emergent_period: u64,
    /// Adaptation step of the learning module (s).
    pub learn_step_s: f64,
    /// Pump seconds per owned slot; sized by the mass balance when absent.
    pub base_pump_time_s: Option<f64>,
}

impl Default for ControlSection {
    fn default() -> Self {
        ControlSection {
            enabled: "ABCD".to_string(),
            slot_len_s: 600,
            emergent_period: 10,
            learn_step_s: 10.0,
            base_pump_time_s: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsSection {
    /// Window of the leveling metric (s).
    pub window_s: u64,
    #[serde(default = "default_mode")]
    pub mode: SumMode,
}

fn default_mode() -> SumMode {
    SumMode::Moving
}

impl Default for MetricsSection {
    fn default() -> Self {
        MetricsSection {
            window_s: 7200,
            mode: SumMode::Moving,
        }
    }
}

/// Scenario resolved into a runnable configuration.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    pub label: String,
    pub config: SimConfig<f64>,
    pub window_s: u64,
    pub sum_mode: SumMode,
    /// Non-fatal findings for the run report (e.g. a capped pump time).
    pub warnings: Vec<String>,
}

impl ScenarioFile {
    /// Reads and resolves a scenario, applying `key=value` overrides and an
    /// optional seed override on top of the file.
    pub fn load(
        path: &Path,
        overrides: &[String],
        seed: Option<u64>,
    ) -> Result<ResolvedScenario, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        let mut value: toml::Value = toml::from_str(&text)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        for entry in overrides {
            apply_override(&mut value, entry)?;
        }
        if let Some(seed) = seed {
            value
                .as_table_mut()
                .ok_or_else(|| CliError::Validation("scenario root must be a table".into()))?
                .insert("seed".into(), toml::Value::Integer(seed as i64));
        }
        let file: ScenarioFile = value
            .try_into()
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        file.resolve()
    }

    pub fn resolve(&self) -> Result<ResolvedScenario, CliError> {
        let mut warnings = Vec::new();
        let modules =
            ModuleSet::parse(&self.control.enabled).map_err(|e| CliError::Validation(e.to_string()))?;
        let schedule = build_schedule(
            self.sim.n_units,
            self.control.slot_len_s,
            self.control.emergent_period,
            self.seed,
        )
        .map_err(|e| CliError::Validation(e.to_string()))?;

        let tank = self.tank.to_params();
        let base_pump_time = match self.control.base_pump_time_s {
            Some(t) => t,
            None => {
                let sized = mass_balance_pump_time(
                    self.profile.daily_mean_m3,
                    tank.pump_rate,
                    schedule.mean_slots_per_unit(),
                    schedule.slot_len(),
                )
                .map_err(|e| CliError::Validation(e.to_string()))?;
                if sized.capped {
                    warnings.push(format!(
                        "control.base_pump_time_s: mass balance needs more than one whole slot; \
                         capped to {} s (schedule is undersized for the load)",
                        sized.seconds
                    ));
                }
                sized.seconds
            }
        };

        let unit_scales = match &self.profile.unit_scales {
            Some(explicit) => UnitScales::Explicit(explicit.clone()),
            None => UnitScales::Uniform {
                min: self.profile.unit_scale_min,
                max: self.profile.unit_scale_max,
            },
        };
        let mut profile = InflowProfile {
            daily_mean: self.profile.daily_mean_m3,
            noise_cv: self.profile.noise_cv,
            unit_scales,
            ..InflowProfile::default()
        };
        if let Some(weights) = &self.profile.hourly_weights {
            if weights.len() != 24 {
                return Err(CliError::Validation(format!(
                    "invalid configuration: profile.hourly_weights: expected 24 entries, got {}",
                    weights.len()
                )));
            }
            profile.hourly_weights = std::array::from_fn(|h| weights[h]);
        }

        let config = SimConfig {
            n_units: self.sim.n_units,
            horizon_days: self.sim.horizon_days,
            dt: self.sim.dt_s,
            seed: self.seed,
            tank,
            tank_overrides: self
                .tank_overrides
                .iter()
                .map(|o| (o.unit, o.apply(&tank)))
                .collect(),
            init_volume: self.tank.init_volume_m3,
            profile,
            control: ControlConfig {
                modules,
                base_pump_time,
                learn_step: self.control.learn_step_s,
                schedule,
            },
            unit_stream_seeds: self.profile.unit_stream_seeds.clone(),
        };
        config
            .validate()
            .map_err(|e| CliError::Validation(e.to_string()))?;
        if self.metrics.window_s == 0 || self.metrics.window_s % self.sim.dt_s != 0 {
            return Err(CliError::Validation(format!(
                "invalid configuration: metrics.window_s: must be a positive multiple of dt ({} s)",
                self.sim.dt_s
            )));
        }
        Ok(ResolvedScenario {
            label: self.label.clone(),
            config,
            window_s: self.metrics.window_s,
            sum_mode: self.metrics.mode,
            warnings,
        })
    }
}

/// Applies one `section.key=value` override into the raw document.
fn apply_override(root: &mut toml::Value, entry: &str) -> Result<(), CliError> {
    let (path, raw) = entry.split_once('=').ok_or_else(|| {
        CliError::Validation(format!("override '{entry}' must look like section.key=value"))
    })?;
    let path = path.trim();
    let raw = raw.trim();
    if path.is_empty() {
        return Err(CliError::Validation(format!(
            "override '{entry}' is missing the key path"
        )));
    }
    // Parse the value through TOML; bare words fall back to strings.
    let parsed: toml::Value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(table) => table["v"].clone(),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let mut node = root;
    let parts: Vec<&str> = path.split('.').collect();
    for part in &parts[..parts.len() - 1] {
        let table = node.as_table_mut().ok_or_else(|| {
            CliError::Validation(format!("override '{path}': '{part}' is not a section"))
        })?;
        node = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    }
    let table = node.as_table_mut().ok_or_else(|| {
        CliError::Validation(format!("override '{path}' does not address a section"))
    })?;
    table.insert(parts[parts.len() - 1].to_string(), parsed);
    Ok(())
}
