//! Scenario configuration: earthquake timing, behavioral constants and
//! the RNG seed. Loaded from TOML; every field has a default so an empty
//! file (or none at all) is a valid scenario.

use crate::debris::DebrisModel;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Shaking duration, seconds.
    pub shake_duration_s: f64,
    /// Simulated horizon, seconds.
    pub sim_duration_s: f64,
    /// Simulation step, seconds.
    pub tick_s: f64,
    /// Residents per apartment.
    pub household_size: u32,
    /// Egress delay per floor above the first, seconds.
    pub seconds_per_floor: f64,
    /// Natural walking speed draw bounds, m/s.
    pub speed_min_mps: f64,
    pub speed_max_mps: f64,
    /// Person disc radius for separation, meters (0 disables separation).
    pub person_radius_m: f64,
    /// Distance from a target space at which its locked/full status is
    /// discovered, meters.
    pub discovery_radius_m: f64,
    /// Debris footprint rule.
    pub debris_model: DebrisModel,
    /// Pile height for the ring debris model, meters.
    pub ring_pile_height_m: f64,
    /// Master seed for all random streams.
    pub seed: u64,
    /// Optional casualty-rate table (CSV); the shipped default otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub casualty_table: Option<PathBuf>,
    /// Optional speed-slope curve (CSV); the shipped default otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speed_slope_curve: Option<PathBuf>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            shake_duration_s: 30.0,
            sim_duration_s: 300.0,
            tick_s: 1.0,
            household_size: 4,
            seconds_per_floor: 15.0,
            speed_min_mps: 1.2,
            speed_max_mps: 1.6,
            person_radius_m: 0.3,
            discovery_radius_m: 2.0,
            debris_model: DebrisModel::Pyramid,
            ring_pile_height_m: 1.0,
            seed: 0,
            casualty_table: None,
            speed_slope_curve: None,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        if !(self.shake_duration_s > 0.0) {
            errors.push("shake_duration_s must be positive".to_string());
        }
        if !(self.sim_duration_s >= 0.0) {
            errors.push("sim_duration_s must be non-negative".to_string());
        }
        if !(self.tick_s > 0.0) {
            errors.push("tick_s must be positive".to_string());
        } else {
            let steps = self.sim_duration_s / self.tick_s;
            if (steps - steps.round()).abs() > 1e-9 {
                errors.push(format!(
                    "tick_s {} must divide sim_duration_s {}",
                    self.tick_s, self.sim_duration_s
                ));
            }
        }
        if self.household_size < 1 {
            errors.push("household_size must be at least 1".to_string());
        }
        if !(self.seconds_per_floor >= 0.0) {
            errors.push("seconds_per_floor must be non-negative".to_string());
        }
        if !(self.speed_min_mps > 0.0) || !(self.speed_max_mps >= self.speed_min_mps) {
            errors.push("speeds must satisfy 0 < speed_min_mps <= speed_max_mps".to_string());
        }
        if !(self.person_radius_m >= 0.0) {
            errors.push("person_radius_m must be non-negative".to_string());
        }
        if !(self.discovery_radius_m > 0.0) {
            errors.push("discovery_radius_m must be positive".to_string());
        }
        if !(self.ring_pile_height_m > 0.0) {
            errors.push("ring_pile_height_m must be positive".to_string());
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errors))
        }
    }

    /// Number of simulation steps implied by duration and tick.
    pub fn steps(&self) -> u64 {
        (self.sim_duration_s / self.tick_s).round() as u64
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("scenario config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        // Table paths are relative to the config file's directory.
        if let Some(dir) = path.parent() {
            if let Some(p) = cfg.casualty_table.take() {
                cfg.casualty_table = Some(if p.is_absolute() { p } else { dir.join(p) });
            }
            if let Some(p) = cfg.speed_slope_curve.take() {
                cfg.speed_slope_curve = Some(if p.is_absolute() { p } else { dir.join(p) });
            }
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}
