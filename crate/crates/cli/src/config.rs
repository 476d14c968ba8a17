use std::path::{Path, PathBuf};

use flyhop::control::{BrakeSettings, DesignSpec, Perturbation};
use flyhop::hopdyn::{Environment, HopperConfig};
use flyhop::motor::MotorParams;
use flyhop::planner::PlanOptions;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Environment variable naming the scenario file used when `--config` is absent.
pub const CONFIG_ENV: &str = "FLYHOP_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerConfig {
    pub overshoot_pct: f64,
    pub settling_time: f64,
    pub sample_time: f64,
    pub supply_voltage: f64,
    pub stop_threshold: f64,
    pub dwell_samples: usize,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        let spec = DesignSpec::default();
        let brake = BrakeSettings::default();
        Self {
            overshoot_pct: spec.overshoot_pct,
            settling_time: spec.settling_time,
            sample_time: 5e-4,
            supply_voltage: brake.supply_voltage,
            stop_threshold: brake.stop_threshold,
            dwell_samples: brake.dwell_samples,
        }
    }
}

impl ControllerConfig {
    pub fn design_spec(&self) -> DesignSpec {
        DesignSpec {
            overshoot_pct: self.overshoot_pct,
            settling_time: self.settling_time,
        }
    }

    pub fn brake_settings(&self) -> BrakeSettings {
        BrakeSettings {
            supply_voltage: self.supply_voltage,
            stop_threshold: self.stop_threshold,
            dwell_samples: self.dwell_samples,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    pub target_angle_deg: f64,
    pub spin_fraction: f64,
    pub escape_safety_factor: f64,
    pub distance_cap: f64,
    /// Longest hop a mission may schedule (m).
    pub max_hop: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        let o = PlanOptions::default();
        Self {
            target_angle_deg: o.target_angle_deg,
            spin_fraction: o.spin_fraction,
            escape_safety_factor: o.escape_safety_factor,
            distance_cap: o.distance_cap,
            max_hop: 100.0,
        }
    }
}

impl PlannerConfig {
    pub fn options(&self) -> PlanOptions {
        PlanOptions {
            target_angle_deg: self.target_angle_deg,
            spin_fraction: self.spin_fraction,
            escape_safety_factor: self.escape_safety_factor,
            distance_cap: self.distance_cap,
        }
    }
}

/// One scenario: vehicle, body, controller and run settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub motor: MotorParams,
    pub hopper: HopperConfig,
    pub environment: Environment,
    pub controller: ControllerConfig,
    pub perturbation: Perturbation,
    pub planner: PlannerConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 2019,
            output_dir: PathBuf::from("out"),
            motor: MotorParams::default(),
            hopper: HopperConfig::default(),
            environment: Environment::default(),
            controller: ControllerConfig::default(),
            perturbation: Perturbation::default(),
            planner: PlannerConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Load `explicit`, else the file named by [`CONFIG_ENV`], else the
    /// built-in defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self, CliError> {
        match explicit {
            Some(path) => Self::load(path),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(path) if !path.is_empty() => Self::load(Path::new(&path)),
                _ => Ok(Self::default()),
            },
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.motor.validate()?;
        self.hopper.validate()?;
        self.environment.validate()?;
        self.controller.design_spec().validate()?;
        if !(self.controller.sample_time > 0.0) {
            return Err(CliError::Config(
                "controller.sample_time must be positive".into(),
            ));
        }
        if !(self.planner.max_hop > 0.0) {
            return Err(CliError::Config("planner.max_hop must be positive".into()));
        }
        Ok(())
    }

    pub fn environment_with_slope(&self, slope: Option<f64>) -> Environment {
        match slope {
            Some(beta) => self.environment.with_slope(beta),
            None => self.environment,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_scenario_matches_defaults() {
        let text = include_str!("../scenarios/itokawa.toml");
        assert_eq!(RunConfig::from_toml(text).unwrap(), RunConfig::default());
    }

    #[test]
    fn sections_may_be_omitted() {
        let cfg = RunConfig::from_toml("seed = 7\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.motor, MotorParams::PROTOTYPE);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            RunConfig::from_toml("sed = 7\n"),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn invalid_values_are_rejected() {
        let text = "[controller]\nsample_time = 0.0\n";
        assert!(RunConfig::from_toml(text).is_err());
    }
}
