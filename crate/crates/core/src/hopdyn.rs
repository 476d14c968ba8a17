//! Planar leverage and launch physics of the cubic hopper.
//!
//! Angles cross this module's boundary in degrees and are converted to radians
//! internally. Every function is a pure function of its arguments.

use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};

/// Geometry and inertia of the rover.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopperConfig {
    /// Half the angle between spikes (deg).
    #[serde(rename = "half_spike_angle_alpha")]
    pub alpha_deg: f64,
    /// Spike length, pivot to centre of mass (m).
    #[serde(rename = "spike_length_l")]
    pub spike_length: f64,
    #[serde(rename = "platform_mass_mp")]
    pub platform_mass: f64,
    #[serde(rename = "platform_inertia_Ip")]
    pub platform_inertia: f64,
    #[serde(rename = "flywheel_inertia_If")]
    pub flywheel_inertia: f64,
    #[serde(rename = "flywheel_mass_mf")]
    pub flywheel_mass: f64,
}

impl HopperConfig {
    /// 10 cm cube, 1.5 kg, 76 g aluminium flywheel.
    pub const CUBE_1U: HopperConfig = HopperConfig {
        alpha_deg: 45.0,
        spike_length: 0.071,
        platform_mass: 1.5,
        platform_inertia: 25e-4,
        flywheel_inertia: 3.42e-5,
        flywheel_mass: 0.076,
    };

    pub fn validate(&self) -> Result<()> {
        require_positive("half_spike_angle_alpha", self.alpha_deg)?;
        if self.alpha_deg >= 90.0 {
            return Err(Error::InvalidParameter {
                name: "half_spike_angle_alpha",
                value: self.alpha_deg,
                reason: "must be below 90 deg",
            });
        }
        require_positive("spike_length_l", self.spike_length)?;
        require_positive("platform_mass_mp", self.platform_mass)?;
        require_positive("platform_inertia_Ip", self.platform_inertia)?;
        require_positive("flywheel_inertia_If", self.flywheel_inertia)?;
        require_positive("flywheel_mass_mf", self.flywheel_mass)?;
        if self.flywheel_inertia >= self.platform_inertia {
            return Err(Error::InvalidParameter {
                name: "flywheel_inertia_If",
                value: self.flywheel_inertia,
                reason: "must be below the platform inertia",
            });
        }
        Ok(())
    }

    /// Platform inertia about the pivot spike, `I_p + m_p·l²`.
    pub fn pivot_inertia(&self) -> f64 {
        self.platform_inertia + self.platform_mass * self.spike_length * self.spike_length
    }
}

impl Default for HopperConfig {
    fn default() -> Self {
        Self::CUBE_1U
    }
}

/// Target body and local terrain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    /// Uniform surface gravity (m/s²).
    #[serde(rename = "gravity_g")]
    pub gravity: f64,
    /// Surface slope, counter-clockwise positive (deg).
    #[serde(rename = "slope_beta")]
    pub slope_deg: f64,
    /// Escape velocity of the body (m/s).
    pub escape_velocity: f64,
}

impl Environment {
    /// Mean surface gravity and escape speed of asteroid 25143 Itokawa.
    pub const ITOKAWA: Environment = Environment {
        gravity: 77e-6,
        slope_deg: 0.0,
        escape_velocity: 0.1128,
    };

    pub fn validate(&self) -> Result<()> {
        require_positive("gravity_g", self.gravity)?;
        if !(-90.0..=90.0).contains(&self.slope_deg) {
            return Err(Error::InvalidParameter {
                name: "slope_beta",
                value: self.slope_deg,
                reason: "must lie in [-90, 90] deg",
            });
        }
        if self.escape_velocity.is_nan() || self.escape_velocity <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "escape_velocity",
                value: self.escape_velocity,
                reason: "must be strictly positive",
            });
        }
        Ok(())
    }

    pub fn with_slope(self, slope_deg: f64) -> Self {
        Self { slope_deg, ..self }
    }
}

impl Default for Environment {
    fn default() -> Self {
        Self::ITOKAWA
    }
}

/// Take-off velocity of a hop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaunchState {
    /// m/s
    pub speed: f64,
    /// deg above the horizontal
    pub angle_deg: f64,
}

impl LaunchState {
    pub fn new(speed: f64, angle_deg: f64) -> Self {
        Self { speed, angle_deg }
    }

    pub fn is_ballistic(&self) -> bool {
        self.speed >= 0.0 && self.angle_deg > 0.0 && self.angle_deg < 90.0
    }
}

/// Result of converting a braking time into a braking torque.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Braking {
    /// Zero braking time: the momentum transfer is instantaneous.
    Instant,
    /// Mean braking torque (N·m).
    Torque(f64),
}

/// Which leverage-phase equation to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeverageModel {
    /// Gravity moment plus torque.
    Exact,
    /// Torque-dominated approximation valid when the brake torque dwarfs the
    /// gravity moment.
    HighTorque,
}

/// Ratio by which the brake torque must exceed `m_p·g·l` before the
/// high-torque approximation is taken as valid.
pub const HIGH_TORQUE_MARGIN: f64 = 100.0;

fn geometric_angle_deg(cfg: &HopperConfig, env: &Environment) -> f64 {
    cfg.alpha_deg + env.slope_deg
}

/// Smallest flywheel torque that starts the platform pivoting from rest (N·m).
pub fn min_torque(cfg: &HopperConfig, env: &Environment) -> Result<f64> {
    let angle = geometric_angle_deg(cfg, env);
    if angle >= 180.0 {
        return Err(Error::InvalidGeometry { angle_deg: angle });
    }
    cfg.validate()?;
    env.validate()?;
    Ok(cfg.platform_mass * env.gravity * cfg.spike_length * angle.to_radians().sin())
}

/// Energy transfer ratio `η = I_f / (I_p + m_p·l²)`.
pub fn energy_ratio(cfg: &HopperConfig) -> f64 {
    cfg.flywheel_inertia / cfg.pivot_inertia()
}

/// Hop speed after a full momentum transfer from a flywheel at `omega_f`
/// (rad/s), m/s.
pub fn hop_velocity(cfg: &HopperConfig, omega_f: f64) -> f64 {
    energy_ratio(cfg) * cfg.spike_length * omega_f
}

/// Launch angle for an instantaneous brake, `α + β` (deg).
pub fn launch_angle_instant(cfg: &HopperConfig, env: &Environment) -> Result<f64> {
    let angle = geometric_angle_deg(cfg, env);
    if angle <= 0.0 || angle >= 90.0 {
        return Err(Error::NonBallistic { angle_deg: angle });
    }
    Ok(angle)
}

/// Launch-angle deflection produced by a brake of constant torque, deg.
pub fn braking_deflection_deg(cfg: &HopperConfig, omega_f: f64, brake_torque: f64) -> f64 {
    let eta = energy_ratio(cfg);
    (eta * cfg.flywheel_inertia * omega_f * omega_f / (2.0 * brake_torque)).to_degrees()
}

/// Same deflection expressed through the braking time, `η·ω_f·Δt/2` (deg).
pub fn braking_deflection_from_time_deg(cfg: &HopperConfig, omega_f: f64, delta_t: f64) -> f64 {
    (energy_ratio(cfg) * omega_f * delta_t / 2.0).to_degrees()
}

/// Launch angle when the flywheel is stopped by a finite mean torque (deg).
///
/// Uses the high-torque leverage approximation; a warning is logged when the
/// torque is less than [`HIGH_TORQUE_MARGIN`] times the gravity moment.
pub fn launch_angle_braked(
    cfg: &HopperConfig,
    env: &Environment,
    omega_f: f64,
    brake_torque: f64,
) -> Result<f64> {
    require_positive("brake_torque", brake_torque)?;
    require_non_negative("omega_f", omega_f)?;
    let gravity_moment = cfg.platform_mass * env.gravity * cfg.spike_length;
    if brake_torque < HIGH_TORQUE_MARGIN * gravity_moment {
        log::warn!(
            "brake torque {brake_torque:.3e} N·m is below {HIGH_TORQUE_MARGIN}x the gravity \
             moment {gravity_moment:.3e} N·m; the launch-angle approximation degrades"
        );
    }
    let available = geometric_angle_deg(cfg, env);
    let deflection = braking_deflection_deg(cfg, omega_f, brake_torque);
    if deflection >= available {
        return Err(Error::OverBraked {
            deflection_deg: deflection,
            available_deg: available,
        });
    }
    Ok(available - deflection)
}

/// Mean brake torque that removes the flywheel momentum in `delta_t` seconds.
pub fn brake_torque_from_time(cfg: &HopperConfig, omega_f: f64, delta_t: f64) -> Result<Braking> {
    require_non_negative("delta_t", delta_t)?;
    if delta_t == 0.0 {
        return Ok(Braking::Instant);
    }
    Ok(Braking::Torque(cfg.flywheel_inertia * omega_f / delta_t))
}

/// Launch angle for a brake lasting `delta_t` seconds (0 means instantaneous).
pub fn launch_angle_for_brake_time(
    cfg: &HopperConfig,
    env: &Environment,
    omega_f: f64,
    delta_t: f64,
) -> Result<f64> {
    match brake_torque_from_time(cfg, omega_f, delta_t)? {
        // A wheel at rest stores no momentum, so there is nothing to deflect.
        Braking::Instant | Braking::Torque(0.0) => launch_angle_instant(cfg, env),
        Braking::Torque(torque) => launch_angle_braked(cfg, env, omega_f, torque),
    }
}

/// Range over a landing plane level with the launch point (m).
pub fn hop_distance(launch: &LaunchState, env: &Environment) -> f64 {
    launch.speed * launch.speed * (2.0 * launch.angle_deg.to_radians()).sin() / env.gravity
}

/// Time of flight back to launch height (s).
pub fn fly_time(launch: &LaunchState, env: &Environment) -> f64 {
    2.0 * launch.speed * launch.angle_deg.to_radians().sin() / env.gravity
}

/// Flywheel speed that reaches `distance` with an instantaneous brake (rad/s).
pub fn flywheel_speed_instant(distance: f64, cfg: &HopperConfig, env: &Environment) -> Result<f64> {
    require_non_negative("distance", distance)?;
    let angle = geometric_angle_deg(cfg, env);
    if angle <= 0.0 || angle >= 90.0 {
        return Err(Error::NoSolution { angle_deg: angle });
    }
    let eta = energy_ratio(cfg);
    let l = cfg.spike_length;
    Ok((distance * env.gravity / (eta * eta * l * l * (2.0 * angle.to_radians()).sin())).sqrt())
}

/// Angular acceleration of the platform about its pivot spike (rad/s²).
pub fn leverage_acceleration(
    cfg: &HopperConfig,
    env: &Environment,
    theta_deg: f64,
    torque: f64,
    model: LeverageModel,
) -> f64 {
    let inertia = cfg.pivot_inertia();
    match model {
        LeverageModel::Exact => {
            let gravity_moment =
                cfg.platform_mass * env.gravity * cfg.spike_length * theta_deg.to_radians().sin();
            (gravity_moment - torque) / inertia
        }
        LeverageModel::HighTorque => -torque / inertia,
    }
}
