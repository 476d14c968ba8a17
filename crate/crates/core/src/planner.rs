//! Inverse maneuver design: flywheel speed and braking time for a target hop,
//! the escape-velocity guard, brake-torque sweeps and multi-hop missions.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::relative_error;
use crate::error::{require_positive, Error, Result};
use crate::hopdyn::{
    braking_deflection_deg, energy_ratio, fly_time, hop_distance, hop_velocity, min_torque,
    Environment, HopperConfig, LaunchState,
};

/// Tunables of the inverse planner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlanOptions {
    /// Launch angle the planner steers to (deg); 45° maximises range.
    pub target_angle_deg: f64,
    /// Spin-up torque as a fraction of the lift-off torque, in `(0, 1]`.
    pub spin_fraction: f64,
    /// Launch speed must stay below this fraction of escape velocity.
    pub escape_safety_factor: f64,
    /// Reported maximum distance when the escape limit does not bind (m).
    pub distance_cap: f64,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self {
            target_angle_deg: 45.0,
            spin_fraction: 1.0,
            escape_safety_factor: 0.9,
            distance_cap: 1.0e6,
        }
    }
}

impl PlanOptions {
    fn validate(&self) -> Result<()> {
        require_positive("target_angle_deg", self.target_angle_deg)?;
        if self.target_angle_deg >= 90.0 {
            return Err(Error::InvalidParameter {
                name: "target_angle_deg",
                value: self.target_angle_deg,
                reason: "must be below 90 deg",
            });
        }
        require_positive("spin_fraction", self.spin_fraction)?;
        if self.spin_fraction > 1.0 {
            return Err(Error::InvalidParameter {
                name: "spin_fraction",
                value: self.spin_fraction,
                reason: "spin-up torque must not exceed the lift-off torque",
            });
        }
        require_positive("escape_safety_factor", self.escape_safety_factor)?;
        require_positive("distance_cap", self.distance_cap)?;
        Ok(())
    }
}

/// Solved hop maneuver. Distances in m, speeds in m/s or rad/s, times in s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpPlan {
    pub target_distance: f64,
    pub slope_deg: f64,
    pub omega_f: f64,
    pub delta_t: f64,
    /// Mean brake torque (N·m); `None` for an instantaneous brake.
    pub brake_torque: Option<f64>,
    pub launch_angle_deg: f64,
    pub launch_speed: f64,
    /// Spin-up time from rest at the allowed spin-up torque.
    pub speedup_time: f64,
    pub fly_time: f64,
    pub predicted_distance: f64,
}

impl JumpPlan {
    pub fn launch(&self) -> LaunchState {
        LaunchState::new(self.launch_speed, self.launch_angle_deg)
    }

    pub fn is_instant(&self) -> bool {
        self.delta_t == 0.0
    }
}

/// Launch angle the planner will use on this slope, or an error for slopes
/// that fold the spike below the ground.
fn planned_angle_deg(cfg: &HopperConfig, env: &Environment, opts: &PlanOptions) -> Result<f64> {
    let geometric = cfg.alpha_deg + env.slope_deg;
    if geometric <= 0.0 {
        return Err(Error::DegenerateSlope {
            beta_deg: env.slope_deg,
        });
    }
    Ok(geometric.min(opts.target_angle_deg))
}

/// Flywheel speed and braking time that put the hopper `d_obj` metres away.
///
/// The launch angle is steered to `opts.target_angle_deg` by a finite brake.
/// When the geometric angle `α + β` is already at or below that target
/// the brake is instantaneous and the hop leaves at `α + β`.
pub fn plan_jump(
    d_obj: f64,
    cfg: &HopperConfig,
    env: &Environment,
    opts: &PlanOptions,
) -> Result<JumpPlan> {
    require_positive("target_distance", d_obj)?;
    cfg.validate()?;
    env.validate()?;
    opts.validate()?;

    let geometric = cfg.alpha_deg + env.slope_deg;
    let theta = planned_angle_deg(cfg, env, opts)?;
    let eta = energy_ratio(cfg);
    let l = cfg.spike_length;
    let omega_f = (d_obj * env.gravity / (2.0 * theta.to_radians()).sin()).sqrt() / (eta * l);

    let deflection = (geometric - theta).to_radians();
    let (delta_t, brake_torque) = if deflection > 0.0 {
        let dt = 2.0 * deflection / (eta * omega_f);
        (dt, Some(cfg.flywheel_inertia * omega_f / dt))
    } else {
        (0.0, None)
    };

    let launch_speed = hop_velocity(cfg, omega_f);
    let limit = opts.escape_safety_factor * env.escape_velocity;
    if launch_speed >= limit {
        return Err(Error::EscapeViolation {
            launch_speed,
            limit,
            max_safe_distance: max_safe_distance(cfg, env, opts)?,
        });
    }

    let spin_torque = opts.spin_fraction * min_torque(cfg, env)?;
    let launch = LaunchState::new(launch_speed, theta);
    Ok(JumpPlan {
        target_distance: d_obj,
        slope_deg: env.slope_deg,
        omega_f,
        delta_t,
        brake_torque,
        launch_angle_deg: theta,
        launch_speed,
        speedup_time: cfg.flywheel_inertia * omega_f / spin_torque,
        fly_time: fly_time(&launch, env),
        predicted_distance: hop_distance(&launch, env),
    })
}

/// Longest hop whose launch speed stays under the escape safety limit (m).
pub fn max_safe_distance(cfg: &HopperConfig, env: &Environment, opts: &PlanOptions) -> Result<f64> {
    env.validate()?;
    opts.validate()?;
    let v_max = opts.escape_safety_factor * env.escape_velocity;
    if !v_max.is_finite() {
        return Ok(opts.distance_cap);
    }
    let theta = planned_angle_deg(cfg, env, opts)?;
    let d = v_max * v_max * (2.0 * theta.to_radians()).sin() / env.gravity;
    Ok(d.min(opts.distance_cap))
}

/// Fraction of a hop's length taken as the achievable landing accuracy.
pub const HOP_ACCURACY_FRACTION: f64 = 0.10;

/// Upper bound on hops executed by [`MissionPlan::execute`].
pub const MAX_MISSION_HOPS: usize = 32;

/// Sequence of hops covering a long traverse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionPlan {
    pub total_distance: f64,
    pub tolerance: f64,
    pub max_hop: f64,
    pub hops: Vec<JumpPlan>,
    pub replan_after_each_landing: bool,
    pub warnings: Vec<String>,
}

/// Split `total` into full hops of `max_hop` plus a remainder.
///
/// A remainder no longer than `tolerance` is dropped.
pub fn greedy_split(total: f64, max_hop: f64, tolerance: f64) -> Vec<f64> {
    let mut targets = Vec::new();
    let mut left = total;
    while left > tolerance {
        let hop = left.min(max_hop);
        targets.push(hop);
        left -= hop;
    }
    targets
}

pub fn plan_mission(
    total: f64,
    tolerance: f64,
    cfg: &HopperConfig,
    env: &Environment,
    max_hop: f64,
    opts: &PlanOptions,
) -> Result<MissionPlan> {
    require_positive("total_distance", total)?;
    require_positive("max_hop", max_hop)?;
    if !(tolerance >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "tolerance",
            value: tolerance,
            reason: "must be non-negative",
        });
    }
    let safe = max_safe_distance(cfg, env, opts)?;
    if max_hop > safe {
        let limit = opts.escape_safety_factor * env.escape_velocity;
        return Err(Error::EscapeViolation {
            launch_speed: limit * (max_hop / safe).sqrt(),
            limit,
            max_safe_distance: safe,
        });
    }

    let hops = greedy_split(total, max_hop, tolerance)
        .into_iter()
        .map(|d| plan_jump(d, cfg, env, opts))
        .collect::<Result<Vec<_>>>()?;

    let mut warnings = Vec::new();
    if let Some(shortest) = hops.iter().map(|h| h.target_distance).reduce(f64::min) {
        let accuracy = HOP_ACCURACY_FRACTION * shortest;
        if tolerance < accuracy {
            warnings.push(format!(
                "tolerance {tolerance} m is tighter than the expected per-hop accuracy \
                 {accuracy:.3} m; extra corrective hops are likely"
            ));
        }
    }

    Ok(MissionPlan {
        total_distance: total,
        tolerance,
        max_hop,
        hops,
        replan_after_each_landing: true,
        warnings,
    })
}

/// One executed hop of a mission.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopRecord {
    pub target: f64,
    /// +1 towards the goal, -1 back after an overshoot.
    pub direction: f64,
    pub realized: f64,
    /// Along-track position after landing (m).
    pub position: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionReport {
    pub total_distance: f64,
    pub tolerance: f64,
    pub hops: Vec<HopRecord>,
    pub final_position: f64,
    pub residual: f64,
    pub error_pct: f64,
    pub within_tolerance: bool,
}

impl MissionPlan {
    /// Fly the mission, asking `realize` for the landing distance of each hop.
    ///
    /// With replanning, every hop after a landing targets the remaining
    /// distance (capped at `max_hop`); an overshoot beyond the tolerance is
    /// corrected by hopping back, which flips the apparent slope. Without it
    /// the planned hops are flown as-is.
    pub fn execute<F>(
        &self,
        cfg: &HopperConfig,
        env: &Environment,
        opts: &PlanOptions,
        mut realize: F,
    ) -> Result<MissionReport>
    where
        F: FnMut(&JumpPlan, &Environment) -> Result<f64>,
    {
        let mut position = 0.0;
        let mut hops = Vec::new();
        for index in 0..MAX_MISSION_HOPS {
            let residual = self.total_distance - position;
            let (plan, hop_env, direction) = if self.replan_after_each_landing {
                if residual.abs() <= self.tolerance {
                    break;
                }
                let direction = residual.signum();
                let hop_env = env.with_slope(direction * env.slope_deg);
                let target = residual.abs().min(self.max_hop);
                (plan_jump(target, cfg, &hop_env, opts)?, hop_env, direction)
            } else {
                match self.hops.get(index) {
                    Some(plan) => (*plan, *env, 1.0),
                    None => break,
                }
            };
            let realized = realize(&plan, &hop_env)?;
            position += direction * realized;
            hops.push(HopRecord {
                target: plan.target_distance,
                direction,
                realized,
                position,
            });
        }
        let residual = self.total_distance - position;
        Ok(MissionReport {
            total_distance: self.total_distance,
            tolerance: self.tolerance,
            hops,
            final_position: position,
            residual,
            error_pct: relative_error(self.total_distance, position)?,
            within_tolerance: residual.abs() <= self.tolerance,
        })
    }
}

/// Log-spaced brake torques for a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorqueRange {
    pub min: f64,
    pub max: f64,
    pub samples: usize,
}

impl Default for TorqueRange {
    fn default() -> Self {
        Self {
            min: 1e-2,
            max: 1e1,
            samples: 1001,
        }
    }
}

impl TorqueRange {
    pub fn values(&self) -> Vec<f64> {
        let ratio = (self.max / self.min).ln();
        let last = (self.samples - 1) as f64;
        (0..self.samples)
            .map(|i| match i {
                0 => self.min,
                i if i + 1 == self.samples => self.max,
                i => self.min * (ratio * i as f64 / last).exp(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub tau: f64,
    pub theta_deg: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub omega_f: f64,
    pub slope_deg: f64,
    pub rows: Vec<SweepRow>,
    /// Index of the longest hop (first one on ties).
    pub argmax: usize,
}

impl SweepTable {
    pub fn best(&self) -> &SweepRow {
        &self.rows[self.argmax]
    }

    /// CSV with header `tau_Nm,theta_deg,d_m`.
    pub fn write_csv<W: Write>(&self, writer: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["tau_Nm", "theta_deg", "d_m"])?;
        for r in &self.rows {
            w.write_record([
                r.tau.to_string(),
                r.theta_deg.to_string(),
                r.distance.to_string(),
            ])?;
        }
        w.flush()
    }
}

/// Launch angle and hop distance across a range of mean brake torques.
///
/// Rows whose launch angle leaves `(0°, 90°)` keep the raw angle and report a
/// distance of zero.
pub fn sweep_brake_torque(
    cfg: &HopperConfig,
    env: &Environment,
    omega_f: f64,
    range: &TorqueRange,
) -> Result<SweepTable> {
    cfg.validate()?;
    env.validate()?;
    require_positive("omega_f", omega_f)?;
    require_positive("torque_min", range.min)?;
    if !(range.max > range.min) || range.samples < 2 {
        return Err(Error::InvalidParameter {
            name: "torque_range",
            value: range.max,
            reason: "needs max > min and at least two samples",
        });
    }
    let speed = hop_velocity(cfg, omega_f);
    let geometric = cfg.alpha_deg + env.slope_deg;
    let rows: Vec<SweepRow> = range
        .values()
        .into_par_iter()
        .map(|tau| {
            let theta_deg = geometric - braking_deflection_deg(cfg, omega_f, tau);
            let launch = LaunchState::new(speed, theta_deg);
            let distance = if launch.is_ballistic() {
                hop_distance(&launch, env)
            } else {
                0.0
            };
            SweepRow {
                tau,
                theta_deg,
                distance,
            }
        })
        .collect();
    let argmax = rows.iter().enumerate().fold(0, |best, (i, r)| {
        if r.distance > rows[best].distance {
            i
        } else {
            best
        }
    });
    Ok(SweepTable {
        omega_f,
        slope_deg: env.slope_deg,
        rows,
        argmax,
    })
}
