//! Ballistic flight under uniform weak gravity, replay of braking responses
//! into hops, and landing statistics.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::control::{relative_error, BrakeResponse};
use crate::error::{require_positive, Error, Result};
use crate::hopdyn::{
    hop_velocity, launch_angle_for_brake_time, Environment, HopperConfig, LaunchState,
};

/// Integration steps per flight; the half step places the landing mid-step.
const STEPS_PER_FLIGHT: f64 = 1000.5;

/// Landing ring half-width as a fraction of the target distance.
pub const TOLERANCE_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlightSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

impl FlightSample {
    /// Specific mechanical energy `v²/2 + g·y`.
    pub fn energy(&self, gravity: f64) -> f64 {
        0.5 * (self.vx * self.vx + self.vy * self.vy) + gravity * self.y
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<FlightSample>,
    pub launch: LaunchState,
    pub gravity: f64,
    pub landing_distance: f64,
    pub fly_time: f64,
}

impl Trajectory {
    /// Apex time and height, extended from the last rising sample.
    pub fn apex(&self) -> (f64, f64) {
        let g = self.gravity;
        let rising = self
            .samples
            .iter()
            .take_while(|s| s.vy > 0.0)
            .last()
            .unwrap_or(&self.samples[0]);
        let climb = rising.vy.max(0.0);
        (rising.t + climb / g, rising.y + climb * climb / (2.0 * g))
    }

    /// CSV with header `t_s,x_m,y_m`.
    pub fn write_csv<W: Write>(&self, writer: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t_s", "x_m", "y_m"])?;
        for s in &self.samples {
            w.write_record([s.t.to_string(), s.x.to_string(), s.y.to_string()])?;
        }
        w.flush()
    }
}

fn derivative(s: &FlightSample, g: f64) -> [f64; 4] {
    [s.vx, s.vy, 0.0, -g]
}

fn rk4_step(s: &FlightSample, h: f64, g: f64) -> FlightSample {
    let shift = |k: [f64; 4], f: f64| FlightSample {
        t: s.t + f,
        x: s.x + k[0] * f,
        y: s.y + k[1] * f,
        vx: s.vx + k[2] * f,
        vy: s.vy + k[3] * f,
    };
    let k1 = derivative(s, g);
    let k2 = derivative(&shift(k1, h / 2.0), g);
    let k3 = derivative(&shift(k2, h / 2.0), g);
    let k4 = derivative(&shift(k3, h), g);
    let mut d = [0.0; 4];
    for i in 0..4 {
        d[i] = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
    }
    shift(d, h)
}

/// Integrate the hop from the origin until it returns to launch height.
///
/// Fixed-step RK4 with about a thousand steps per flight; the landing is
/// placed by linear interpolation across the step where `y` changes sign.
/// A launch without upward speed yields a single sample at the origin.
pub fn simulate_flight(launch: &LaunchState, env: &Environment) -> Trajectory {
    let g = env.gravity;
    let theta = launch.angle_deg.to_radians();
    let start = FlightSample {
        t: 0.0,
        x: 0.0,
        y: 0.0,
        vx: launch.speed * theta.cos(),
        vy: launch.speed * theta.sin(),
    };
    let mut samples = vec![start];
    if start.vy > 0.0 && g > 0.0 {
        let h = 2.0 * start.vy / g / STEPS_PER_FLIGHT;
        let mut s = start;
        loop {
            let next = rk4_step(&s, h, g);
            if next.y <= 0.0 {
                let f = s.y / (s.y - next.y);
                samples.push(FlightSample {
                    t: s.t + f * h,
                    x: s.x + f * (next.x - s.x),
                    y: 0.0,
                    vx: s.vx + f * (next.vx - s.vx),
                    vy: s.vy + f * (next.vy - s.vy),
                });
                break;
            }
            samples.push(next);
            s = next;
        }
    }
    let last = samples[samples.len() - 1];
    Trajectory {
        samples,
        launch: *launch,
        gravity: g,
        landing_distance: last.x,
        fly_time: last.t,
    }
}

/// Scored hop replayed from a realized wheel speed and braking time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpOutcome {
    pub target: f64,
    pub omega_f: f64,
    pub delta_t: f64,
    /// `None` when the brake folded the launch angle below the ground.
    pub launch_angle_deg: Option<f64>,
    pub realized: f64,
    pub within_tolerance: bool,
    pub relative_error_pct: f64,
    pub over_braked: bool,
}

/// Replay a wheel speed and braking time into a hop scored against `target`.
///
/// A brake long enough to fold the launch angle past the ground is reported
/// as an over-braked outcome with zero distance rather than an error.
pub fn replay_realized(
    omega_f: f64,
    delta_t: f64,
    target: f64,
    cfg: &HopperConfig,
    env: &Environment,
) -> Result<JumpOutcome> {
    require_positive("target", target)?;
    let (angle, realized) = match launch_angle_for_brake_time(cfg, env, omega_f, delta_t) {
        Ok(angle) => {
            let launch = LaunchState::new(hop_velocity(cfg, omega_f), angle);
            (Some(angle), simulate_flight(&launch, env).landing_distance)
        }
        Err(Error::OverBraked { .. }) => (None, 0.0),
        Err(e) => return Err(e),
    };
    Ok(JumpOutcome {
        target,
        omega_f,
        delta_t,
        launch_angle_deg: angle,
        realized,
        within_tolerance: (realized - target).abs() <= TOLERANCE_FRACTION * target,
        relative_error_pct: relative_error(target, realized)?,
        over_braked: angle.is_none(),
    })
}

/// Replay a simulated (or measured) brake into a hop.
pub fn replay_brake(
    response: &BrakeResponse,
    target: f64,
    cfg: &HopperConfig,
    env: &Environment,
) -> Result<JumpOutcome> {
    require_positive("initial_omega", response.initial_omega)?;
    replay_realized(
        response.initial_omega,
        response.achieved_delta_t,
        target,
        cfg,
        env,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandingStats {
    pub target: f64,
    pub count: usize,
    pub mean_distance: f64,
    /// Population standard deviation.
    pub std_deviation: f64,
    /// Percent error of the mean against the target.
    pub relative_error_pct: f64,
}

/// Mean, spread and error of a batch of hops sharing one target.
pub fn aggregate(outcomes: &[JumpOutcome]) -> Result<LandingStats> {
    let first = outcomes.first().ok_or(Error::EmptyOutcomes)?;
    let n = outcomes.len() as f64;
    let mean = outcomes.iter().map(|o| o.realized).sum::<f64>() / n;
    let var = outcomes
        .iter()
        .map(|o| (o.realized - mean).powi(2))
        .sum::<f64>()
        / n;
    Ok(LandingStats {
        target: first.target,
        count: outcomes.len(),
        mean_distance: mean,
        std_deviation: var.sqrt(),
        relative_error_pct: relative_error(first.target, mean)?,
    })
}

/// CSV with header `target_m,mean_m,std_m,rel_err_pct`.
pub fn write_stats_csv<W: Write>(rows: &[LandingStats], writer: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["target_m", "mean_m", "std_m", "rel_err_pct"])?;
    for r in rows {
        w.write_record([
            r.target.to_string(),
            r.mean_distance.to_string(),
            r.std_deviation.to_string(),
            r.relative_error_pct.to_string(),
        ])?;
    }
    w.flush()
}

/// Per-hop CSV of replayed outcomes.
pub fn write_outcomes_csv<W: Write>(outcomes: &[JumpOutcome], writer: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "target_m",
        "omega_rad_s",
        "delta_t_s",
        "launch_angle_deg",
        "realized_m",
        "rel_err_pct",
        "within_tolerance",
    ])?;
    for o in outcomes {
        w.write_record([
            o.target.to_string(),
            o.omega_f.to_string(),
            o.delta_t.to_string(),
            o.launch_angle_deg
                .map_or_else(String::new, |a| a.to_string()),
            o.realized.to_string(),
            o.relative_error_pct.to_string(),
            o.within_tolerance.to_string(),
        ])?;
    }
    w.flush()
}
