//! State-feedback braking controller for the flywheel motor.
//!
//! The design places the closed-loop poles with Ackermann's formula, adds a
//! reference feedforward gain for unit DC gain, and runs the loop at the
//! discrete sample time to brake the wheel by voltage inversion.

use std::io::Write;

use nalgebra::{Matrix2, RowVector2, Vector2};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::motor::{LinearStateModel, MotorParams, TimeDomain};

/// Overshoot (percent) at or below which the design is taken as critically damped.
pub const CRITICAL_OVERSHOOT_PCT: f64 = 0.1;

/// Step-response targets for the closed loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    /// Percent overshoot, in `[0, 100)`.
    pub overshoot_pct: f64,
    /// 2 % settling time (s).
    pub settling_time: f64,
}

impl DesignSpec {
    pub fn validate(&self) -> Result<()> {
        require_non_negative("overshoot_pct", self.overshoot_pct)?;
        if self.overshoot_pct >= 100.0 {
            return Err(Error::InvalidParameter {
                name: "overshoot_pct",
                value: self.overshoot_pct,
                reason: "must be below 100 %",
            });
        }
        require_positive("settling_time", self.settling_time)?;
        Ok(())
    }

    pub fn damping_ratio(&self) -> f64 {
        if self.overshoot_pct <= CRITICAL_OVERSHOOT_PCT {
            return 1.0;
        }
        let ln_os = (self.overshoot_pct / 100.0).ln();
        -ln_os / (std::f64::consts::PI.powi(2) + ln_os * ln_os).sqrt()
    }
}

impl Default for DesignSpec {
    /// No overshoot and a 0.1 s settling time, so the wheel never reverses.
    fn default() -> Self {
        Self {
            overshoot_pct: 0.0,
            settling_time: 0.1,
        }
    }
}

/// Dominant second-order poles for `spec`, in the s-plane.
pub fn poles_from_spec(spec: &DesignSpec) -> Result<[Complex64; 2]> {
    spec.validate()?;
    let zeta = spec.damping_ratio();
    let wn = 4.0 / (zeta * spec.settling_time);
    let re = -zeta * wn;
    let disc = zeta * zeta - 1.0;
    Ok(if disc >= 0.0 {
        let q = wn * disc.sqrt();
        [Complex64::new(re + q, 0.0), Complex64::new(re - q, 0.0)]
    } else {
        let q = wn * (-disc).sqrt();
        [Complex64::new(re, q), Complex64::new(re, -q)]
    })
}

/// Feedback and feedforward gains of `u = -K·x + G·r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerGains {
    pub feedback: RowVector2<f64>,
    pub feedforward: f64,
    pub domain: TimeDomain,
}

impl ControllerGains {
    pub fn closed_loop(&self, model: &LinearStateModel) -> Matrix2<f64> {
        model.system - model.input * self.feedback
    }

    /// Command before saturation.
    pub fn command(&self, state: &Vector2<f64>, reference: f64) -> f64 {
        -(self.feedback * state)[0] + self.feedforward * reference
    }
}

/// Characteristic polynomial `s² + c1·s + c0` of a real or conjugate pole pair.
fn characteristic(poles: &[Complex64; 2]) -> Result<(f64, f64)> {
    let sum = poles[0] + poles[1];
    let prod = poles[0] * poles[1];
    let scale = poles[0].norm().max(poles[1].norm()).max(1.0);
    if sum.im.abs() > 1e-12 * scale || prod.im.abs() > 1e-12 * scale * scale {
        return Err(Error::InvalidParameter {
            name: "desired_poles",
            value: poles[0].im,
            reason: "must be real or a complex-conjugate pair",
        });
    }
    Ok((-sum.re, prod.re))
}

/// Map s-plane poles to the z-plane of `model`; continuous models pass through.
pub fn map_poles(model: &LinearStateModel, poles: &[Complex64; 2]) -> [Complex64; 2] {
    match model.domain {
        TimeDomain::Continuous => *poles,
        TimeDomain::Discrete { sample_time } => poles.map(|s| (s * sample_time).exp()),
    }
}

/// Ackermann's formula: feedback row `K` placing the eigenvalues of `A − B·K`.
///
/// `desired_poles` are s-plane poles. For a discrete model they are mapped
/// through `z = exp(s·T_s)` first.
pub fn ackermann(
    model: &LinearStateModel,
    desired_poles: &[Complex64; 2],
) -> Result<RowVector2<f64>> {
    let targets = map_poles(model, desired_poles);
    let (c1, c0) = characteristic(&targets)?;
    let a = model.system;
    let b = model.input;
    let ab = a * b;
    let ctrb = Matrix2::from_columns(&[b, ab]);
    let det = ctrb.determinant();
    if !(det.abs() > 1e-12 * b.norm() * ab.norm()) {
        return Err(Error::Uncontrollable);
    }
    let inv = ctrb.try_inverse().ok_or(Error::Uncontrollable)?;
    let char_of_a = a * a + a * c1 + Matrix2::identity() * c0;
    Ok(RowVector2::new(0.0, 1.0) * inv * char_of_a)
}

/// Reference gain `G` giving unit DC gain from `r` to the output.
pub fn feedforward_gain(model: &LinearStateModel, feedback: &RowVector2<f64>) -> Result<f64> {
    let bk = model.input * feedback;
    let m = match model.domain {
        TimeDomain::Continuous => -model.system + bk,
        TimeDomain::Discrete { .. } => Matrix2::identity() - model.system + bk,
    };
    let inv = m
        .try_inverse()
        .ok_or(Error::DegenerateDesign("closed loop has a pole at DC"))?;
    let dc = (model.output * inv * model.input)[0];
    if dc == 0.0 || !dc.is_finite() {
        return Err(Error::DegenerateDesign("closed loop has zero DC gain"));
    }
    Ok(1.0 / dc)
}

/// Serializable pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Pole {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

/// Outcome of a full controller design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerDesign {
    pub spec: DesignSpec,
    pub gains: ControllerGains,
    /// Requested poles in the s-plane.
    pub continuous_poles: [Complex64; 2],
    /// Achieved eigenvalues of the closed-loop matrix in the model's own domain.
    pub closed_loop_poles: [Complex64; 2],
}

/// Structured summary of a design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSummary {
    pub feedback_k: [f64; 2],
    pub feedforward_g: f64,
    pub continuous_poles: [Pole; 2],
    pub closed_loop_poles: [Pole; 2],
    pub sample_time: Option<f64>,
    pub overshoot_pct: f64,
    pub settling_time: f64,
}

impl ControllerDesign {
    pub fn summary(&self) -> DesignSummary {
        DesignSummary {
            feedback_k: [self.gains.feedback[0], self.gains.feedback[1]],
            feedforward_g: self.gains.feedforward,
            continuous_poles: self.continuous_poles.map(Pole::from),
            closed_loop_poles: self.closed_loop_poles.map(Pole::from),
            sample_time: match self.gains.domain {
                TimeDomain::Continuous => None,
                TimeDomain::Discrete { sample_time } => Some(sample_time),
            },
            overshoot_pct: self.spec.overshoot_pct,
            settling_time: self.spec.settling_time,
        }
    }
}

/// Pole placement plus feedforward for `model`, checked for closed-loop stability.
pub fn design(model: &LinearStateModel, spec: &DesignSpec) -> Result<ControllerDesign> {
    let continuous_poles = poles_from_spec(spec)?;
    let feedback = ackermann(model, &continuous_poles)?;
    let feedforward = feedforward_gain(model, &feedback)?;
    let gains = ControllerGains {
        feedback,
        feedforward,
        domain: model.domain,
    };
    let closed_loop_poles = crate::expm::eigenvalues(&gains.closed_loop(model));
    let stable = closed_loop_poles.iter().all(|p| match model.domain {
        TimeDomain::Continuous => p.re < 0.0,
        TimeDomain::Discrete { .. } => p.norm() < 1.0,
    });
    if !stable {
        return Err(Error::DegenerateDesign("closed loop is not stable"));
    }
    Ok(ControllerDesign {
        spec: *spec,
        gains,
        continuous_poles,
        closed_loop_poles,
    })
}

/// Actuator and stop-detection settings for a braking run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrakeSettings {
    /// Symmetric voltage limit (V).
    pub supply_voltage: f64,
    /// Speed below which the wheel counts as stopped (rad/s).
    pub stop_threshold: f64,
    /// Consecutive samples below the threshold needed to declare a stop.
    pub dwell_samples: usize,
}

impl Default for BrakeSettings {
    fn default() -> Self {
        Self {
            supply_voltage: 24.0,
            stop_threshold: 1.0,
            dwell_samples: 50,
        }
    }
}

/// Sampled closed-loop braking run.
#[derive(Debug, Clone, PartialEq)]
pub struct BrakeResponse {
    /// Sample times (s), uniform at the controller period.
    pub times: Vec<f64>,
    pub omega: Vec<f64>,
    pub current: Vec<f64>,
    /// Saturated command applied over each sample period (V).
    pub voltage: Vec<f64>,
    pub initial_omega: f64,
    pub target_delta_t: f64,
    /// Time after which `|omega|` stays below the stop threshold (s).
    pub achieved_delta_t: f64,
}

impl BrakeResponse {
    pub fn final_omega(&self) -> f64 {
        self.omega.last().copied().unwrap_or(0.0)
    }

    /// CSV with header `time_s,omega_rad_s,voltage_V`.
    pub fn write_csv<W: Write>(&self, writer: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["time_s", "omega_rad_s", "voltage_V"])?;
        for ((t, omega), v) in self.times.iter().zip(&self.omega).zip(&self.voltage) {
            w.write_record([t.to_string(), omega.to_string(), v.to_string()])?;
        }
        w.flush()
    }
}

/// Ramp reference from `initial_omega` down to zero over `delta_t`, or a step
/// to zero when `delta_t` is zero.
pub fn ramp_reference(initial_omega: f64, delta_t: f64, t: f64) -> f64 {
    if delta_t <= 0.0 {
        0.0
    } else {
        initial_omega * (1.0 - t / delta_t).max(0.0)
    }
}

/// Closed-loop voltage-inversion brake of the flywheel from `initial_omega`.
///
/// The wheel starts at the equilibrium of the held-voltage model. The loop
/// tracks [`ramp_reference`] with the command clipped to the supply, and stops
/// once the speed has stayed under the threshold for the dwell count.
pub fn simulate_brake(
    model: &LinearStateModel,
    gains: &ControllerGains,
    initial_omega: f64,
    target_delta_t: f64,
    settings: &BrakeSettings,
) -> Result<BrakeResponse> {
    let ts = model.sample_time().ok_or(Error::InvalidParameter {
        name: "model",
        value: f64::NAN,
        reason: "braking runs on the discrete model",
    })?;
    require_non_negative("initial_omega", initial_omega)?;
    require_non_negative("target_delta_t", target_delta_t)?;
    require_positive("supply_voltage", settings.supply_voltage)?;
    require_positive("stop_threshold", settings.stop_threshold)?;

    if initial_omega == 0.0 {
        return Ok(BrakeResponse {
            times: vec![0.0],
            omega: vec![0.0],
            current: vec![0.0],
            voltage: vec![0.0],
            initial_omega,
            target_delta_t,
            achieved_delta_t: 0.0,
        });
    }

    let mut x = model
        .equilibrium_for_output(initial_omega)
        .ok_or_else(|| Error::Numeric("model has no speed equilibrium".into()))?;
    let limit = 10.0 * target_delta_t.max(1.0);
    let max_samples = (limit / ts).ceil() as usize + 1;
    let dwell = settings.dwell_samples.max(1);
    let vmax = settings.supply_voltage;

    let capacity = ((target_delta_t + 1.0) / ts) as usize;
    let mut response = BrakeResponse {
        times: Vec::with_capacity(capacity),
        omega: Vec::with_capacity(capacity),
        current: Vec::with_capacity(capacity),
        voltage: Vec::with_capacity(capacity),
        initial_omega,
        target_delta_t,
        achieved_delta_t: f64::NAN,
    };

    let mut run = 0usize;
    let mut run_start = 0.0;
    for k in 0..max_samples {
        let t = k as f64 * ts;
        let reference = ramp_reference(initial_omega, target_delta_t, t);
        let u = gains.command(&x, reference).clamp(-vmax, vmax);
        response.times.push(t);
        response.omega.push(x[0]);
        response.current.push(x[1]);
        response.voltage.push(u);

        if x[0].abs() < settings.stop_threshold {
            if run == 0 {
                run_start = t;
            }
            run += 1;
            if run >= dwell {
                response.achieved_delta_t = run_start;
                return Ok(response);
            }
        } else {
            run = 0;
        }
        x = model.system * x + model.input * u;
    }
    Err(Error::NonConvergence {
        threshold: settings.stop_threshold,
        limit,
    })
}

/// Shortest stop from `omega` under full reverse voltage with the inductance
/// neglected: `J/c · ln(1 + c·ω/a)`, `a = K·V/R`, `c = K²/R + b`.
pub fn saturated_stop_time(params: &MotorParams, omega: f64, supply_voltage: f64) -> f64 {
    let a = params.emf * supply_voltage / params.resistance;
    let c = params.emf * params.emf / params.resistance + params.friction;
    params.inertia / c * (c * omega / a).ln_1p()
}

/// Percent error `|expected − actual| / |expected| · 100`.
pub fn relative_error(expected: f64, actual: f64) -> Result<f64> {
    if expected == 0.0 {
        return Err(Error::UndefinedRelativeError);
    }
    Ok((expected - actual).abs() / expected.abs() * 100.0)
}

/// Uniform hardware-spread model applied to brake replays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    /// Half-width of the relative spread of the spun-up wheel speed.
    pub omega_rel: f64,
    /// Half-width of the absolute spread of the braking time (s).
    pub delta_t_abs: f64,
}

impl Perturbation {
    pub const NONE: Perturbation = Perturbation {
        omega_rel: 0.0,
        delta_t_abs: 0.0,
    };

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> PerturbationDraw {
        let omega_factor = if self.omega_rel > 0.0 {
            1.0 + rng.random_range(-self.omega_rel..=self.omega_rel)
        } else {
            1.0
        };
        let delta_t_offset = if self.delta_t_abs > 0.0 {
            rng.random_range(-self.delta_t_abs..=self.delta_t_abs)
        } else {
            0.0
        };
        PerturbationDraw {
            omega_factor,
            delta_t_offset,
        }
    }
}

impl Default for Perturbation {
    /// Largest speed and braking-time deviations measured on the bench for
    /// ramped brakes in the motor's well-behaved range (150–350 rad/s).
    fn default() -> Self {
        Self {
            omega_rel: 0.0425,
            delta_t_abs: 0.06,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationDraw {
    pub omega_factor: f64,
    pub delta_t_offset: f64,
}

impl PerturbationDraw {
    pub const IDENTITY: PerturbationDraw = PerturbationDraw {
        omega_factor: 1.0,
        delta_t_offset: 0.0,
    };
}
