//! DC motor with a flywheel load: continuous state-space model, transfer
//! function and its zero-order-hold discrete equivalent.
//!
//! State is `x = [omega, current]`, the single input is the armature voltage and
//! the output is the shaft speed.

use nalgebra::{Matrix2, RowVector2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::expm;

/// Electrical and mechanical constants of the flywheel motor, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotorParams {
    /// Rotor plus flywheel inertia (kg·m²).
    #[serde(rename = "inertia_J")]
    pub inertia: f64,
    /// Viscous friction (N·m·s).
    #[serde(rename = "friction_b")]
    pub friction: f64,
    /// Back-EMF / torque constant (V·s/rad = N·m/A).
    #[serde(rename = "emf_K")]
    pub emf: f64,
    /// Winding inductance (H).
    #[serde(rename = "inductance_L")]
    pub inductance: f64,
    /// Winding resistance (Ω).
    #[serde(rename = "resistance_R")]
    pub resistance: f64,
}

impl MotorParams {
    /// Constants identified for the prototype's 24 V motor and aluminium flywheel.
    pub const PROTOTYPE: MotorParams = MotorParams {
        inertia: 3.42e-5,
        friction: 2.20e-5,
        emf: 47.96e-3,
        inductance: 7.75e-3,
        resistance: 11.36,
    };

    pub fn validate(&self) -> Result<()> {
        require_positive("inertia_J", self.inertia)?;
        require_positive("friction_b", self.friction)?;
        require_positive("emf_K", self.emf)?;
        require_positive("inductance_L", self.inductance)?;
        require_positive("resistance_R", self.resistance)?;
        Ok(())
    }

    /// Steady-state speed per volt, `K / (R·b + K²)`.
    pub fn dc_gain(&self) -> f64 {
        self.emf / (self.resistance * self.friction + self.emf * self.emf)
    }
}

impl Default for MotorParams {
    fn default() -> Self {
        Self::PROTOTYPE
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeDomain {
    Continuous,
    Discrete { sample_time: f64 },
}

/// Two-state, single-input, single-output linear model.
///
/// For a continuous model the matrices are `(A, B, C)`; for a discrete one they
/// are `(Φ, Γ, H)` and `domain` carries the sample period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearStateModel {
    pub domain: TimeDomain,
    pub system: Matrix2<f64>,
    pub input: Vector2<f64>,
    pub output: RowVector2<f64>,
}

impl LinearStateModel {
    pub fn is_discrete(&self) -> bool {
        matches!(self.domain, TimeDomain::Discrete { .. })
    }

    pub fn sample_time(&self) -> Option<f64> {
        match self.domain {
            TimeDomain::Continuous => None,
            TimeDomain::Discrete { sample_time } => Some(sample_time),
        }
    }

    pub fn eigenvalues(&self) -> [Complex64; 2] {
        expm::eigenvalues(&self.system)
    }

    /// Spectral radius of the system matrix.
    pub fn spectral_radius(&self) -> f64 {
        let [a, b] = self.eigenvalues();
        a.norm().max(b.norm())
    }

    /// Equilibrium state whose output equals `output` under a constant input.
    ///
    /// Returns `None` when the model has no such equilibrium (integrator or
    /// zero DC gain).
    pub fn equilibrium_for_output(&self, output: f64) -> Option<Vector2<f64>> {
        // Continuous: 0 = A x + B u. Discrete: x = Φ x + Γ u.
        let lhs = match self.domain {
            TimeDomain::Continuous => -self.system,
            TimeDomain::Discrete { .. } => Matrix2::identity() - self.system,
        };
        let per_unit_input = lhs.try_inverse()? * self.input;
        let gain = (self.output * per_unit_input)[0];
        if gain == 0.0 || !gain.is_finite() {
            return None;
        }
        Some(per_unit_input * (output / gain))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MotorState {
    /// Shaft speed (rad/s).
    pub omega: f64,
    /// Armature current (A).
    pub current: f64,
}

impl MotorState {
    pub fn new(omega: f64, current: f64) -> Self {
        Self { omega, current }
    }

    pub fn as_vector(&self) -> Vector2<f64> {
        Vector2::new(self.omega, self.current)
    }

    pub fn from_vector(v: &Vector2<f64>) -> Self {
        Self::new(v[0], v[1])
    }
}

/// Continuous model `ẋ = A x + B v`, `y = C x`.
pub fn build_continuous(params: &MotorParams) -> Result<LinearStateModel> {
    params.validate()?;
    Ok(continuous_unchecked(params))
}

fn continuous_unchecked(p: &MotorParams) -> LinearStateModel {
    let MotorParams {
        inertia: j,
        friction: b,
        emf: k,
        inductance: l,
        resistance: r,
    } = *p;
    LinearStateModel {
        domain: TimeDomain::Continuous,
        system: Matrix2::new(-b / j, k / j, -k / l, -r / l),
        input: Vector2::new(0.0, 1.0 / l),
        output: RowVector2::new(1.0, 0.0),
    }
}

/// Speed-per-voltage transfer function `K / ((R + L s)(J s + b) + K²)`.
///
/// Coefficients are stored in descending powers of `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferFunction {
    pub numerator: f64,
    pub denominator: [f64; 3],
}

impl TransferFunction {
    pub fn dc_gain(&self) -> f64 {
        self.numerator / self.denominator[2]
    }

    /// Roots of the denominator polynomial.
    pub fn poles(&self) -> [Complex64; 2] {
        let [a, b, c] = self.denominator;
        // Companion matrix of s² + (b/a) s + c/a.
        expm::eigenvalues(&Matrix2::new(0.0, 1.0, -c / a, -b / a))
    }
}

pub fn transfer_function(params: &MotorParams) -> Result<TransferFunction> {
    if params.emf == 0.0 {
        // Decoupled motor: no path from voltage to speed.
        require_positive("inertia_J", params.inertia)?;
        require_positive("inductance_L", params.inductance)?;
    } else {
        params.validate()?;
    }
    let MotorParams {
        inertia: j,
        friction: b,
        emf: k,
        inductance: l,
        resistance: r,
    } = *params;
    Ok(TransferFunction {
        numerator: k,
        denominator: [l * j, l * b + r * j, r * b + k * k],
    })
}

/// Zero-order-hold discretisation at `sample_time`.
pub fn discretize(model: &LinearStateModel, sample_time: f64) -> Result<LinearStateModel> {
    if model.is_discrete() {
        return Err(Error::InvalidParameter {
            name: "model",
            value: model.sample_time().unwrap_or(f64::NAN),
            reason: "already discrete",
        });
    }
    require_positive("sample_time", sample_time)?;
    if !(model.system.iter().all(|v| v.is_finite()) && model.input.iter().all(|v| v.is_finite())) {
        return Err(Error::Numeric("non-finite continuous model".into()));
    }
    let (phi, gamma) = expm::zoh(&model.system, &model.input, sample_time);
    if !(phi.iter().all(|v| v.is_finite()) && gamma.iter().all(|v| v.is_finite())) {
        return Err(Error::Numeric(format!(
            "matrix exponential overflowed at T_s = {sample_time}"
        )));
    }
    Ok(LinearStateModel {
        domain: TimeDomain::Discrete { sample_time },
        system: phi,
        input: gamma,
        output: model.output,
    })
}

/// Largest RK4 substep, as a fraction of the fastest time constant.
const RK4_STEP_FRACTION: f64 = 0.02;

/// Advance the continuous model by `dt` with the voltage held constant.
///
/// Classic RK4, subdivided so each substep stays well inside the stability
/// region of the fast electrical pole.
pub fn step_continuous(
    model: &LinearStateModel,
    state: MotorState,
    voltage: f64,
    dt: f64,
) -> MotorState {
    debug_assert!(
        !model.is_discrete(),
        "step_continuous needs a continuous model"
    );
    if dt <= 0.0 {
        return state;
    }
    let a = model.system;
    let bu = model.input * voltage;
    let rate = a.norm().max(f64::MIN_POSITIVE);
    let substeps = ((dt * rate / RK4_STEP_FRACTION).ceil() as usize).max(1);
    let h = dt / substeps as f64;

    let f = |x: &Vector2<f64>| a * x + bu;
    let mut x = state.as_vector();
    for _ in 0..substeps {
        let k1 = f(&x);
        let k2 = f(&(x + k1 * (h / 2.0)));
        let k3 = f(&(x + k2 * (h / 2.0)));
        let k4 = f(&(x + k3 * h));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    MotorState::from_vector(&x)
}
