use thiserror::Error;

/// Errors raised by the modelling, design and planning routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {value} ({reason})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("system is not controllable (controllability matrix is singular)")]
    Uncontrollable,

    #[error("degenerate controller design: {0}")]
    DegenerateDesign(&'static str),

    #[error("braking did not settle below {threshold} rad/s within {limit} s")]
    NonConvergence { threshold: f64, limit: f64 },

    #[error("invalid hopper geometry: alpha + beta = {angle_deg} deg")]
    InvalidGeometry { angle_deg: f64 },

    #[error("launch angle {angle_deg} deg is outside (0, 90) deg, no ballistic hop")]
    NonBallistic { angle_deg: f64 },

    #[error("over-braked: deflection {deflection_deg} deg >= available {available_deg} deg")]
    OverBraked {
        deflection_deg: f64,
        available_deg: f64,
    },

    #[error("no flywheel speed reaches the target: alpha + beta = {angle_deg} deg")]
    NoSolution { angle_deg: f64 },

    #[error(
        "launch speed {launch_speed} m/s exceeds the safe limit {limit} m/s; \
         max safe distance is {max_safe_distance} m"
    )]
    EscapeViolation {
        launch_speed: f64,
        limit: f64,
        max_safe_distance: f64,
    },

    #[error("degenerate slope: beta = {beta_deg} deg <= -alpha")]
    DegenerateSlope { beta_deg: f64 },

    #[error("relative error undefined for an expected value of zero")]
    UndefinedRelativeError,

    #[error("no outcomes to aggregate")]
    EmptyOutcomes,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and strictly positive",
        })
    }
}

pub(crate) fn require_non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and non-negative",
        })
    }
}
