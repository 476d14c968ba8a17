//! Planning and simulation for flywheel-actuated hopping rovers on small
//! bodies.
//!
//! - [`motor`]: DC motor + flywheel state-space model and its ZOH equivalent.
//! - [`control`]: pole-placement braking controller and closed-loop braking.
//! - [`hopdyn`]: leverage and launch physics of the cubic hopper.
//! - [`planner`]: inverse maneuver design, escape guard, multi-hop missions.
//! - [`ballistics`]: flight integration, brake replays, landing statistics.
//! - [`campaign`]: end-to-end plan → brake → flight pipelines.

pub mod ballistics;
pub mod campaign;
pub mod control;
pub mod error;
pub mod expm;
pub mod hopdyn;
pub mod motor;
pub mod planner;

pub use error::{Error, Result};
