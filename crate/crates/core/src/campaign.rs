//! End-to-end hop campaigns: plan, closed-loop brake with hardware spread,
//! replay into a flight, and aggregate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ballistics::{aggregate, replay_realized, JumpOutcome, LandingStats};
use crate::control::{
    design, simulate_brake, BrakeSettings, ControllerDesign, DesignSpec, Perturbation,
    PerturbationDraw,
};
use crate::error::Result;
use crate::hopdyn::{Environment, HopperConfig};
use crate::motor::{build_continuous, discretize, LinearStateModel, MotorParams};
use crate::planner::{JumpPlan, MissionPlan, MissionReport, PlanOptions};

/// Everything needed to turn a plan into a simulated hop.
#[derive(Debug, Clone)]
pub struct HopRig {
    pub hopper: HopperConfig,
    pub model: LinearStateModel,
    pub controller: ControllerDesign,
    pub brake: BrakeSettings,
    pub perturbation: Perturbation,
    pub plan: PlanOptions,
}

impl HopRig {
    /// Discretise the motor at `sample_time` and design its brake controller.
    pub fn new(
        motor: &MotorParams,
        hopper: HopperConfig,
        spec: &DesignSpec,
        sample_time: f64,
        brake: BrakeSettings,
        perturbation: Perturbation,
        plan: PlanOptions,
    ) -> Result<Self> {
        hopper.validate()?;
        let model = discretize(&build_continuous(motor)?, sample_time)?;
        let controller = design(&model, spec)?;
        Ok(Self {
            hopper,
            model,
            controller,
            brake,
            perturbation,
            plan,
        })
    }

    /// Fly one hop of `plan`.
    ///
    /// The wheel speed spread is applied before braking; the braking-time
    /// spread is added to the simulated stop time, floored at zero.
    pub fn fly(
        &self,
        plan: &JumpPlan,
        env: &Environment,
        draw: PerturbationDraw,
    ) -> Result<JumpOutcome> {
        let omega = plan.omega_f * draw.omega_factor;
        let response = simulate_brake(
            &self.model,
            &self.controller.gains,
            omega,
            plan.delta_t,
            &self.brake,
        )?;
        let delta_t = (response.achieved_delta_t + draw.delta_t_offset).max(0.0);
        replay_realized(omega, delta_t, plan.target_distance, &self.hopper, env)
    }

    /// `reps` independent perturbed hops of the same plan.
    ///
    /// Repetition `k` draws from stream `k` of a generator seeded with `seed`,
    /// so results do not depend on thread scheduling.
    pub fn monte_carlo(
        &self,
        plan: &JumpPlan,
        env: &Environment,
        reps: usize,
        seed: u64,
    ) -> Result<(Vec<JumpOutcome>, LandingStats)> {
        let outcomes = (0..reps as u64)
            .into_par_iter()
            .map(|k| self.fly(plan, env, self.perturbation.draw(&mut stream(seed, k))))
            .collect::<Result<Vec<_>>>()?;
        let stats = aggregate(&outcomes)?;
        Ok((outcomes, stats))
    }

    /// Execute a mission with perturbed hops; hop `k` uses stream `k`.
    pub fn run_mission(
        &self,
        mission: &MissionPlan,
        env: &Environment,
        seed: u64,
    ) -> Result<(MissionReport, Vec<JumpOutcome>)> {
        let mut outcomes = Vec::new();
        let report = mission.execute(&self.hopper, env, &self.plan, |plan, hop_env| {
            let draw = self
                .perturbation
                .draw(&mut stream(seed, outcomes.len() as u64));
            let outcome = self.fly(plan, hop_env, draw)?;
            outcomes.push(outcome);
            Ok(outcome.realized)
        })?;
        Ok((report, outcomes))
    }
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
