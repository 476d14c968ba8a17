use std::io::Write;

use flyhop::ballistics::{simulate_flight, write_outcomes_csv, write_stats_csv, LandingStats};
use flyhop::campaign::HopRig;
use flyhop::control::simulate_brake;
use flyhop::planner::{plan_jump, plan_mission, sweep_brake_torque, JumpPlan, TorqueRange};
use flyhop::Error;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{sig4, OutputDir};

/// Distances of the planning grid (m).
pub const TABLE_DISTANCES: [f64; 6] = [5.0, 10.0, 30.0, 50.0, 70.0, 100.0];

/// Slopes of the full planning grid, -30° to 30° in 5° steps.
pub fn table_slopes() -> Vec<f64> {
    (-6..=6).map(|k| 5.0 * k as f64).collect()
}

fn rig(cfg: &RunConfig) -> Result<HopRig, CliError> {
    Ok(HopRig::new(
        &cfg.motor,
        cfg.hopper,
        &cfg.controller.design_spec(),
        cfg.controller.sample_time,
        cfg.controller.brake_settings(),
        cfg.perturbation,
        cfg.planner.options(),
    )?)
}

fn print_plan(p: &JumpPlan) {
    println!(
        "target distance   {} m on {} deg",
        sig4(p.target_distance),
        sig4(p.slope_deg)
    );
    println!("wheel speed       {} rad/s", sig4(p.omega_f));
    match p.brake_torque {
        Some(tau) => println!(
            "braking time      {} s (mean torque {} N·m)",
            sig4(p.delta_t),
            sig4(tau)
        ),
        None => println!("braking time      0 s (instant brake)"),
    }
    println!(
        "launch            {} cm/s at {} deg",
        sig4(100.0 * p.launch_speed),
        sig4(p.launch_angle_deg)
    );
    println!("spin-up time      {} s", sig4(p.speedup_time));
    println!("fly time          {} s", sig4(p.fly_time));
}

pub fn plan(
    cfg: &RunConfig,
    out: &OutputDir,
    distance: f64,
    beta: Option<f64>,
) -> Result<(), CliError> {
    let env = cfg.environment_with_slope(beta);
    let p = plan_jump(distance, &cfg.hopper, &env, &cfg.planner.options())?;
    print_plan(&p);
    out.write_json("plan.json", &p)?;
    let flight = simulate_flight(&p.launch(), &env);
    out.write("trajectory.csv", |w| flight.write_csv(w))?;
    Ok(())
}

#[derive(Serialize)]
struct BrakeSummary {
    controller: flyhop::control::DesignSummary,
    initial_omega: f64,
    target_delta_t: f64,
    achieved_delta_t: f64,
    final_omega: f64,
    samples: usize,
}

pub fn brake(cfg: &RunConfig, out: &OutputDir, omega: f64, delta_t: f64) -> Result<(), CliError> {
    let rig = rig(cfg)?;
    let r = simulate_brake(
        &rig.model,
        &rig.controller.gains,
        omega,
        delta_t,
        &rig.brake,
    )?;
    let summary = BrakeSummary {
        controller: rig.controller.summary(),
        initial_omega: omega,
        target_delta_t: delta_t,
        achieved_delta_t: r.achieved_delta_t,
        final_omega: r.final_omega(),
        samples: r.times.len(),
    };
    let k = summary.controller.feedback_k;
    println!(
        "controller        K = [{}, {}], G = {}",
        sig4(k[0]),
        sig4(k[1]),
        sig4(summary.controller.feedforward_g)
    );
    println!(
        "demanded          {} rad/s to rest in {} s",
        sig4(omega),
        sig4(delta_t)
    );
    println!("achieved braking  {} s", sig4(r.achieved_delta_t));
    println!("final speed       {} rad/s", sig4(r.final_omega()));
    out.write("brake.csv", |w| r.write_csv(w))?;
    out.write_json("brake_summary.json", &summary)?;
    Ok(())
}

fn print_stats(s: &LandingStats) {
    println!(
        "target {} m: mean {} m, std {} m, error {} % over {} hops",
        sig4(s.target),
        sig4(s.mean_distance),
        sig4(s.std_deviation),
        sig4(s.relative_error_pct),
        s.count
    );
}

pub fn jump(
    cfg: &RunConfig,
    out: &OutputDir,
    distance: f64,
    beta: Option<f64>,
    reps: usize,
) -> Result<(), CliError> {
    let env = cfg.environment_with_slope(beta);
    let rig = rig(cfg)?;
    let p = plan_jump(distance, &cfg.hopper, &env, &rig.plan)?;
    let (outcomes, stats) = rig.monte_carlo(&p, &env, reps, cfg.seed)?;
    print_stats(&stats);
    let hits = outcomes.iter().filter(|o| o.within_tolerance).count();
    println!("within 10 % ring  {hits}/{}", outcomes.len());
    out.write_json("plan.json", &p)?;
    out.write("jump_outcomes.csv", |w| write_outcomes_csv(&outcomes, w))?;
    out.write("jump_stats.csv", |w| write_stats_csv(&[stats], w))?;
    Ok(())
}

pub fn sweep(
    cfg: &RunConfig,
    out: &OutputDir,
    omega: f64,
    beta: Option<f64>,
    range: &TorqueRange,
) -> Result<(), CliError> {
    let env = cfg.environment_with_slope(beta);
    let table = sweep_brake_torque(&cfg.hopper, &env, omega, range)?;
    let best = table.best();
    println!(
        "longest hop       {} m at {} N·m, launch angle {} deg",
        sig4(best.distance),
        sig4(best.tau),
        sig4(best.theta_deg)
    );
    out.write("sweep.csv", |w| table.write_csv(w))?;
    out.write_json(
        "sweep_argmax.json",
        &serde_json::json!({
            "omega_f": omega,
            "slope_deg": env.slope_deg,
            "index": table.argmax,
            "tau_Nm": best.tau,
            "theta_deg": best.theta_deg,
            "d_m": best.distance,
        }),
    )?;
    Ok(())
}

pub fn mission(
    cfg: &RunConfig,
    out: &OutputDir,
    total: f64,
    tolerance: f64,
    beta: Option<f64>,
    max_hop: Option<f64>,
    replan: bool,
) -> Result<(), CliError> {
    let env = cfg.environment_with_slope(beta);
    let rig = rig(cfg)?;
    let max_hop = max_hop.unwrap_or(cfg.planner.max_hop);
    let mut plan = plan_mission(total, tolerance, &cfg.hopper, &env, max_hop, &rig.plan)?;
    plan.replan_after_each_landing = replan;
    for w in &plan.warnings {
        log::warn!("{w}");
    }
    let (report, outcomes) = rig.run_mission(&plan, &env, cfg.seed)?;
    for (k, hop) in report.hops.iter().enumerate() {
        println!(
            "hop {:>2}  target {:>7} m  {}  landed {:>7} m  at {} m",
            k + 1,
            sig4(hop.target),
            if hop.direction > 0.0 { "fwd " } else { "back" },
            sig4(hop.realized),
            sig4(hop.position)
        );
    }
    println!(
        "total             {} m of {} m, error {} % ({})",
        sig4(report.final_position),
        sig4(total),
        sig4(report.error_pct),
        if report.within_tolerance {
            "within tolerance"
        } else {
            "outside tolerance"
        }
    );
    out.write_json(
        "mission.json",
        &serde_json::json!({ "plan": plan, "report": report, "outcomes": outcomes }),
    )?;
    out.write("mission_hops.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["hop", "target_m", "direction", "realized_m", "position_m"])?;
        for (k, h) in report.hops.iter().enumerate() {
            c.write_record([
                (k + 1).to_string(),
                h.target.to_string(),
                h.direction.to_string(),
                h.realized.to_string(),
                h.position.to_string(),
            ])?;
        }
        c.flush()
    })?;
    Ok(())
}

fn status(result: &Result<JumpPlan, Error>) -> &'static str {
    match result {
        Ok(_) => "ok",
        Err(Error::EscapeViolation { .. }) => "escape_violation",
        Err(Error::DegenerateSlope { .. }) => "degenerate_slope",
        Err(_) => "invalid",
    }
}

pub fn tables(
    cfg: &RunConfig,
    out: &OutputDir,
    beta: Option<f64>,
    stats: bool,
    reps: usize,
) -> Result<(), CliError> {
    let slopes = beta.map_or_else(table_slopes, |b| vec![b]);
    let opts = cfg.planner.options();
    let mut rows = Vec::new();
    for &slope in &slopes {
        let env = cfg.environment.with_slope(slope);
        for d in TABLE_DISTANCES {
            rows.push((slope, d, plan_jump(d, &cfg.hopper, &env, &opts)));
        }
    }
    out.write("table_plans.csv", |w| {
        let mut c = csv::Writer::from_writer(w);
        c.write_record([
            "beta_deg",
            "d_m",
            "omega_rad_s",
            "speedup_s",
            "delta_t_s",
            "launch_speed_cm_s",
            "launch_angle_deg",
            "fly_time_s",
            "status",
        ])?;
        for (slope, d, result) in &rows {
            let mut record = vec![slope.to_string(), d.to_string()];
            match result {
                Ok(p) => record.extend(
                    [
                        p.omega_f,
                        p.speedup_time,
                        p.delta_t,
                        100.0 * p.launch_speed,
                        p.launch_angle_deg,
                        p.fly_time,
                    ]
                    .map(|v| v.to_string()),
                ),
                Err(_) => record.extend(std::iter::repeat(String::new()).take(6)),
            }
            record.push(status(result).to_string());
            c.write_record(&record)?;
        }
        c.flush()
    })?;
    let ok = rows.iter().filter(|r| r.2.is_ok()).count();
    println!(
        "planning grid     {} rows ({ok} feasible) over {} slopes",
        rows.len(),
        slopes.len()
    );

    if stats {
        let rig = rig(cfg)?;
        for &slope in &slopes {
            let env = cfg.environment.with_slope(slope);
            let mut batch = Vec::new();
            for (_, _, plan) in rows.iter().filter(|r| r.0 == slope) {
                if let Ok(p) = plan {
                    batch.push(rig.monte_carlo(p, &env, reps, cfg.seed)?.1);
                }
            }
            println!("slope {} deg", sig4(slope));
            batch.iter().for_each(print_stats);
            out.write(&format!("table_stats_beta_{slope}.csv"), |w| {
                write_stats_csv(&batch, w)
            })?;
        }
    }
    std::io::stdout().flush().ok();
    Ok(())
}
