mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use flyhop::planner::TorqueRange;

use crate::config::{RunConfig, CONFIG_ENV};
use crate::error::CliError;
use crate::output::OutputDir;

/// Plan, brake and fly hops of a flywheel-driven hopping rover.
#[derive(Debug, Parser)]
#[command(name = "flyhop", version)]
struct Cli {
    /// Scenario file (TOML). Defaults to the built-in Itokawa scenario.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Output directory, overriding the scenario's `output_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed, overriding the scenario's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Wheel speed and braking time for one hop.
    #[command(allow_negative_numbers = true)]
    Plan {
        /// Target distance (m).
        #[arg(long)]
        d: f64,
        /// Surface slope (deg).
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Closed-loop braking run of the flywheel motor.
    #[command(allow_negative_numbers = true)]
    Brake {
        /// Initial wheel speed (rad/s).
        #[arg(long)]
        omega: f64,
        /// Demanded braking time (s); 0 demands an instant stop.
        #[arg(long)]
        dt: f64,
    },
    /// Repeated perturbed hops towards one target, with landing statistics.
    #[command(allow_negative_numbers = true)]
    Jump {
        #[arg(long)]
        d: f64,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 14, value_parser = clap::value_parser!(u32).range(1..))]
        reps: u32,
    },
    /// Launch angle and distance over a log range of brake torques.
    #[command(allow_negative_numbers = true)]
    Sweep {
        /// Wheel speed (rad/s).
        #[arg(long)]
        omega: f64,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 1e-2)]
        tau_min: f64,
        #[arg(long, default_value_t = 1e1)]
        tau_max: f64,
        #[arg(long, default_value_t = 1001)]
        samples: usize,
    },
    /// Multi-hop traverse with replanning after each landing.
    #[command(allow_negative_numbers = true)]
    Mission {
        /// Total distance (m).
        #[arg(long)]
        total: f64,
        /// Landing tolerance (m).
        #[arg(long, default_value_t = 5.0)]
        tol: f64,
        #[arg(long)]
        beta: Option<f64>,
        /// Longest single hop (m); defaults to the scenario's planner.max_hop.
        #[arg(long)]
        max_hop: Option<f64>,
        /// Fly the initial hop list without replanning.
        #[arg(long)]
        no_replan: bool,
    },
    /// Planning grid over slopes and distances, optionally with landing statistics.
    #[command(allow_negative_numbers = true)]
    Tables {
        /// Single slope (deg); all slopes from -30 to 30 deg when omitted.
        #[arg(long)]
        beta: Option<f64>,
        /// Also run perturbed hops for every feasible cell.
        #[arg(long)]
        stats: bool,
        #[arg(long, default_value_t = 14, value_parser = clap::value_parser!(u32).range(1..))]
        reps: u32,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::resolve(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = OutputDir::create(cli.out.as_deref().unwrap_or(&cfg.output_dir))?;
    match cli.command {
        Command::Plan { d, beta } => commands::plan(&cfg, &out, d, beta),
        Command::Brake { omega, dt } => commands::brake(&cfg, &out, omega, dt),
        Command::Jump { d, beta, reps } => commands::jump(&cfg, &out, d, beta, reps as usize),
        Command::Sweep {
            omega,
            beta,
            tau_min,
            tau_max,
            samples,
        } => {
            let range = TorqueRange {
                min: tau_min,
                max: tau_max,
                samples,
            };
            commands::sweep(&cfg, &out, omega, beta, &range)
        }
        Command::Mission {
            total,
            tol,
            beta,
            max_hop,
            no_replan,
        } => commands::mission(&cfg, &out, total, tol, beta, max_hop, !no_replan),
        Command::Tables { beta, stats, reps } => {
            commands::tables(&cfg, &out, beta, stats, reps as usize)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
