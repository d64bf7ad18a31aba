//! `lossnet` — analysis runs for multi-class loss networks with transfers.
//!
//! Every command is a pure function of its input files, flags and seeds;
//! re-running reproduces outputs byte for byte except the duration field of
//! the embedded manifests.

mod commands;
mod inputs;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lossnet_core::Error;

#[derive(Parser)]
#[command(name = "lossnet", version, about = "Multi-class loss networks with transfers: equilibria, energy landscapes, mean-field dynamics and stochastic simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the state space and write it as CSV
    Enumerate {
        /// Params JSON (keys K, A, C, lambda, gamma, mu)
        params: PathBuf,
        /// Output CSV path
        #[arg(short, long, default_value = "states.csv")]
        output: PathBuf,
    },
    /// Find and classify all critical points of the energy landscape
    FixedPoints {
        params: PathBuf,
        /// Multistart grid points per load axis
        #[arg(long, default_value_t = 7)]
        grid: usize,
        /// Newton tolerance on sup-norm of the energy gradient
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Solve with damped Picard iteration only (no classification);
        /// required when some gamma_k = 0
        #[arg(long)]
        picard_only: bool,
        /// Output prefix; writes <prefix>.json and <prefix>.csv
        #[arg(short, long, default_value = "fixed_points")]
        output: PathBuf,
    },
    /// Integrate the mean-field ODE and label the terminal basin
    Integrate {
        params: PathBuf,
        /// Initial condition: state index, "uniform", or a CSV vector file
        #[arg(long)]
        y0: String,
        /// Time horizon
        #[arg(long, default_value_t = 100.0)]
        t_max: f64,
        /// RK4 step
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        /// Record every this many steps
        #[arg(long, default_value_t = 10)]
        record_every: usize,
        /// Skip the Lyapunov column
        #[arg(long)]
        no_g: bool,
        #[arg(short, long, default_value = "trajectory.csv")]
        output: PathBuf,
    },
    /// Evaluate the energy function on a load grid (surface CSV)
    ScanPhi {
        params: PathBuf,
        /// Two load axes to scan, e.g. 0,1 (single-class models scan axis 0)
        #[arg(long, default_value = "0,1")]
        axes: String,
        /// lo,hi for each scanned axis: lo1,hi1[,lo2,hi2]; strictly positive
        #[arg(long)]
        range: String,
        /// Grid points per axis
        #[arg(long, default_value_t = 200)]
        resolution: usize,
        /// Base load vector for unscanned axes (required when K > 2)
        #[arg(long)]
        fixed: Option<String>,
        #[arg(short, long, default_value = "phi_scan.csv")]
        output: PathBuf,
    },
    /// Run the N-node stochastic simulator
    Simulate {
        params: PathBuf,
        /// Run config JSON (seed, t_max, sample_dt, n_nodes, y0, observables, switch)
        config: PathBuf,
        /// Output prefix; writes <prefix>.csv and <prefix>.switch.json
        #[arg(short, long, default_value = "simulation")]
        output: PathBuf,
    },
    /// Large-capacity scaling limit and finite-capacity convergence table
    Kelly {
        /// Params JSON with normalized (per-capacity) arrival rates
        params: PathBuf,
        /// Capacities for the finite-C check, comma separated
        #[arg(long = "check-C", default_value = "50,100,200,400")]
        check_c: String,
        #[arg(short, long, default_value = "kelly.json")]
        output: PathBuf,
    },
    /// Design a bistable two-class instance from a target saddle
    Design {
        /// JSON file {"rho": [rho1, rho2]}
        rho_bar: PathBuf,
        /// Node capacity of the designed instance
        #[arg(long)]
        capacity: u32,
        #[arg(short, long, default_value = "designed_params.json")]
        output: PathBuf,
    },
}

/// Stable exit codes: 0 success, 2 parse, 3 cap, 4 no fixed point,
/// 5 unsupported model, 6 integrator step, 7 design condition.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidParams(_)
        | Error::Io(_)
        | Error::DimensionMismatch { .. }
        | Error::Precondition(_)
        | Error::Domain(_) => 2,
        Error::CapacityExceeded { .. } => 3,
        Error::NonConvergence { .. } | Error::InsufficientData { .. } => 4,
        Error::UnsupportedModel(_) => 5,
        Error::StepClamp { .. } => 6,
        Error::InteriorRequired { .. } => 2,
        Error::ConditionViolated(_) => 7,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Enumerate { params, output } => commands::enumerate::run(&params, &output),
        Command::FixedPoints {
            params,
            grid,
            tol,
            picard_only,
            output,
        } => commands::fixed_points::run(&params, grid, tol, picard_only, &output),
        Command::Integrate {
            params,
            y0,
            t_max,
            step,
            record_every,
            no_g,
            output,
        } => commands::integrate::run(&params, &y0, t_max, step, record_every, no_g, &output),
        Command::ScanPhi {
            params,
            axes,
            range,
            resolution,
            fixed,
            output,
        } => commands::scan_phi::run(&params, &axes, &range, resolution, fixed.as_deref(), &output),
        Command::Simulate {
            params,
            config,
            output,
        } => commands::simulate::run(&params, &config, &output),
        Command::Kelly {
            params,
            check_c,
            output,
        } => commands::kelly::run(&params, &check_c, &output),
        Command::Design {
            rho_bar,
            capacity,
            output,
        } => commands::design::run(&rho_bar, capacity, &output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
