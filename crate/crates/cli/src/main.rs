//! `pwd`: batch driver for simulations, witnesses, surface sweeps and the
//! validation suite.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pwd_core::validation::{Fault, Level};
use pwd_core::witness::SurfaceExample;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("engine error: {0}")]
    Engine(#[from] pwd_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    pub fn config(field: &str, e: pwd_core::Error) -> Self {
        Self::Config(format!("{field}: {e}"))
    }

    fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Engine(_) | Self::Io { .. } => 3,
            Self::Validation(_) => 4,
        }
    }
}

#[derive(Parser)]
#[command(name = "pwd", version, about = "Piecewise dynamics: maps, witnesses and surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for Λ(t) and write it as CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Trace-distance witness over axis and random state pairs.
    Witness {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep the scalar functions over λt and Γ/λ.
    Surface {
        #[arg(long, value_enum)]
        example: ExampleArg,
        /// Horizon in units of 1/λ.
        #[arg(long)]
        tmax: Option<f64>,
        #[arg(long)]
        tsteps: Option<usize>,
        #[arg(long)]
        ratio_min: Option<f64>,
        #[arg(long)]
        ratio_max: Option<f64>,
        #[arg(long)]
        ratio_steps: Option<usize>,
        /// γ/λ of the damping example.
        #[arg(long)]
        gamma_ratio: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the self-check suite; exits 4 on any failure.
    Validate {
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleArg {
    Dephasing,
    Damping,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    ChannelSignFlip,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("PWD_THREADS") else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("PWD_THREADS: expected a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("PWD_THREADS: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Simulate { config, out } => commands::simulate(&config, &out),
        Command::Witness { config, out } => commands::witness(&config, &out),
        Command::Surface { example, tmax, tsteps, ratio_min, ratio_max, ratio_steps, gamma_ratio, out } => {
            let example = match example {
                ExampleArg::Dephasing => SurfaceExample::Dephasing,
                ExampleArg::Damping => SurfaceExample::Damping,
            };
            let ranges = commands::SurfaceRanges { tmax, tsteps, ratio_min, ratio_max, ratio_steps, gamma_ratio };
            commands::surface(example, ranges, &out)
        }
        Command::Validate { level, out, inject_fault } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let fault = inject_fault.map(|FaultArg::ChannelSignFlip| Fault::ChannelSignFlip);
            commands::validate(level, fault, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pwd: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
