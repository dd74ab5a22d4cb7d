//! `rgflow`: command-line front end for the hierarchical spherical-model flow.

mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rgflow::{Flavor, Suite};

#[derive(Debug, Parser)]
#[command(
    name = "rgflow",
    version,
    about = "Exact RG flow of the 4-d hierarchical spherical model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file (stdout if omitted).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Solver tolerance, in [1e-14, 1e-2].
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct Model {
    #[arg(long, default_value = "critical")]
    pub flavor: Flavor,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub beta: f64,
}

#[derive(Debug, Clone, Args)]
pub struct Grid {
    #[arg(long, allow_negative_numbers = true)]
    pub start: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub stop: f64,
    /// Number of grid points (at least 2).
    #[arg(long, default_value_t = 256)]
    pub points: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// p̄(t, x) and u(t, x) along a sweep in t at fixed x.
    Flow {
        #[command(flatten)]
        model: Model,
        #[arg(long, default_value_t = 0.0)]
        t_start: f64,
        #[arg(long)]
        t_stop: f64,
        #[arg(long, default_value_t = 256)]
        points: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x_re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x_im: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Solve v(t, p̄) = x at one point.
    Invert {
        #[command(flatten)]
        model: Model,
        #[arg(long)]
        t: f64,
        #[arg(long, allow_negative_numbers = true)]
        x_re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x_im: f64,
        #[command(flatten)]
        common: Common,
    },
    /// u(t, x) and p̄(t, x) over a grid of x at fixed t.
    U {
        #[command(flatten)]
        model: Model,
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        grid: Grid,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x_im: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Boundary arc of Ω_t (critical flavor).
    Boundary {
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 256)]
        points: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Lee–Yang zero density at scale t (critical flavor).
    Zeros {
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 256)]
        points: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Fixed-point pair of v(t, ·) over a sweep in t.
    FixedPoints {
        #[arg(long, default_value_t = 0.0)]
        t_start: f64,
        #[arg(long)]
        t_stop: f64,
        #[arg(long, default_value_t = 256)]
        points: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Collision scale t* of the conjugate fixed points.
    TStar {
        #[command(flatten)]
        common: Common,
    },
    /// Crossover scale t_co.
    Crossover {
        #[command(flatten)]
        common: Common,
    },
    /// p̂(β) and μ(β) of the normal phase.
    Thermo {
        #[arg(long)]
        beta: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Finite-N initial data ϑ_N′ against its limit u₀′ on a grid of x.
    Initial {
        #[arg(long, default_value_t = 4.0)]
        beta: f64,
        #[arg(long, default_value_t = 100)]
        n: u32,
        #[command(flatten)]
        grid: Grid,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x_im: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Run a self-check suite; exits nonzero if any check fails.
    Verify {
        /// pde | inversion | limits | geometry | initial | all
        #[arg(default_value = "all")]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical {
        command: &'static str,
        error: rgflow::FlowError,
    },
    Io(std::io::Error),
    ChecksFailed,
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("RGFLOW_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        Failure::Usage(format!(
            "RGFLOW_THREADS must be a nonnegative integer, got `{raw}`"
        ))
    })?;
    if n > 0 {
        // only fails if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = init_threads().and_then(|_| commands::run(cli.command));
    let _ = std::io::stdout().flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("rgflow: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical { command, error }) => {
            eprintln!("rgflow {command}: numerical failure: {error}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("rgflow: {e}");
            ExitCode::from(1)
        }
        Err(Failure::ChecksFailed) => ExitCode::from(2),
    }
}
