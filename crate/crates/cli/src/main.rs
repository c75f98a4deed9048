//! `lagspec`: exact moments, the limiting density and Monte Carlo checks for
//! singular values of lag-s auto-covariance matrices.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lagspec_core::matrix_lab::Distribution;

use output::{CliError, Exit, Format};

#[derive(Parser, Debug)]
#[command(name = "lagspec", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,

    /// Write to PATH instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Worker threads for ensembles.
    #[arg(long, global = true, env = "LAGSPEC_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// m_1..m_K by closed form, pillar sum and recursion.
    Moments(MomentsArgs),
    /// Density and CDF of the limiting law on a grid over its support.
    Density(DensityArgs),
    /// Monte Carlo ensemble compared with the law at y_T = p/T.
    Simulate(SimulateArgs),
    /// Run the acceptance criteria.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct MomentsArgs {
    /// Aspect ratio as p/q or an integer (exact) or a decimal (numeric).
    #[arg(long, allow_hyphen_values = true)]
    pub y: String,
    /// Highest moment order.
    #[arg(long = "K", visible_alias = "k")]
    pub order: usize,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub y: String,
    /// Number of grid points.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long = "T")]
    pub t: usize,
    /// Lag.
    #[arg(long, default_value_t = 1)]
    pub s: usize,
    #[arg(long, default_value = "gaussian")]
    pub dist: Distribution,
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
    #[arg(long, env = "LAGSPEC_SEED", default_value_t = 42)]
    pub seed: u64,
    /// Highest empirical moment order.
    #[arg(long = "K", default_value_t = 4)]
    pub order: usize,
    /// Also dump every eigenvalue as `replicate,index,eigenvalue` CSV.
    #[arg(long, value_name = "PATH")]
    pub eigs: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Skip the simulation criteria.
    #[arg(long)]
    pub quick: bool,
}

fn run(cli: Cli) -> Result<Exit, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("cannot configure {n} threads: {e}")))?;
    }
    let out = cli.out.as_deref();
    match cli.command {
        Command::Moments(a) => commands::moments(&a, cli.format.unwrap_or(Format::Json), out),
        Command::Density(a) => commands::density(&a, cli.format.unwrap_or(Format::Json), out),
        Command::Simulate(a) => commands::simulate(&a, cli.format.unwrap_or(Format::Json), out),
        Command::Verify(a) => commands::verify(&a, cli.format, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(exit) => ExitCode::from(exit as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit as u8)
        }
    }
}
