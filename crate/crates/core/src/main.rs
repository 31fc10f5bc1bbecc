use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use degelliptic::cli::{run, Command as RunCommand, RunConfig, EXIT_ERROR};
use degelliptic::operators::Convention;

#[derive(Parser)]
#[command(
    name = "degelliptic",
    about = "Solve degenerate quasilinear elliptic problems and check their maximum principles",
    version
)]
struct Args {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Sum,
    Mean,
}

#[derive(clap::Args)]
struct Common {
    /// Problem or scenario configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for reports and CSV artifacts
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override: grid nodes per axis
    #[arg(long)]
    grid: Option<usize>,
    /// Override: level count for the sup-bound integral
    #[arg(long)]
    levels: Option<usize>,
    /// Override: p-Laplacian convention
    #[arg(long)]
    convention: Option<ConventionArg>,
    /// Override: solver residual tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for randomized test-instance generation
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the Dirichlet problem and write the solution and log
    Solve(Common),
    /// Solve, then check the sup-bound estimate
    AbpCheck(Common),
    /// Solve, then export the concave envelope and contact set
    Envelope(Common),
    /// Solve, then sup-convolve and run the transfer check
    Supconv(Common),
    /// Run a scenario config (comparison, barriers, non-uniqueness)
    Scenario(Common),
    /// Run the built-in sup-bound battery
    Battery(Common),
}

fn to_run_config(cmd: RunCommand, c: Common) -> RunConfig {
    RunConfig {
        command: cmd,
        config_path: c.config,
        out_dir: c.out,
        grid_override: c.grid,
        levels_override: c.levels,
        convention_override: c.convention.map(|v| match v {
            ConventionArg::Sum => Convention::Sum,
            ConventionArg::Mean => Convention::Mean,
        }),
        tol_override: c.tol,
        seed: c.seed,
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match args.command {
        Cmd::Solve(c) => to_run_config(RunCommand::Solve, c),
        Cmd::AbpCheck(c) => to_run_config(RunCommand::AbpCheck, c),
        Cmd::Envelope(c) => to_run_config(RunCommand::Envelope, c),
        Cmd::Supconv(c) => to_run_config(RunCommand::Supconv, c),
        Cmd::Scenario(c) => to_run_config(RunCommand::Scenario, c),
        Cmd::Battery(c) => to_run_config(RunCommand::Battery, c),
    };
    match run(&cfg) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
