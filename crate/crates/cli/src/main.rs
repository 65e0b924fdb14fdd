use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fasttrack_cli::{commands, CliError, Context, RunConfig};

/// Equilibria of a free queue with and without a paid fast-track line.
#[derive(Debug, Parser)]
#[command(name = "fasttrack", version)]
struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true, default_value = "configs/default.toml")]
    config: PathBuf,
    /// Monte Carlo seed; overrides `verify.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides `out` in the configuration.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Bisection tolerance on the solved variable.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, hide = true, allow_negative_numbers = true)]
    perturb_thresholds: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Waiting cost that clears the single free queue.
    SolveSingle,
    /// Solve the free coordinate of a priority system.
    SolvePriority,
    /// Solve c1 over a (c2, p) grid.
    Sweep,
    /// Check the income-band welfare partition on a grid and a sample.
    Verify,
    /// Classify a sampled population under each regime.
    Simulate,
    /// Write region boundaries and special points as CSV.
    EmitFigure,
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let config = RunConfig::load(&cli.config)?;
    let mut ctx = Context::new(config, cli.out.clone(), cli.seed, cli.tol)?;
    ctx.perturb_thresholds = cli.perturb_thresholds;
    match cli.command {
        Command::SolveSingle => commands::solve_single(&ctx),
        Command::SolvePriority => commands::solve_priority_cmd(&ctx),
        Command::Sweep => commands::sweep(&ctx),
        Command::Verify => commands::verify(&ctx),
        Command::Simulate => commands::simulate(&ctx),
        Command::EmitFigure => commands::emit_figure(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
