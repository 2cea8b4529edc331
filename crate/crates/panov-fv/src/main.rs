use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use panov_fv::commands::{cmd_convergence, cmd_invariants, cmd_run};
use panov_fv::config::{Overrides, RunConfig};
use panov_fv::invariants::SuiteOptions;
use panov_fv::CliError;

#[derive(Parser)]
#[command(
    name = "panov-fv",
    version,
    about = "Godunov finite volume solver for Panov-type discontinuous fluxes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve once and print `t_end l1_error tv_u tv_beta entropy_violation`.
    Run(CommonArgs),
    /// Solve on every mesh level and print the error / TV table.
    Convergence(CommonArgs),
    /// Randomized checks of monotonicity, L1 contraction, TVD, bounds, entropy and conservation.
    Invariants(InvariantArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON run manifest; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Builtin problem: ex51, ex52 or steady.
    #[arg(long)]
    problem: Option<String>,
    /// Cells per axis.
    #[arg(long)]
    mesh: Option<usize>,
    /// Comma-separated mesh list for `convergence`.
    #[arg(long, value_delimiter = ',')]
    meshes: Option<Vec<usize>>,
    /// Fraction θ ∈ (0, 1] of the CFL-limited step.
    #[arg(long)]
    cfl_fraction: Option<f64>,
    /// Fixed Δt/Δx instead of a CFL fraction.
    #[arg(long)]
    lambda: Option<f64>,
    /// Final time.
    #[arg(long)]
    t_end: Option<f64>,
    /// Directory for solution.csv, report.json, table.csv.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Recorded in the manifest; the solve itself is deterministic.
    #[arg(long)]
    seed: Option<u64>,
    /// 1 or 2 (default 2).
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Args)]
struct InvariantArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Largest number of cells per axis (4..=32).
    #[arg(long, default_value_t = 16)]
    mesh: usize,
    #[arg(long, default_value_t = 3)]
    steps: usize,
    /// Fixed Δt/Δx; a value beyond the CFL bound is refused with exit code 3.
    #[arg(long)]
    lambda: Option<f64>,
    /// Restrict the g components drawn (repeatable).
    #[arg(long = "g")]
    g: Vec<String>,
}

impl CommonArgs {
    fn resolve(self) -> Result<RunConfig, CliError> {
        let base = self.config.as_deref().map(RunConfig::load).transpose()?;
        let o = Overrides {
            problem: self.problem,
            mesh: self.mesh,
            meshes: self.meshes,
            cfl_fraction: self.cfl_fraction,
            lambda: self.lambda,
            t_end: self.t_end,
            out_dir: self.out_dir,
            seed: self.seed,
            dim: self.dim,
        };
        RunConfig::resolve(base, &o)
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Run(args) => cmd_run(&args.resolve()?, &mut out).map(drop),
        Command::Convergence(args) => cmd_convergence(&args.resolve()?, &mut out).map(drop),
        Command::Invariants(a) => {
            let mut opts = SuiteOptions {
                seed: a.seed,
                trials: a.trials,
                cells: a.mesh,
                steps: a.steps,
                lambda: a.lambda,
                ..Default::default()
            };
            if !a.g.is_empty() {
                opts.g_names = a.g;
            }
            cmd_invariants(&opts, &mut out).map(drop)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("panov-fv: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
