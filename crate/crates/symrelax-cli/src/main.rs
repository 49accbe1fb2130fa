//! `symrelax` — build, solve and export symmetry-reduced moment/SOS
//! relaxations of polynomial optimization problems.
//!
//! Subcommands: `structure` (block layout at one order), `relax`
//! (symmetry-adapted / dense / orbit-space relaxation of a problem file),
//! `reduce` (few-distinct-values restriction family), `check-nonneg4`
//! (degree-4 nonnegativity certificates) and `powersum` (lower/upper
//! sandwich for pinned power-sum problems).
//!
//! Exit codes: 0 success, 2 input/parse error, 3 solver failure,
//! 4 regime/invariance error.

mod commands;
mod error;
mod problem;
mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{
    cmd_check_nonneg4, cmd_powersum, cmd_reduce, cmd_relax, cmd_structure, CheckArgs, GroupArg,
    PowersumArgs, ReduceArgs, RelaxArgs, Route, StructureArgs,
};
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "symrelax",
    version,
    about = "Symmetry-reduced moment/SOS relaxations for polynomial optimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the symmetry-adapted block structure at one order.
    Structure {
        /// Number of variables.
        #[arg(long)]
        n: usize,
        /// Relaxation order.
        #[arg(long, visible_alias = "order")]
        k: usize,
        /// Acting group.
        #[arg(long, value_enum)]
        group: GroupArg,
        /// Second variable count for a side-by-side stabilization check.
        #[arg(long)]
        compare: Option<usize>,
        /// Write the machine-readable report to this path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Build one relaxation of a problem file, then solve it or export SDPA.
    Relax {
        /// Problem file.
        file: PathBuf,
        /// Relaxation order.
        #[arg(long, visible_alias = "k")]
        order: usize,
        /// Reduction route.
        #[arg(long, value_enum)]
        route: Route,
        /// Write the SDPA sparse file here instead of solving.
        #[arg(long)]
        export: Option<PathBuf>,
        /// Relative duality-gap tolerance for the solve.
        #[arg(long)]
        tol: Option<f64>,
        /// Write the machine-readable report to this path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Restrict a symmetric problem to few distinct coordinate values and
    /// solve the whole restriction family.
    Reduce {
        /// Problem file.
        file: PathBuf,
        /// Relaxation order for the restricted solves.
        #[arg(long, visible_alias = "k")]
        order: usize,
        /// Thread count for the pattern-family solves.
        #[arg(long)]
        jobs: Option<usize>,
        /// Write the machine-readable report to this path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Decide nonnegativity of a symmetric polynomial of degree at most 4.
    #[command(name = "check-nonneg4")]
    CheckNonneg4 {
        /// Problem file (unconstrained).
        file: PathBuf,
        /// Write the machine-readable report to this path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Sandwich the minimum of a power sum with its lower power sums pinned.
    Powersum {
        /// Number of variables.
        #[arg(long)]
        n: usize,
        /// Pinned power sums s_1..s_{m-1} (m - 1 of them).
        #[arg(long)]
        m: usize,
        /// Power sum to minimize.
        #[arg(long)]
        q: usize,
        /// Pinned values, comma-separated.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        gamma: Vec<f64>,
        /// Write the machine-readable report to this path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Structure {
            n,
            k,
            group,
            compare,
            report,
        } => cmd_structure(StructureArgs {
            n,
            k,
            group,
            compare,
            report,
        }),
        Command::Relax {
            file,
            order,
            route,
            export,
            tol,
            report,
        } => cmd_relax(RelaxArgs {
            file,
            order,
            route,
            export,
            tol,
            report,
        }),
        Command::Reduce {
            file,
            order,
            jobs,
            report,
        } => {
            if let Some(jobs) = jobs {
                if jobs == 0 {
                    return Err(CliError::input("--jobs must be at least 1"));
                }
                // Ignore the error when a global pool already exists; the
                // aggregation is deterministic either way.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(jobs)
                    .build_global();
            }
            cmd_reduce(ReduceArgs {
                file,
                order,
                report,
            })
        }
        Command::CheckNonneg4 { file, report } => cmd_check_nonneg4(CheckArgs { file, report }),
        Command::Powersum {
            n,
            m,
            q,
            gamma,
            report,
        } => cmd_powersum(PowersumArgs {
            n,
            m,
            q,
            gamma,
            report,
        }),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
