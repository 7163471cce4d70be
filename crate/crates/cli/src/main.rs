//! `mcdl`: worst-case MSE reports for Monte-Carlo designs.
//!
//! Exit codes: 0 ok, 1 a reported bound check failed, 2 usage or parse
//! error, 3 invalid design, 4 partition infeasible, 5 dimension mismatch,
//! 6 simulation z-gate failure.

mod commands;
mod error;
mod files;
mod format;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mcdl_core::ContinuousKind;

#[derive(Debug, Parser)]
#[command(
    name = "mcdl",
    version,
    about = "Worst-case MSE of Monte-Carlo designs with dependent points"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lower bound on the worst-case MSE for n points and N equal blocks.
    Bound {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long = "N", value_parser = clap::value_parser!(u64).range(2..))]
        blocks: u64,
    },
    /// Worst-case MSE, its maximizer, and the bound for every feasible block count.
    Analyze {
        design: PathBuf,
        /// Emit the per-block-count table as CSV.
        #[arg(long)]
        csv: bool,
    },
    /// The pigeonhole witness for an equal partition into B blocks.
    Witness {
        design: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        blocks: u64,
    },
    /// Exact MSE of one function.
    Mse { design: PathBuf, function: PathBuf },
    /// Monte-Carlo estimate of the MSE against the exact value; exits 6 if |z| > 4.
    Simulate {
        design: PathBuf,
        function: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        reps: usize,
        #[arg(long, env = "MCDL_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Bound and worst case of a continuous design discretized at each bin count, as CSV.
    Refine {
        #[arg(long)]
        kind: ContinuousKind,
        #[arg(long)]
        n: usize,
        #[arg(long = "Ns", value_delimiter = ',', required = true)]
        bin_counts: Vec<usize>,
    },
    /// Marginal, second-order and bound checks for every feasible block count.
    Verify { design: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = match cli.command {
        Command::Bound { n, blocks } => commands::bound(&mut out, n as usize, blocks as usize),
        Command::Analyze { design, csv } => commands::analyze(&mut out, &design, csv),
        Command::Witness { design, blocks } => {
            commands::witness(&mut out, &design, blocks as usize)
        }
        Command::Mse { design, function } => commands::mse(&mut out, &design, &function),
        Command::Simulate {
            design,
            function,
            reps,
            seed,
        } => commands::simulate(&mut out, &design, &function, reps, seed),
        Command::Refine {
            kind,
            n,
            bin_counts,
        } => commands::refine(&mut out, kind, n, &bin_counts),
        Command::Verify { design } => commands::verify(&mut out, &design),
    };
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
