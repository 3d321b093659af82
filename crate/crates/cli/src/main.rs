//! `qcost` command-line driver.
//!
//! Exit codes: 0 success, 1 tolerance violation, 2 invalid input,
//! 3 heralding or statistical failure.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod complexity;
mod hhl;
mod lde;
mod output;
mod prep_bench;
mod tomo;

use output::{Failure, Outcome};

#[derive(Parser)]
#[command(name = "qcost", version, about = "Desk-scale quantum algorithm verification and resource accounting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Taylor-series linear ODE solver: oracle runs and the diffusion study.
    Lde(lde::LdeArgs),
    /// Three-stage linear-system solver.
    Hhl(hhl::HhlArgs),
    /// Tomography sample budgets and Monte Carlo coverage.
    Tomo(tomo::TomoArgs),
    /// Overall gate-complexity table and evaluations.
    Complexity(complexity::ComplexityArgs),
    /// State-preparation synthesis counts against the closed form.
    PrepBench(prep_bench::PrepBenchArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<Outcome, Failure> = match &cli.command {
        Command::Lde(a) => lde::run(a),
        Command::Hhl(a) => hhl::run(a),
        Command::Tomo(a) => tomo::run(a),
        Command::Complexity(a) => complexity::run(a),
        Command::PrepBench(a) => prep_bench::run(a),
    };
    output::finish(result)
}
