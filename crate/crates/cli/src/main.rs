mod gen;
mod report;
mod solve;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "drcr-bench", version, about = "Generate corpora, run DRCR solvers and tabulate their running times")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CaseKind {
    /// Delay-range queries drawn from Cases 4 and 6.
    Drcr,
    /// Srlg-disjoint pair queries with U = ceil(2.5 * min delay).
    Srlg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StyleArg {
    None,
    Star,
    Nonstar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    #[value(name = "pulse+")]
    Pulse,
    CostKsp,
    DelayKsp,
    LagrangianKsp,
    #[value(name = "cose-pulse+")]
    CosePulse,
    SrlgCostKsp,
    SrlgDelayKsp,
    SrlgLagrangianKsp,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Pulse => "pulse+",
            Algo::CostKsp => "cost-ksp",
            Algo::DelayKsp => "delay-ksp",
            Algo::LagrangianKsp => "lagrangian-ksp",
            Algo::CosePulse => "cose-pulse+",
            Algo::SrlgCostKsp => "srlg-cost-ksp",
            Algo::SrlgDelayKsp => "srlg-delay-ksp",
            Algo::SrlgLagrangianKsp => "srlg-lagrangian-ksp",
        }
    }

    pub fn is_srlg(self) -> bool {
        matches!(
            self,
            Algo::CosePulse | Algo::SrlgCostKsp | Algo::SrlgDelayKsp | Algo::SrlgLagrangianKsp
        )
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write graph.csv, queries.jsonl and manifest.json for an Erdős–Rényi corpus.
    Gen(gen::GenArgs),
    /// Run one solver over a query file and write one JSON result per query.
    Solve(solve::SolveArgs),
    /// Tabulate running-time percentiles and completion rates as CSV.
    ///
    /// Percentiles use the nearest-rank method: the p-th percentile of n
    /// runs is the value at rank ceil(p/100 * n) in ascending order.
    /// Timed-out runs rank above every finished run; a percentile that
    /// lands on one is written as ">LIMIT", with LIMIT the time limit in
    /// microseconds when --time-limit-ms is given.
    Report(report::ReportArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => gen::run(&args),
        Command::Solve(args) => solve::run(&args),
        Command::Report(args) => report::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

pub fn read(path: &PathBuf) -> anyhow::Result<String> {
    use anyhow::Context;
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}
