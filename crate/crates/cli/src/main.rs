//! `tpd`: certify total-pairwise-distance contractions of finite metric
//! spaces from the command line.
//!
//! Every run prints exactly one JSON report on stdout; diagnostics go to
//! stderr. Exit status is 0 on success, 1 when a checked property or
//! certificate fails, and 2 on bad input.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use tpd_core::{parse_rational, Rational};

use report::{Failure, RunReport};

#[derive(Parser, Debug)]
#[command(name = "tpd", version, about = "Total pairwise distance contraction toolkit")]
struct Cli {
    /// Worker threads for tuple enumeration and fuzz trials (default: one
    /// per core). Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SpaceArg {
    /// Space file: {"labels": [...], "dist": [["p/q", ...], ...], "map": [...]}
    #[arg(long)]
    pub space: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct BudgetArg {
    /// Tuple count above which the scan samples instead of enumerating.
    #[arg(long, default_value_t = tpd_core::contraction::DEFAULT_BUDGET)]
    pub budget: u64,
}

fn rational_arg(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the metric axioms (and the map, if present).
    Validate {
        #[command(flatten)]
        space: SpaceArg,
    },
    /// Exact contraction coefficient and its witness tuple.
    Alpha {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        arity: usize,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// Check the contraction inequality for a given alpha in [0, 1).
    Certify {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        arity: usize,
        #[arg(long, value_parser = rational_arg)]
        alpha: Rational,
    },
    /// Orbit of one point, its window sums and the tail-bound check.
    Orbit {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        start: usize,
        #[arg(long)]
        arity: usize,
        /// Ratio for the tail bound; defaults to the exact coefficient when
        /// that certifies.
        #[arg(long, value_parser = rational_arg)]
        alpha: Option<Rational>,
    },
    /// Periodic points and their prime periods.
    Periodic {
        #[command(flatten)]
        space: SpaceArg,
    },
    /// Certify at an arity and check the periodic-point conclusion.
    Theorem {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        arity: usize,
    },
    /// Truncated ladder space with its shift map.
    Ladder {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value = "1/100", value_parser = rational_arg)]
        eps: Rational,
        #[arg(long, default_value = "10", value_parser = rational_arg)]
        a: Rational,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Arity to certify at; defaults to `n`.
        #[arg(long)]
        arity: Option<usize>,
        #[arg(long)]
        emit: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// The line {0, 1} ∪ [3, grid_max] on a grid, with 0 <-> 1.
    Twocycle {
        #[arg(long, default_value = "10", value_parser = rational_arg)]
        grid_max: Rational,
        #[arg(long, default_value = "1", value_parser = rational_arg)]
        grid_step: Rational,
        #[arg(long, default_value_t = 3)]
        arity: usize,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Random maps into a proper subset, checked at arity = number of points.
    Subsetmap {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long, default_value_t = 8)]
        max_points: usize,
        /// Write the instance to a space file (single trial only).
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Seeded random corpus checked against every property.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 8)]
        max_points: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Alpha { .. } => "alpha",
            Command::Certify { .. } => "certify",
            Command::Orbit { .. } => "orbit",
            Command::Periodic { .. } => "periodic",
            Command::Theorem { .. } => "theorem",
            Command::Ladder { .. } => "ladder",
            Command::Twocycle { .. } => "twocycle",
            Command::Subsetmap { .. } => "subsetmap",
            Command::Fuzz { .. } => "fuzz",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let name = cli.command.name();
    let started = Instant::now();

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.unwrap_or(0)).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("tpd: cannot start worker threads: {e}");
            return ExitCode::from(2);
        }
    };
    let jobs = pool.current_num_threads();
    let outcome = pool.install(|| commands::run(&cli.command));

    let wall_time_ms = started.elapsed().as_millis();
    match outcome {
        Ok(out) => {
            let code = if out.passed { 0 } else { 1 };
            if !out.passed {
                eprintln!("tpd {name}: property check failed");
            }
            RunReport::success(name, argv, jobs, wall_time_ms, out).print();
            ExitCode::from(code)
        }
        Err(Failure::Input(message)) => {
            eprintln!("tpd {name}: {message}");
            RunReport::error(name, argv, jobs, wall_time_ms, &message).print();
            ExitCode::from(2)
        }
    }
}
