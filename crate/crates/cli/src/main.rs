//! `flowdiff`: solve, cluster, verify and benchmark flow diffusions from the
//! command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod demand;
mod report;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Solve,
    Cluster,
    Bench,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "flowdiff", version, about = "Flow diffusion on weighted graphs")]
pub struct Cli {
    /// Edge list with `u v [c]` per line.
    #[arg(long)]
    pub input: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "solve")]
    pub mode: Mode,

    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,

    /// Comma-separated seed vertices.
    #[arg(long, value_delimiter = ',', conflicts_with = "demand_file")]
    pub seeds: Option<Vec<usize>>,

    /// Total source mass placed on the seeds.
    #[arg(long)]
    pub mass: Option<f64>,

    /// Demand file with `u d_u` per line.
    #[arg(long)]
    pub demand_file: Option<PathBuf>,

    /// Split the seed mass evenly instead of by degree.
    #[arg(long)]
    pub uniform_split: bool,

    /// Measure cuts against `min(vol(S), vol(V \ S))` instead of `vol(S)`.
    #[arg(long)]
    pub global: bool,

    /// Fixed preconditioner quality target.
    #[arg(long)]
    pub kappa: Option<f64>,

    /// Fixed core size of the preconditioners.
    #[arg(long)]
    pub j: Option<usize>,

    #[arg(long)]
    pub base_case_edges: Option<usize>,

    #[arg(long)]
    pub inner_delta: Option<f64>,

    /// Wall-clock budget per solve, in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Grid sides for bench mode; expanders use the same vertex counts.
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 32])]
    pub sizes: Vec<usize>,

    #[arg(long)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
