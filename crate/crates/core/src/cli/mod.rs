//! The `cbo` command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 incomplete result
//! (t_max reached, undefined slope, failed invariant check), 3 violated
//! certificate hypothesis, 4 numerical failure during integration.

mod commands;
pub mod config;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;

pub use config::ExperimentConfig;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_INCOMPLETE: u8 = 2;
pub const EXIT_HYPOTHESIS: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "cbo", version, about = "One-dimensional consensus-based optimization experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the particle system and report the consensus limit.
    Simulate(CommonArgs),
    /// Error against alpha, with the fitted log-log slope.
    SweepAlpha(CommonArgs),
    /// Error against the particle count for the linear objective.
    SweepN(CommonArgs),
    /// Build a calyx certificate and evaluate its error bound.
    Certify(CommonArgs),
    /// Check the a-priori identities along a trajectory.
    Verify(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Experiment file (TOML).
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Output directory for CSV artifacts.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Worker threads for sweeps (default: available processors).
    #[arg(long, value_name = "K", value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,
    /// Also write two-column plot data files.
    #[arg(long)]
    pub emit_plot_data: bool,
    /// Write the full trajectory (every step).
    #[arg(long)]
    pub trajectory: bool,
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::Simulate(a)
            | Command::SweepAlpha(a)
            | Command::SweepN(a)
            | Command::Certify(a)
            | Command::Verify(a) => a,
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::HypothesisViolated(_) => EXIT_HYPOTHESIS,
        Error::NonFinitePosition { .. } | Error::DomainExcursion { .. } | Error::InvariantViolation { .. } => {
            EXIT_NUMERICAL
        }
        _ => EXIT_CONFIG,
    }
}

/// Runs one command and returns its exit code. Diagnostics go to stderr.
pub fn run(cli: &Cli) -> u8 {
    let args = cli.command.args();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = args.jobs {
        pool = pool.num_threads(k as usize);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_CONFIG;
        }
    };
    let result = pool.install(|| {
        let cfg = ExperimentConfig::load(&args.config)?;
        match &cli.command {
            Command::Simulate(a) => commands::simulate(&cfg, a),
            Command::SweepAlpha(a) => commands::sweep_alpha(&cfg, a),
            Command::SweepN(a) => commands::sweep_n(&cfg, a),
            Command::Certify(a) => commands::certify(&cfg, a),
            Command::Verify(a) => commands::verify(&cfg, a),
        }
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_CONFIG
            } else {
                EXIT_OK
            }
        }
    }
}
