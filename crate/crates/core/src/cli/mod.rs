//! The `pathperc` command line.
//!
//! Exit codes: 0 success, 1 runtime or I/O failure, 2 usage error,
//! 3 non-convergence, 4 partial replica failure.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub use config::Settings;

use crate::error::Error;
use crate::replicas::{resolve_workers, with_workers};
use crate::rng::PRNG_NAME;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_PARTIAL: i32 = 4;

pub const GIT_HASH: &str = env!("PATHPERC_GIT_HASH");

#[derive(Debug, Parser)]
#[command(name = "pathperc", version, about = "Path percolation simulations and rate-equation theory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Generate,
    Run,
    Steady,
    Sweep,
    Threshold,
    Solve,
    Predict,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an initial topology as an edge list.
    Generate(Invocation),
    /// Record full trajectories.
    Run(Invocation),
    /// Steady-state observables at one (N, alpha).
    Steady(Invocation),
    /// Steady-state availability over a grid of sizes and rates.
    Sweep(Invocation),
    /// Threshold rate by bisection, optionally with a two-size crossing.
    Threshold(Invocation),
    /// Steady state of the rate equation.
    Solve(Invocation),
    /// Closed-form thresholds and removed-length prediction.
    Predict(Invocation),
}

#[derive(Debug, Clone, Args)]
pub struct Invocation {
    /// TOML settings file, or a manifest from an earlier run.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads for replicas (default: PATHPERC_WORKERS, then all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub settings: Settings,
}

impl Command {
    fn split(self) -> (CommandKind, Invocation) {
        match self {
            Self::Generate(i) => (CommandKind::Generate, i),
            Self::Run(i) => (CommandKind::Run, i),
            Self::Steady(i) => (CommandKind::Steady, i),
            Self::Sweep(i) => (CommandKind::Sweep, i),
            Self::Threshold(i) => (CommandKind::Threshold, i),
            Self::Solve(i) => (CommandKind::Solve, i),
            Self::Predict(i) => (CommandKind::Predict, i),
        }
    }
}

/// What a command hands back for the manifest.
#[derive(Debug, Default)]
pub struct Report {
    pub outputs: Vec<String>,
    pub summary: serde_json::Value,
    pub converged: bool,
    pub failures: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: CommandKind,
    version: &'static str,
    git_hash: &'static str,
    prng: &'static str,
    config: &'a Settings,
    wall_time_s: f64,
    outputs: &'a [String],
    converged: bool,
    replica_failures: &'a [String],
    summary: &'a serde_json::Value,
}

/// Failure classes of a command, mapped onto exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(Error),
    #[error("{0}")]
    NotConverged(Error),
    #[error("{0}")]
    Runtime(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Parse { .. } => Self::Usage(e),
            Error::Bracket(_) => Self::NotConverged(e),
            other => Self::Runtime(other),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(CliError::Usage(e)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(CliError::NotConverged(e)) => {
            eprintln!("error: {e}");
            EXIT_NOT_CONVERGED
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

pub fn main() -> i32 {
    run_from(std::env::args_os())
}

fn execute(command: Command) -> Result<i32, CliError> {
    let (kind, inv) = command.split();
    let file = match &inv.config {
        Some(p) => Settings::load(p)?,
        None => Settings::default(),
    };
    let cfg = inv.settings.over(file).resolved();
    cfg.validate()?;
    let workers = resolve_workers(inv.workers)?;
    let out = config::need(&cfg.output_dir, "output_dir")?;

    let start = Instant::now();
    let report = with_workers(workers, || commands::dispatch(kind, &cfg, &out))??;
    let wall_time_s = start.elapsed().as_secs_f64();

    write_manifest(&out, kind, &cfg, &report, wall_time_s)?;
    Ok(if !report.failures.is_empty() {
        for f in &report.failures {
            eprintln!("replica failed: {f}");
        }
        EXIT_PARTIAL
    } else if !report.converged {
        EXIT_NOT_CONVERGED
    } else {
        EXIT_OK
    })
}

fn write_manifest(out: &Path, command: CommandKind, cfg: &Settings, report: &Report, wall_time_s: f64) -> crate::Result<()> {
    let manifest = Manifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        git_hash: GIT_HASH,
        prng: PRNG_NAME,
        config: cfg,
        wall_time_s,
        outputs: &report.outputs,
        converged: report.converged,
        replica_failures: &report.failures,
        summary: &report.summary,
    };
    crate::output::write_json(out.join("manifest.json"), &manifest)
}
