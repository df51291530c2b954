//! Command-line front end for the `petviashvili` crate: TOML-configured
//! runs, embedded reproduction recipes, and CSV/JSON outputs for plotting.
//!
//! ```text
//! petvi solve    --recipe table1_col12 --out runs/ground
//! petvi spectrum --config my_run.toml
//! petvi continue --recipe fig2
//! petvi orbital  --recipe fig67
//! ```
//!
//! Exit codes: 0 on success (a diverged run is a valid result and is
//! reported in `summary.json`), 2 on configuration errors, 3 on runtime
//! failures.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod model;
pub mod output;
pub mod recipes;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "petvi", version, about = "Stabilized fixed-point solvers for L u = N(u)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve from the configured seed; writes trace.csv, profile.csv and
    /// summary.json.
    Solve(Source),
    /// Eigenvalues of S and F' at a solved or loaded state, with the
    /// hypothesis report.
    Spectrum(Source),
    /// Parameter continuation with per-stage output directories.
    Continue(Source),
    /// Perturbed exact-soliton run with an orbit fit.
    Orbital(Source),
}

#[derive(Debug, Args)]
pub struct Source {
    /// TOML run configuration.
    #[arg(long, required_unless_present = "recipe", conflicts_with = "recipe")]
    pub config: Option<PathBuf>,
    /// Name of an embedded recipe.
    #[arg(long)]
    pub recipe: Option<String>,
    /// Output directory (overrides `output.directory`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Source {
    pub fn load(&self) -> Result<RunConfig, CliError> {
        match (&self.config, &self.recipe) {
            (Some(path), _) => RunConfig::from_path(path),
            (None, Some(name)) => recipes::recipe(name),
            (None, None) => Err(CliError::Config("one of --config or --recipe is required".into())),
        }
    }
}

type CommandFn = fn(&RunConfig, &std::path::Path) -> Result<String, CliError>;

/// Runs one command and returns its terminal report.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let (source, cmd): (&Source, CommandFn) = match &cli.command {
        Command::Solve(s) => (s, commands::cmd_solve),
        Command::Spectrum(s) => (s, commands::cmd_spectrum),
        Command::Continue(s) => (s, commands::cmd_continue),
        Command::Orbital(s) => (s, commands::cmd_orbital),
    };
    let cfg = source.load()?;
    let out = commands::output_dir(&cfg, source.out.as_ref());
    let report = cmd(&cfg, &out)?;
    Ok(format!("{report} -> {}", out.display()))
}
