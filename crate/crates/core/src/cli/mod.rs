//! `clockscatter` command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

mod commands;
pub mod config;
pub mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::error::ScatterError;
pub use config::RunConfig;
use format::{render_csv, render_json, Metadata};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl From<ScatterError> for CliError {
    fn from(e: ScatterError) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FringeKind {
    Ramsey,
    Rabi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShiftKind {
    Ramsey,
    Rabi,
    EnsembleRamsey,
    EnsembleRabi,
}

#[derive(Debug, Parser)]
#[command(name = "clockscatter", version, about = "Scattering corrections to atomic-clock spectroscopy")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; `-` or `stdout` writes to standard output.
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Seed for stochastic commands; overrides the `seed` config key.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Also run the interference-integral oracle (check only).
    #[arg(long, global = true)]
    pub slow: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detection probability against phase (Ramsey) or detuning (Rabi).
    Fringe {
        #[arg(long, value_enum, default_value = "ramsey")]
        kind: FringeKind,
    },
    /// Central-fringe frequency shift.
    Shift {
        #[arg(long, value_enum, default_value = "ramsey")]
        kind: ShiftKind,
    },
    /// Rabi and Ramsey shifts against collision time.
    Fig1,
    /// Expected scattering events per interrogation.
    Nsc,
    /// Sensitivity limits per strategy over a mass grid.
    Table1,
    /// Monte Carlo statistics of the single-event Rabi shift.
    Mc,
    /// Forward-only vs full-detection classification.
    Regime,
    /// Optical-theorem and partial-wave equivalence suites.
    Check,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Fringe { .. } => "fringe",
            Command::Shift { .. } => "shift",
            Command::Fig1 => "fig1",
            Command::Nsc => "nsc",
            Command::Table1 => "table1",
            Command::Mc => "mc",
            Command::Regime => "regime",
            Command::Check => "check",
        }
    }

    fn default_format(&self) -> OutputFormat {
        match self {
            Command::Fringe { .. } | Command::Fig1 | Command::Table1 => OutputFormat::Csv,
            _ => OutputFormat::Json,
        }
    }
}

/// Result of a subcommand before rendering.
pub struct Outcome {
    pub payload: format::Payload,
    pub seed: Option<u64>,
    pub notes: Vec<String>,
    /// Set when a check failed; the output is still written.
    pub failed: bool,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("clockscatter: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let outcome = commands::dispatch(&cli.command, &cfg, cli)?;
    let meta = Metadata {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name().to_string(),
        seed: outcome.seed,
        rng: crate::ensemble::RNG_NAME,
        config: serde_json::to_value(&cfg).expect("config serializes"),
    };
    let text = match cli.format.unwrap_or(cli.command.default_format()) {
        OutputFormat::Csv => render_csv(&meta, &outcome.payload),
        OutputFormat::Json => render_json(&meta, &outcome.payload),
    };
    let mut notes = outcome.notes;
    notes.dedup();
    for note in notes {
        eprintln!("warning: {note}");
    }
    match cli.out.as_deref() {
        None | Some("-") | Some("stdout") => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Config(format!("cannot write output: {e}")))?;
        }
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {path}: {e}")))?,
    }
    Ok(if outcome.failed { EXIT_NUMERIC } else { EXIT_OK })
}
