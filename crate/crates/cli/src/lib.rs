//! Batch runner for the `grover-noise` simulations.
//!
//! Every experiment is a pure function of an [`ExperimentConfig`], built
//! from a `key = value` file (`--config`) overlaid with command-line flags,
//! and produces a [`ResultTable`] written as CSV or JSON.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 numerical
//! invariant violation.

pub mod config;
pub mod experiments;
pub mod table;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::Parser;

pub use config::{Experiment, ExperimentConfig, NoiseKind};
pub use experiments::{run, Outcome};
pub use table::{format_g, Format, ResultTable};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Invariant(String),
    Io(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn from_config(e: grover_noise::Error) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Invariant(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Invariant(m) => write!(f, "invariant violation: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<grover_noise::Error> for CliError {
    fn from(e: grover_noise::Error) -> Self {
        match e {
            grover_noise::Error::InvariantViolation { .. } | grover_noise::Error::FactorizationFailed { .. } => {
                CliError::Invariant(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

/// Flags mirror the config-file keys; lists are comma separated.
#[derive(Parser, Debug)]
#[command(name = "grover-noise", version, about = "Grover search under correlated noise: batch experiments")]
pub struct Cli {
    /// Experiment to run (may instead come from the config file)
    #[arg(value_enum)]
    pub experiment: Option<Experiment>,
    /// `key = value` file; flags override its entries
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of qubits [default: 5; 3 for cpdiv and dilation-check]
    #[arg(long)]
    pub n: Option<String>,
    /// Marked basis index [default: 0]
    #[arg(long)]
    pub marked: Option<String>,
    /// x | y | z | identity | hadamard | custom:ar,ai,br,bi,theta [default: x]
    #[arg(long)]
    pub noise: Option<String>,
    /// Noise strengths, noise on the first m qubits [default: 1]
    #[arg(long)]
    pub m: Option<String>,
    /// Explicit noisy qubits (overrides --m)
    #[arg(long)]
    pub positions: Option<String>,
    /// Stationary noise probabilities [default: 0.5]
    #[arg(long)]
    pub p: Option<String>,
    /// Memory parameters [default: 0.5]
    #[arg(long)]
    pub mu: Option<String>,
    /// Grover steps [default: 25; 10 for ideal and oracle-check]
    #[arg(long)]
    pub steps: Option<String>,
    /// Bath temperatures for `thermal` [default: 0.5,1,2]
    #[arg(long)]
    pub temps: Option<String>,
    /// Random states per dilation check [default: 20]
    #[arg(long)]
    pub trials: Option<String>,
    /// Seed for the dilation check [default: 7]
    #[arg(long)]
    pub seed: Option<String>,
    /// csv | json [default: csv]
    #[arg(long)]
    pub format: Option<String>,
    /// Output file [default: stdout]
    #[arg(long)]
    pub output: Option<String>,
    /// Worker threads for sweeps [default: all cores]
    #[arg(long)]
    pub jobs: Option<String>,
}

impl Cli {
    /// Config-file entries overlaid with the flags that were given.
    pub fn merged(&self) -> Result<BTreeMap<String, String>, CliError> {
        let mut map = match &self.config {
            Some(path) => config::read_config_file(path)?,
            None => BTreeMap::new(),
        };
        let flags = [
            ("n", &self.n),
            ("marked", &self.marked),
            ("noise", &self.noise),
            ("m", &self.m),
            ("positions", &self.positions),
            ("p", &self.p),
            ("mu", &self.mu),
            ("steps", &self.steps),
            ("temps", &self.temps),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("format", &self.format),
            ("output", &self.output),
            ("jobs", &self.jobs),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                map.insert(k.to_string(), v.clone());
            }
        }
        if let Some(e) = self.experiment {
            map.insert("experiment".into(), e.name().into());
        }
        Ok(map)
    }
}

/// Parses, runs and emits; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("grover-noise: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = ExperimentConfig::from_map(&cli.merged()?)?;
    let outcome = run(&cfg)?;
    outcome.table.emit(cfg.format, cfg.output.as_deref())?;
    match outcome.failure {
        Some(what) => Err(CliError::Invariant(what)),
        None => Ok(()),
    }
}
