//! Command-line front end for the cavity-magnon repeater simulator.

pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use magrep_core::network::{ScenarioParams, SweepAxis};

pub use commands::{run, Artifact};
pub use config::{load_config, parse_config, scenario_to_config, settings_to_config, Settings};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[source] magrep_core::Error),
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}

impl From<magrep_core::Error> for CliError {
    fn from(e: magrep_core::Error) -> Self {
        use magrep_core::Error as E;
        match e {
            E::UnknownScenario { .. } | E::OutOfRange { .. } | E::Shape(_) => CliError::Config(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Cavity-magnon pair generation under Lindblad dynamics.
    Pair,
    /// Two-stage entanglement swapping over four nodes.
    Swap,
    /// Hop-by-hop fidelity and success of a repeater chain.
    Chain,
    /// Chain evaluated over a range of one parameter.
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Pair => "pair",
            Command::Swap => "swap",
            Command::Chain => "chain",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "magrep", version, about = "Cavity-magnon quantum repeater simulator")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// Built-in scenario (chip-a, chip-b, chip-c, metro-a, metro-b, metro-c).
    #[arg(long)]
    pub scenario: Option<String>,
    /// Number of repeater hops
    #[arg(long)]
    pub hops: Option<usize>,
    /// `key = value [unit]` configuration file, applied before the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed for sampled Bell-state measurements
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory, created if missing
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "csv")]
    pub format: Vec<Format>,
    /// Replace the scenario's single-channel click probability.
    #[arg(long)]
    pub pclick_override: Option<f64>,
    /// Switch off all dissipation in the pair dynamics.
    #[arg(long)]
    pub ideal: bool,
    /// Swept parameter: mux, conv, hops or length
    #[arg(long, value_parser = parse_axis)]
    pub sweep_axis: Option<SweepAxis>,
    /// Comma-separated values for the swept parameter
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub sweep_values: Vec<f64>,
}

fn parse_axis(s: &str) -> Result<SweepAxis, String> {
    s.parse()
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub settings: Settings,
    pub output_dir: PathBuf,
    pub csv: bool,
    pub svg: bool,
}

impl RunConfig {
    pub fn new(command: Command, settings: Settings, output_dir: impl Into<PathBuf>) -> Self {
        Self { command, settings, output_dir: output_dir.into(), csv: true, svg: false }
    }

    /// Config file first, then command-line overrides.
    pub fn from_args(args: &Args) -> Result<Self, CliError> {
        let mut s = match &args.config {
            Some(path) => load_config(path)?,
            None => Settings::default(),
        };
        if let Some(name) = &args.scenario {
            s.scenario = ScenarioParams::builtin(name)?;
        }
        if let Some(h) = args.hops {
            s.hops = h;
        }
        if let Some(seed) = args.seed {
            s.seed = seed;
        }
        if args.pclick_override.is_some() {
            s.pclick_override = args.pclick_override;
        }
        if args.ideal {
            s.ideal = true;
        }
        if args.sweep_axis.is_some() {
            s.sweep_axis = args.sweep_axis;
        }
        if !args.sweep_values.is_empty() {
            s.sweep_values = args.sweep_values.clone();
        }
        let cfg = Self {
            command: args.command,
            settings: s,
            output_dir: args.out.clone(),
            csv: args.format.contains(&Format::Csv),
            svg: args.format.contains(&Format::Svg),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let s = &self.settings;
        if !(self.csv || self.svg) {
            return Err(CliError::Config("at least one output format is required".into()));
        }
        s.scenario.validate()?;
        s.noise.validate()?;
        s.lindblad.validate()?;
        if s.hops == 0 {
            return Err(CliError::Config("hops must be at least 1".into()));
        }
        if self.command == Command::Sweep {
            if s.sweep_axis.is_none() {
                return Err(CliError::Config("sweep needs --sweep-axis (mux, conv, hops or length)".into()));
            }
            if s.sweep_values.is_empty() {
                return Err(CliError::Config("sweep needs at least one --sweep-values entry".into()));
            }
        }
        Ok(())
    }
}

/// Parses, runs and writes; returns the files written.
pub fn run_from_args(args: &Args) -> Result<Vec<PathBuf>, CliError> {
    let cfg = RunConfig::from_args(args)?;
    let artifacts = run(&cfg)?;
    commands::write_artifacts(&cfg.output_dir, &artifacts)
}
