//! Command-line front end: resolves a scenario from a config file and flags,
//! runs one computation and writes CSV data with a JSON summary sidecar.

pub mod commands;
pub mod config;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{RawConfig, ScenarioConfig};

/// Environment variable holding the worker count for parallel scans.
pub const THREADS_ENV: &str = "PLANARGEO_THREADS";

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags or configuration (exit code 2).
    Usage(String),
    /// Integration or I/O failure (exit code 1).
    Runtime(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    pub fn usage_from(e: planargeo::Error) -> Self {
        Self::Usage(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<planargeo::Error> for CliError {
    fn from(e: planargeo::Error) -> Self {
        match e {
            planargeo::Error::InvalidParameter { .. } | planargeo::Error::InvalidPolarization(_) => {
                Self::Usage(e.to_string())
            }
            other => Self::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Runtime(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "planargeo", version, about = "Orbits, stability zones and ponderomotive analysis for charges in planar waves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub shared: Shared,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Longitudinal orbit with recovered transverse motion (world-line CSV).
    Orbit,
    /// Gaussian curvature on a (t, x) grid.
    Curvature,
    /// Characteristic-function scan with its stability zones.
    Floquet,
    /// Stability zones only.
    Zones,
    /// Hill-equation Jacobi field along the node orbit.
    Jacobi,
    /// Landau decomposition trace with averaged and ponderomotive centers.
    Landau,
    /// Ponderomotive center and rapid oscillation.
    Pondero,
    /// Per-cycle growth table and fitted divergence rates.
    Resonance,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Orbit => "orbit",
            Self::Curvature => "curvature",
            Self::Floquet => "floquet",
            Self::Zones => "zones",
            Self::Jacobi => "jacobi",
            Self::Landau => "landau",
            Self::Pondero => "pondero",
            Self::Resonance => "resonance",
        }
    }
}

/// Flags shared by every subcommand; each one overrides the config key of the same name.
#[derive(Debug, Clone, Default, Args)]
pub struct Shared {
    /// Flat `key = value` config file (an output CSV also works).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output CSV; a JSON summary is written next to it. Defaults to stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Relative integration tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Run length in optical cycles.
    #[arg(long, global = true)]
    pub cycles: Option<f64>,
    #[arg(long, global = true)]
    pub kind: Option<String>,
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    #[arg(long, global = true)]
    pub amplitude: Option<f64>,
    #[arg(long, global = true)]
    pub omega: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub p_y: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub p_z: Option<f64>,
    #[arg(long, global = true)]
    pub eta_min: Option<f64>,
    #[arg(long, global = true)]
    pub eta_max: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub step: Option<f64>,
    /// Any other config key.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl Shared {
    /// Config file contents with the flags applied on top.
    pub fn resolve(&self) -> Result<RawConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RawConfig::load(path)?,
            None => RawConfig::default(),
        };
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        let reals = [
            ("tol", self.tol),
            ("cycles", self.cycles),
            ("eta", self.eta),
            ("amplitude", self.amplitude),
            ("omega", self.omega),
            ("delta", self.delta),
            ("p_y", self.p_y),
            ("p_z", self.p_z),
            ("eta_min", self.eta_min),
            ("eta_max", self.eta_max),
            ("step", self.step),
        ];
        for (key, value) in reals {
            if let Some(v) = value {
                cfg.set(key, &v.to_string())?;
            }
        }
        if let Some(kind) = &self.kind {
            cfg.set("kind", kind)?;
        }
        Ok(cfg)
    }
}

/// Size the global rayon pool from [`THREADS_ENV`], if set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("{THREADS_ENV} must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Runtime(e.to_string()))
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    let cfg = cli.shared.resolve()?;
    commands::dispatch(cli.command, &cfg, cli.shared.out.as_deref())
}
