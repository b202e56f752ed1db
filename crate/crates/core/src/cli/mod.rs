//! Command-line front end: single runs, sweeps, window and cost queries.

pub mod config;
pub mod output;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use thiserror::Error;

pub use config::{ModelKind, RunConfig, Settings};

use crate::error::Error;
use crate::protocol::{cost_report, run_protocol};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Config(_) | CliError::Io { .. } => EXIT_CONFIG,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::TooLarge { .. } | Error::Unsupported(_) => CliError::Config(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "impulse-cd", version, about = "Counterdiabatic control restricted to the impulse regime")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one configuration; writes trace.csv and summary.json to --out.
    Run(Flags),
    /// Simulate a grid (comma-separated axes or --preset) into one CSV.
    Sweep(Flags),
    /// Print the adiabatic-impulse crossover times.
    Window(Flags),
    /// Print the control cost, savings and lower bound.
    Cost(Flags),
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    /// lz, tfim-momentum or tfim-spin.
    #[arg(long)]
    pub model: Option<String>,
    /// none, full, impulse or window.
    #[arg(long, value_delimiter = ',')]
    pub mode: Vec<String>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub tauq: Vec<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub g0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Counterdiabatic range M for tfim-spin (0 = no control).
    #[arg(long, value_delimiter = ',')]
    pub trunc: Vec<usize>,
    /// Switching steepness.
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<f64>,
    /// Half-width of the control window for mode `window`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub eta: Vec<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with flat keys named like the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
}

fn non_empty<T>(v: Vec<T>) -> Option<Vec<T>> {
    (!v.is_empty()).then_some(v)
}

impl Flags {
    /// Config file values overlaid by explicit flags.
    pub fn settings(self) -> Result<Settings, CliError> {
        let base = match &self.config {
            Some(path) => Settings::from_file(path)?,
            None => Settings::default(),
        };
        let flags = Settings {
            model: self.model,
            mode: non_empty(self.mode),
            tauq: non_empty(self.tauq),
            g0: self.g0,
            delta: self.delta,
            omega: self.omega,
            n: non_empty(self.n),
            trunc: non_empty(self.trunc),
            m: self.m,
            eta: non_empty(self.eta),
            steps: self.steps,
            samples: self.samples,
            out: self.out,
            preset: self.preset,
        };
        Ok(base.overlay(flags))
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn reject_preset(s: &Settings) -> Result<(), CliError> {
    match &s.preset {
        Some(_) => Err(CliError::Config("--preset is only valid for `sweep`".into())),
        None => Ok(()),
    }
}

pub fn cmd_run(s: &Settings, stdout: &mut dyn Write) -> Result<(), CliError> {
    reject_preset(s)?;
    let cfg = s.single()?;
    let built = cfg.build()?;
    let result = run_protocol(built.as_model(), &cfg.protocol())?;
    let summary = output::to_json_text(&output::summary_json(&cfg, &result));
    if let Some(dir) = &s.out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        write_file(&dir.join("trace.csv"), &output::trace_csv(&result.trace))?;
        write_file(&dir.join("summary.json"), &summary)?;
    }
    emit(stdout, &summary)
}

pub fn cmd_sweep(s: &Settings, stdout: &mut dyn Write) -> Result<(), CliError> {
    let points = match &s.preset {
        Some(name) => sweep::preset(name, s)?,
        None => sweep::expand_grid(s)?,
    };
    let csv = sweep::run_sweep(&points)?;
    match &s.out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
            }
            write_file(path, &csv)
        }
        None => emit(stdout, &csv),
    }
}

fn header(cfg: &RunConfig) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("model".into(), json!(cfg.model.name()));
    m.insert("tauq".into(), output::num(cfg.tau_q));
    m.insert("g0".into(), output::num(cfg.g0));
    if cfg.model != ModelKind::Lz {
        m.insert("n".into(), json!(cfg.n));
    }
    m
}

pub fn cmd_window(s: &Settings, stdout: &mut dyn Write) -> Result<(), CliError> {
    reject_preset(s)?;
    let cfg = s.single()?;
    let w = cfg.build()?.window()?;
    let mut m = header(&cfg);
    m.insert("t_minus".into(), output::num(w.t_minus));
    m.insert("t_plus".into(), output::num(w.t_plus));
    m.insert("mu".into(), output::num(w.half_width()));
    emit(stdout, &output::to_json_text(&Value::Object(m)))
}

pub fn cmd_cost(s: &Settings, stdout: &mut dyn Write) -> Result<(), CliError> {
    reject_preset(s)?;
    let cfg = s.single()?;
    let built = cfg.build()?;
    let costs = cost_report(built.as_model(), &cfg.protocol())?;
    let mut m = header(&cfg);
    m.insert("mode".into(), json!(cfg.mode.name()));
    output::costs_json(&costs, &mut m);
    emit(stdout, &output::to_json_text(&Value::Object(m)))
}

fn emit(stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    stdout.write_all(text.as_bytes()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Run(f) => cmd_run(&f.settings()?, stdout),
        Command::Sweep(f) => cmd_sweep(&f.settings()?, stdout),
        Command::Window(f) => cmd_window(&f.settings()?, stdout),
        Command::Cost(f) => cmd_cost(&f.settings()?, stdout),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
