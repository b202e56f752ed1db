use rayon::prelude::*;

use super::config::{GridPoint, ModeName, RunConfig, Settings};
use super::output::{sweep_row, SWEEP_HEADER};
use super::CliError;
use crate::protocol::{cost_report, simulate, ControlMode};

/// Samples per trace in sweeps; only the final fidelity is reported.
pub const SWEEP_SAMPLES: usize = 2;

pub const PRESETS: [&str; 4] = ["fig1c", "fig2cd", "fig3", "fig4"];

fn axis<T: Copy>(name: &str, v: &Option<Vec<T>>) -> Result<Vec<Option<T>>, CliError> {
    match v {
        None => Ok(vec![None]),
        Some(v) if v.is_empty() => Err(CliError::Config(format!("sweep axis --{name} is empty"))),
        Some(v) => Ok(v.iter().copied().map(Some).collect()),
    }
}

/// Expands list-valued settings into grid points, ordered by mode, N, M,
/// tau_q, eta. `eta` only multiplies `window` rows.
pub fn expand_grid(s: &Settings) -> Result<Vec<RunConfig>, CliError> {
    let modes = match s.modes()? {
        Some(m) if m.is_empty() => return Err(CliError::Config("sweep axis --mode is empty".into())),
        Some(m) => m,
        None if s.eta.is_some() => vec![ModeName::Window],
        None => vec![ModeName::Impulse],
    };
    let (ns, truncs, taus, etas) = (axis("n", &s.n)?, axis("trunc", &s.trunc)?, axis("tauq", &s.tauq)?, axis("eta", &s.eta)?);
    let mut out = Vec::new();
    for &mode in &modes {
        for &n in &ns {
            for &trunc in &truncs {
                for &tau_q in &taus {
                    let eta_axis: &[Option<f64>] = if mode == ModeName::Window { &etas } else { &[None] };
                    for &eta in eta_axis {
                        let mut cfg = s.resolve(&GridPoint { mode, tau_q, n, trunc, eta })?;
                        if s.samples.is_none() {
                            cfg.samples = SWEEP_SAMPLES;
                        }
                        out.push(cfg);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn apply_overrides(mut cfg: RunConfig, s: &Settings) -> RunConfig {
    cfg.steepness = s.m.or(cfg.steepness);
    cfg.steps = s.steps.or(cfg.steps);
    cfg.samples = s.samples.unwrap_or(SWEEP_SAMPLES);
    cfg
}

/// Parameter grids behind the published figures.
pub fn preset(name: &str, s: &Settings) -> Result<Vec<RunConfig>, CliError> {
    let mut out = Vec::new();
    match name {
        "fig1c" => {
            for tau in [0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 7.5, 10.0, 15.0, 20.0, 25.0] {
                for j in 0..=10 {
                    let eta = 0.5 * tau * j as f64 / 10.0;
                    out.push(RunConfig::lz(ControlMode::Window { eta }, tau));
                }
                out.push(RunConfig::lz(ControlMode::Impulse, tau));
            }
        }
        "fig2cd" => {
            for mode in [ControlMode::Uncontrolled, ControlMode::Impulse] {
                for n in (4..=20).step_by(2) {
                    for tau in [0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0, 15.0, 20.0, 25.0] {
                        out.push(RunConfig::tfim_momentum(mode, n, tau));
                    }
                }
            }
        }
        "fig3" => {
            for n in [4, 8, 12, 18] {
                for tau in [0.5, 1.0, 2.0, 3.0, 5.0, 7.5, 10.0, 15.0, 20.0, 25.0] {
                    out.push(RunConfig::tfim_momentum(ControlMode::Impulse, n, tau));
                }
            }
        }
        "fig4" => {
            for mode in [ControlMode::Full, ControlMode::Impulse] {
                for trunc in 0..=3 {
                    for j in 1..=20 {
                        out.push(RunConfig::tfim_spin(mode, 6, trunc, 0.5 * j as f64));
                    }
                }
            }
        }
        other => {
            return Err(CliError::Config(format!("unknown preset '{other}' (expected one of {})", PRESETS.join(", "))))
        }
    }
    Ok(out.into_iter().map(|c| apply_overrides(c, s)).collect())
}

/// Final fidelity and costs of one grid point, as a CSV row.
pub fn evaluate(cfg: &RunConfig) -> Result<String, CliError> {
    let built = cfg.build()?;
    let model = built.as_model();
    let protocol = cfg.protocol();
    let result = simulate(model, &protocol)?;
    let costs = cost_report(model, &protocol)?;
    Ok(sweep_row(cfg, result.trace.final_fidelity(), &costs))
}

/// Runs every point (in parallel) and returns the CSV in grid order.
pub fn run_sweep(points: &[RunConfig]) -> Result<String, CliError> {
    if points.is_empty() {
        return Err(CliError::Config("empty sweep grid".into()));
    }
    let rows: Vec<String> = points.par_iter().map(evaluate).collect::<Result<_, _>>()?;
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for row in rows {
        csv.push_str(&row);
        csv.push('\n');
    }
    Ok(csv)
}
