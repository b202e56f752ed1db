use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer};

use super::CliError;
use crate::kzm::ImpulseWindow;
use crate::lz::LzParams;
use crate::protocol::{ControlMode, ControlledModel, Protocol, DEFAULT_SAMPLES};
use crate::tfim::{MomentumModel, SpinModel, TfimParams, TruncationRange};

pub const DEFAULT_TAU_Q: f64 = 5.0;
pub const LZ_DEFAULT_G0: f64 = -10.0;
pub const MOMENTUM_DEFAULT_G0: f64 = 0.0;
pub const SPIN_DEFAULT_G0: f64 = 0.01;
pub const MOMENTUM_DEFAULT_N: usize = 16;
pub const SPIN_DEFAULT_N: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Lz,
    TfimMomentum,
    TfimSpin,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Lz => "lz",
            ModelKind::TfimMomentum => "tfim-momentum",
            ModelKind::TfimSpin => "tfim-spin",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "lz" => Ok(ModelKind::Lz),
            "tfim" | "tfim-momentum" => Ok(ModelKind::TfimMomentum),
            "tfim-spin" => Ok(ModelKind::TfimSpin),
            other => Err(CliError::Config(format!("unknown model '{other}' (expected lz, tfim-momentum or tfim-spin)"))),
        }
    }
}

/// Control mode as written on the command line; `window` needs an `eta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeName {
    None,
    Full,
    Impulse,
    Window,
}

impl ModeName {
    pub fn name(&self) -> &'static str {
        match self {
            ModeName::None => "none",
            ModeName::Full => "full",
            ModeName::Impulse => "impulse",
            ModeName::Window => "window",
        }
    }

    fn resolve(self, eta: Option<f64>) -> Result<ControlMode, CliError> {
        Ok(match self {
            ModeName::None => ControlMode::Uncontrolled,
            ModeName::Full => ControlMode::Full,
            ModeName::Impulse => ControlMode::Impulse,
            ModeName::Window => ControlMode::Window {
                eta: eta.ok_or_else(|| CliError::Config("mode 'window' requires --eta".into()))?,
            },
        })
    }
}

impl FromStr for ModeName {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "none" | "uncontrolled" => Ok(ModeName::None),
            "full" => Ok(ModeName::Full),
            "impulse" => Ok(ModeName::Impulse),
            "window" => Ok(ModeName::Window),
            other => Err(CliError::Config(format!("unknown mode '{other}' (expected none, full, impulse or window)"))),
        }
    }
}

fn one_or_many<'de, D, T>(d: D) -> Result<Option<Vec<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(Some(match OneOrMany::deserialize(d)? {
        OneOrMany::One(v) => vec![v],
        OneOrMany::Many(v) => v,
    }))
}

/// Flat settings shared by the config file and the command line. List-valued
/// keys are sweep axes; `run` accepts only one value per axis.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub model: Option<String>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub mode: Option<Vec<String>>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub tauq: Option<Vec<f64>>,
    pub g0: Option<f64>,
    pub delta: Option<f64>,
    pub omega: Option<f64>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub n: Option<Vec<usize>>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub trunc: Option<Vec<usize>>,
    pub m: Option<f64>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub eta: Option<Vec<f64>>,
    pub steps: Option<usize>,
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
    pub preset: Option<String>,
}

macro_rules! overlay_fields {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f; } )*
    };
}

impl Settings {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Values set in `other` replace those in `self`.
    pub fn overlay(mut self, other: Settings) -> Self {
        overlay_fields!(self, other; model, mode, tauq, g0, delta, omega, n, trunc, m, eta, steps, samples, out, preset);
        self
    }

    pub fn model_kind(&self) -> Result<ModelKind, CliError> {
        self.model.as_deref().unwrap_or("lz").parse()
    }

    pub fn modes(&self) -> Result<Option<Vec<ModeName>>, CliError> {
        self.mode.as_ref().map(|v| v.iter().map(|s| s.parse()).collect()).transpose()
    }

    /// The single configuration described by scalar settings.
    pub fn single(&self) -> Result<RunConfig, CliError> {
        fn one<T: Copy>(name: &str, v: &Option<Vec<T>>) -> Result<Option<T>, CliError> {
            match v.as_deref() {
                None => Ok(None),
                Some([x]) => Ok(Some(*x)),
                Some(_) => Err(CliError::Config(format!("--{name} takes a single value here; use `sweep` for lists"))),
            }
        }
        let modes = self.modes()?;
        let mode = one("mode", &modes)?;
        let eta = one("eta", &self.eta)?;
        let mode = mode.unwrap_or(if eta.is_some() { ModeName::Window } else { ModeName::Impulse });
        let point = GridPoint { mode, tau_q: one("tauq", &self.tauq)?, n: one("n", &self.n)?, trunc: one("trunc", &self.trunc)?, eta };
        self.resolve(&point)
    }

    pub(crate) fn resolve(&self, p: &GridPoint) -> Result<RunConfig, CliError> {
        let model = self.model_kind()?;
        let g0 = self.g0.unwrap_or(match model {
            ModelKind::Lz => LZ_DEFAULT_G0,
            ModelKind::TfimMomentum => MOMENTUM_DEFAULT_G0,
            ModelKind::TfimSpin => SPIN_DEFAULT_G0,
        });
        let n = match model {
            ModelKind::Lz => 0,
            ModelKind::TfimMomentum => p.n.unwrap_or(MOMENTUM_DEFAULT_N),
            ModelKind::TfimSpin => p.n.unwrap_or(SPIN_DEFAULT_N),
        };
        let trunc = match model {
            ModelKind::TfimSpin => p.trunc.unwrap_or(n / 2),
            _ => 0,
        };
        let eta = match p.mode {
            ModeName::Window => p.eta,
            _ => None,
        };
        let cfg = RunConfig {
            model,
            mode: p.mode.resolve(eta)?,
            tau_q: p.tau_q.unwrap_or(DEFAULT_TAU_Q),
            g0,
            delta: self.delta.unwrap_or(1.0),
            omega: self.omega.unwrap_or(1.0),
            n,
            trunc,
            steepness: self.m,
            steps: self.steps,
            samples: self.samples.unwrap_or(DEFAULT_SAMPLES),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// One point of a sweep before defaults are applied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct GridPoint {
    pub mode: ModeName,
    pub tau_q: Option<f64>,
    pub n: Option<usize>,
    pub trunc: Option<usize>,
    pub eta: Option<f64>,
}

/// A fully specified single run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub mode: ControlMode,
    pub tau_q: f64,
    pub g0: f64,
    pub delta: f64,
    pub omega: f64,
    /// Chain length (TFIM only).
    pub n: usize,
    /// Counterdiabatic range `M` (spin basis only); 0 means no control.
    pub trunc: usize,
    /// Switching steepness `m`; `None` uses the model default.
    pub steepness: Option<f64>,
    pub steps: Option<usize>,
    pub samples: usize,
}

impl RunConfig {
    pub fn lz(mode: ControlMode, tau_q: f64) -> Self {
        Self {
            model: ModelKind::Lz,
            mode,
            tau_q,
            g0: LZ_DEFAULT_G0,
            delta: 1.0,
            omega: 1.0,
            n: 0,
            trunc: 0,
            steepness: None,
            steps: None,
            samples: DEFAULT_SAMPLES,
        }
    }

    pub fn tfim_momentum(mode: ControlMode, n: usize, tau_q: f64) -> Self {
        Self { model: ModelKind::TfimMomentum, n, g0: MOMENTUM_DEFAULT_G0, ..Self::lz(mode, tau_q) }
    }

    pub fn tfim_spin(mode: ControlMode, n: usize, trunc: usize, tau_q: f64) -> Self {
        Self { model: ModelKind::TfimSpin, n, trunc, g0: SPIN_DEFAULT_G0, ..Self::lz(mode, tau_q) }
    }

    fn validate(&self) -> Result<(), CliError> {
        if let Some(m) = self.steepness {
            if !(m > 0.0 && m.is_finite()) {
                return Err(CliError::Config(format!("--m must be positive, got {m}")));
            }
        }
        if self.steps == Some(0) {
            return Err(CliError::Config("--steps must be at least 1".into()));
        }
        if self.samples < 2 {
            return Err(CliError::Config("--samples must be at least 2".into()));
        }
        if self.model == ModelKind::TfimSpin && self.trunc > self.n / 2 {
            return Err(CliError::Config(format!("--trunc must be at most N/2 = {}", self.n / 2)));
        }
        self.build().map(|_| ())
    }

    /// Mode actually simulated: range 0 means the bare ramp.
    pub fn effective_mode(&self) -> ControlMode {
        if self.model == ModelKind::TfimSpin && self.trunc == 0 {
            ControlMode::Uncontrolled
        } else {
            self.mode
        }
    }

    pub fn protocol(&self) -> Protocol {
        Protocol {
            mode: self.effective_mode(),
            steepness: self.steepness,
            steps: self.steps,
            samples: self.samples,
            cost_exponent: 1,
        }
    }

    pub fn build(&self) -> Result<BuiltModel, CliError> {
        Ok(match self.model {
            ModelKind::Lz => BuiltModel::Lz(LzParams::new(self.delta, self.g0, self.tau_q)?),
            ModelKind::TfimMomentum => {
                BuiltModel::Momentum(MomentumModel::new(TfimParams::new(self.n, self.omega, self.g0, self.tau_q)?))
            }
            ModelKind::TfimSpin => {
                let p = TfimParams::new(self.n, self.omega, self.g0, self.tau_q)?;
                let range = if self.trunc == 0 { TruncationRange::full(self.n) } else { TruncationRange::new(self.trunc, self.n)? };
                BuiltModel::Spin(Box::new(SpinModel::new(p, range)?))
            }
        })
    }
}

pub enum BuiltModel {
    Lz(LzParams),
    Momentum(MomentumModel),
    Spin(Box<SpinModel>),
}

impl BuiltModel {
    pub fn as_model(&self) -> &dyn ControlledModel {
        match self {
            BuiltModel::Lz(m) => m,
            BuiltModel::Momentum(m) => m,
            BuiltModel::Spin(m) => m.as_ref(),
        }
    }

    pub fn window(&self) -> Result<ImpulseWindow, CliError> {
        Ok(self.as_model().impulse_window()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_and_list_keys() {
        let s = Settings::from_json(r#"{"model": "lz", "tauq": [1, 2.5], "mode": "full", "g0": -5}"#).unwrap();
        assert_eq!(s.tauq, Some(vec![1.0, 2.5]));
        assert_eq!(s.mode, Some(vec!["full".to_string()]));
        assert_eq!(s.g0, Some(-5.0));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(Settings::from_json(r#"{"tau": 1}"#), Err(CliError::Config(_))));
    }

    #[test]
    fn overlay_prefers_flags() {
        let file = Settings { tauq: Some(vec![1.0]), g0: Some(-3.0), ..Default::default() };
        let flags = Settings { tauq: Some(vec![7.0]), ..Default::default() };
        let merged = file.overlay(flags);
        assert_eq!(merged.tauq, Some(vec![7.0]));
        assert_eq!(merged.g0, Some(-3.0));
    }

    #[test]
    fn defaults_follow_model() {
        let lz = Settings::default().single().unwrap();
        assert_eq!((lz.model, lz.g0, lz.mode), (ModelKind::Lz, -10.0, ControlMode::Impulse));
        let spin = Settings { model: Some("tfim-spin".into()), ..Default::default() }.single().unwrap();
        assert_eq!((spin.n, spin.trunc, spin.g0), (6, 3, 0.01));
        let mom = Settings { model: Some("tfim".into()), ..Default::default() }.single().unwrap();
        assert_eq!((mom.n, mom.g0), (16, 0.0));
    }

    #[test]
    fn eta_implies_window() {
        let s = Settings { eta: Some(vec![0.3]), ..Default::default() }.single().unwrap();
        assert_eq!(s.mode, ControlMode::Window { eta: 0.3 });
        let bad = Settings { mode: Some(vec!["window".into()]), ..Default::default() };
        assert!(bad.single().is_err());
    }

    #[test]
    fn lists_rejected_for_single_runs() {
        let s = Settings { tauq: Some(vec![1.0, 2.0]), ..Default::default() };
        assert!(matches!(s.single(), Err(CliError::Config(_))));
    }

    #[test]
    fn invalid_physics_is_a_config_error() {
        let s = Settings { model: Some("tfim".into()), n: Some(vec![5]), ..Default::default() };
        assert!(matches!(s.single(), Err(CliError::Config(_))));
        let s = Settings { tauq: Some(vec![-1.0]), ..Default::default() };
        assert!(matches!(s.single(), Err(CliError::Config(_))));
        let s = Settings { model: Some("tfim-spin".into()), trunc: Some(vec![4]), ..Default::default() };
        assert!(matches!(s.single(), Err(CliError::Config(_))));
    }

    #[test]
    fn zero_range_runs_uncontrolled() {
        let cfg = RunConfig::tfim_spin(ControlMode::Impulse, 6, 0, 2.0);
        assert_eq!(cfg.effective_mode(), ControlMode::Uncontrolled);
    }
}
