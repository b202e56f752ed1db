//! Linear ramps, adiabatic-impulse crossover times and Kibble-Zurek scaling.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::bisect_root_default;

/// Default switching steepness for the Landau-Zener model, in units of Δ.
pub const LZ_DEFAULT_STEEPNESS: f64 = 400.0;
/// Default switching steepness for the Ising model, in units of ω.
pub const TFIM_DEFAULT_STEEPNESS: f64 = 100.0;

/// Linear drive `g(t) = g0 + 2 (g_c - g0) t / tau_q`, crossing `g_c` at the
/// midpoint of the protocol.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RampSchedule {
    g0: f64,
    g_c: f64,
    tau_q: f64,
}

impl RampSchedule {
    pub fn new(g0: f64, g_c: f64, tau_q: f64) -> Result<Self> {
        if !(tau_q > 0.0 && tau_q.is_finite()) {
            return Err(Error::param(format!("quench time must be positive, got {tau_q}")));
        }
        if !g0.is_finite() || !g_c.is_finite() {
            return Err(Error::param("ramp fields must be finite"));
        }
        if g0 == g_c {
            return Err(Error::param("ramp must start away from the critical field"));
        }
        Ok(Self { g0, g_c, tau_q })
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }

    pub fn g_c(&self) -> f64 {
        self.g_c
    }

    pub fn tau_q(&self) -> f64 {
        self.tau_q
    }

    /// Total field excursion `g_d = 2 (g_c - g0)`.
    pub fn excursion(&self) -> f64 {
        2.0 * (self.g_c - self.g0)
    }

    pub fn value(&self, t: f64) -> f64 {
        if t == 0.5 * self.tau_q {
            return self.g_c;
        }
        self.g0 + self.excursion() * t / self.tau_q
    }

    pub fn rate(&self) -> f64 {
        self.excursion() / self.tau_q
    }

    /// `g(tau_q) = 2 g_c - g0`.
    pub fn final_field(&self) -> f64 {
        2.0 * self.g_c - self.g0
    }

    /// Inverse of [`value`](Self::value).
    pub fn time_at(&self, g: f64) -> f64 {
        (g - self.g0) * self.tau_q / self.excursion()
    }

    pub fn with_tau_q(&self, tau_q: f64) -> Result<Self> {
        Self::new(self.g0, self.g_c, tau_q)
    }
}

/// Interval `[t_minus, t_plus]` of impulsive evolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImpulseWindow {
    pub t_minus: f64,
    pub t_plus: f64,
}

impl ImpulseWindow {
    /// `(tau_q/2 - h, tau_q/2 + h)` with `h` clamped to `[0, tau_q/2]`.
    pub fn symmetric(tau_q: f64, half_width: f64) -> Self {
        let h = half_width.clamp(0.0, 0.5 * tau_q);
        let mid = 0.5 * tau_q;
        if h == mid {
            return Self::whole(tau_q);
        }
        Self { t_minus: mid - h, t_plus: mid + h }
    }

    /// The entire ramp is impulsive.
    pub fn whole(tau_q: f64) -> Self {
        Self { t_minus: 0.0, t_plus: tau_q }
    }

    /// Zero-width window at the midpoint.
    pub fn degenerate(tau_q: f64) -> Self {
        Self { t_minus: 0.5 * tau_q, t_plus: 0.5 * tau_q }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.t_plus - self.t_minus)
    }

    pub fn width(&self) -> f64 {
        self.t_plus - self.t_minus
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_minus && t <= self.t_plus
    }
}

/// Critical exponents and prefactors of the Kibble-Zurek scaling laws.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingExponents {
    pub nu: f64,
    pub z: f64,
    pub tau0: f64,
    pub xi0: f64,
    pub dimension: u32,
}

impl ScalingExponents {
    pub fn new(nu: f64, z: f64, tau0: f64, xi0: f64, dimension: u32) -> Result<Self> {
        if !(nu > 0.0 && z > 0.0 && tau0 > 0.0 && xi0 > 0.0) || dimension == 0 {
            return Err(Error::param("scaling exponents and prefactors must be positive"));
        }
        Ok(Self { nu, z, tau0, xi0, dimension })
    }

    /// `z nu / (1 + z nu)`.
    pub fn freeze_out_exponent(&self) -> f64 {
        let zn = self.z * self.nu;
        zn / (1.0 + zn)
    }
}

/// Solves `1/gap(g(t)) = |t - tau_q/2|` for `t` in `[0, tau_q/2]` by bisection.
///
/// Returns the whole ramp when the relaxation time already exceeds the
/// remaining time at `t = 0`, and the zero-width window when it never does.
/// A zero gap means an infinite relaxation time.
pub fn impulse_window_generic<F: Fn(f64) -> f64>(s: &RampSchedule, gap: F) -> Result<ImpulseWindow> {
    let tau_q = s.tau_q();
    let half = 0.5 * tau_q;
    let relaxation = |t: f64| -> Result<f64> {
        let g = s.value(t);
        let y = gap(g);
        if !y.is_finite() || y < 0.0 {
            return Err(Error::NonFiniteGap { g });
        }
        Ok(1.0 / y)
    };
    let r0 = relaxation(0.0)? - half;
    if r0 >= 0.0 {
        return Ok(ImpulseWindow::whole(tau_q));
    }
    let r_mid = relaxation(half)?;
    if r_mid <= 0.0 {
        return Ok(ImpulseWindow::degenerate(tau_q));
    }

    // Validate every evaluation; bisect_root only sees the residual sign.
    let first_err = RefCell::new(None);
    let root = bisect_root_default(
        |t| match relaxation(t) {
            Ok(r) => r - (half - t),
            Err(e) => {
                first_err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        half,
    );
    if let Some(e) = first_err.into_inner() {
        return Err(e);
    }
    let t_minus = root?;
    Ok(ImpulseWindow { t_minus, t_plus: tau_q - t_minus })
}

/// Crossover times from the power-law scaling of the relaxation time.
pub fn kzm_predicted_window(s: &RampSchedule, e: &ScalingExponents) -> ImpulseWindow {
    let zn = e.z * e.nu;
    let distance = (s.g0() - s.g_c()).abs();
    let half = e.tau0.powf(1.0 / (1.0 + zn)) * (s.tau_q() / (2.0 * distance)).powf(zn / (1.0 + zn));
    ImpulseWindow::symmetric(s.tau_q(), half)
}

/// Correlation length at the freeze-out time.
pub fn correlation_length(s: &RampSchedule, e: &ScalingExponents) -> f64 {
    let base = 2.0 * e.tau0 * (s.g0() - s.g_c()).abs() / s.tau_q();
    e.xi0 * base.powf(-e.nu / (1.0 + e.z * e.nu))
}

/// Defect density `xi^-d`.
pub fn defect_density(s: &RampSchedule, e: &ScalingExponents) -> f64 {
    correlation_length(s, e).powi(-(e.dimension as i32))
}

/// Logistic `1 / (1 + exp(-m x))`.
pub fn logistic(m: f64, x: f64) -> f64 {
    1.0 / (1.0 + (-m * x).exp())
}

/// `S(t) = f(t - t_minus) f(t_plus - t)` with logistic `f` of steepness `m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwitchingFunction {
    pub steepness: f64,
    pub window: ImpulseWindow,
}

impl SwitchingFunction {
    pub fn new(steepness: f64, window: ImpulseWindow) -> Result<Self> {
        if !(steepness > 0.0 && steepness.is_finite()) {
            return Err(Error::param(format!("switching steepness must be positive, got {steepness}")));
        }
        Ok(Self { steepness, window })
    }

    pub fn value(&self, t: f64) -> f64 {
        logistic(self.steepness, t - self.window.t_minus) * logistic(self.steepness, self.window.t_plus - t)
    }

    /// `1 - S(t)`, accurate where `S` is close to one.
    pub fn complement(&self, t: f64) -> f64 {
        let a = logistic(self.steepness, self.window.t_minus - t);
        let b = logistic(self.steepness, t - self.window.t_plus);
        a + b - a * b
    }
}

/// Evaluates the switching function. Free-function form of [`SwitchingFunction::value`].
pub fn switching_value(sw: &SwitchingFunction, t: f64) -> f64 {
    sw.value(t)
}

/// Least-squares slope of `ln(half_width)` against `ln(tau_q)`.
pub fn fit_freeze_out_exponent(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 3 {
        return Err(Error::TooFewSamples(samples.len()));
    }
    if samples.iter().any(|&(t, mu)| !(t > 0.0 && mu > 0.0)) {
        return Err(Error::param("samples must have positive quench time and half-width"));
    }
    let n = samples.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = samples.iter().map(|&(t, mu)| (t.ln(), mu.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::param("samples need at least two distinct quench times"));
    }
    Ok(sxy / sxx)
}
