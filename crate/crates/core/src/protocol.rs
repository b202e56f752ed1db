//! Controlled evolution `H_0 + [δ_{1κ} + δ_{2κ} S(t)] H_CD` and its figures of
//! merit: instantaneous ground-state fidelity, control cost, savings and the
//! geometric lower bound on the cost.

use std::cell::RefCell;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kzm::{ImpulseWindow, RampSchedule, SwitchingFunction};
use crate::numerics::{
    hermitian_eigensystem, integrate_with_breaks, propagate_sampled, Generator, HermitianOperator, NumericsError,
    StateVector, C64, DEFAULT_REL_TOL,
};

/// Minimum number of RK4 steps per run.
pub const MIN_STEPS: usize = 20_000;
/// RK4 steps per unit of `tau_q * energy_scale`.
pub const STEPS_PER_TIME: f64 = 4000.0;
/// Default number of fidelity samples per trace.
pub const DEFAULT_SAMPLES: usize = 1000;

/// Which control field is applied during the ramp.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum ControlMode {
    /// κ = 0.
    Uncontrolled,
    /// κ = 1.
    Full,
    /// κ = 2 with the model's impulse window.
    Impulse,
    /// Switching window `(tau_q/2 - eta, tau_q/2 + eta)`.
    Window { eta: f64 },
}

impl ControlMode {
    pub fn name(&self) -> &'static str {
        match self {
            ControlMode::Uncontrolled => "none",
            ControlMode::Full => "full",
            ControlMode::Impulse => "impulse",
            ControlMode::Window { .. } => "window",
        }
    }
}

/// Everything a run needs besides the model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Protocol {
    pub mode: ControlMode,
    /// Logistic steepness `m` (inverse time). `None` uses the model default.
    pub steepness: Option<f64>,
    /// RK4 steps. `None` uses `max(20000, ceil(4000 tau_q E))`.
    pub steps: Option<usize>,
    /// Fidelity samples, endpoints included.
    pub samples: usize,
    /// Exponent `n` in the cost functional `∫‖H_CD‖^n`.
    pub cost_exponent: i32,
}

impl Protocol {
    pub fn new(mode: ControlMode) -> Self {
        Self { mode, steepness: None, steps: None, samples: DEFAULT_SAMPLES, cost_exponent: 1 }
    }

    pub fn with_steepness(mut self, m: f64) -> Self {
        self.steepness = Some(m);
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = Some(steps);
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }
}

/// A driven model with a known counterdiabatic field. Models may decompose
/// into independent blocks (momentum subspaces); the state is their product.
pub trait ControlledModel: Sync {
    fn schedule(&self) -> &RampSchedule;

    /// Energy unit (Δ or ω); sets the default integrator resolution.
    fn energy_scale(&self) -> f64;

    /// Default switching steepness in inverse time units.
    fn default_steepness(&self) -> f64;

    fn impulse_window(&self) -> Result<ImpulseWindow>;

    fn block_count(&self) -> usize;

    /// Bare Hamiltonian `H_0(t)` of one block.
    fn drift(&self, block: usize, t: f64) -> Result<HermitianOperator>;

    /// Counterdiabatic field applied by this model (possibly truncated).
    fn cd_field(&self, block: usize, t: f64) -> Result<HermitianOperator>;

    /// Instantaneous ground state of one block.
    fn ground_state(&self, block: usize, t: f64) -> Result<StateVector>;

    /// Norm of the applied counterdiabatic field, in the model's convention.
    fn cd_norm(&self, t: f64) -> f64;

    /// Norm of the exact counterdiabatic field that defines the reference cost.
    fn reference_cd_norm(&self, t: f64) -> f64 {
        self.cd_norm(t)
    }

    /// `H_0(g)` and `∂_g H_0` of one block, when the model supports the
    /// geometric lower bound.
    fn field_operators(&self, _block: usize, _g: f64) -> Option<(HermitianOperator, HermitianOperator)> {
        None
    }

    /// Closed-form cost figures under a step-function switch, if known.
    fn analytic_costs(&self, _window: &ImpulseWindow) -> Result<Option<AnalyticCosts>> {
        Ok(None)
    }

    /// Generator of `H_0 + weight(t) H_CD` for one block. The default builds
    /// dense operators at every evaluation.
    fn generator<'a>(&'a self, block: usize, weight: &'a (dyn Fn(f64) -> f64 + Sync)) -> Box<dyn Generator + 'a> {
        Box::new(DenseGenerator { model: self, block, weight })
    }
}

struct DenseGenerator<'a, M: ?Sized> {
    model: &'a M,
    block: usize,
    weight: &'a (dyn Fn(f64) -> f64 + Sync),
}

impl<M: ControlledModel + ?Sized> Generator for DenseGenerator<'_, M> {
    fn apply(&self, t: f64, psi: &DVector<C64>, out: &mut DVector<C64>) -> Result<(), NumericsError> {
        let h = assemble_weighted(self.model, self.block, (self.weight)(t), t).map_err(|_| NumericsError::Propagation { time: t })?;
        if !h.matrix().is_finite() {
            return Err(NumericsError::Propagation { time: t });
        }
        out.gemv(C64::new(1.0, 0.0), h.matrix().as_dmatrix(), psi, C64::new(0.0, 0.0));
        Ok(())
    }
}

fn assemble_weighted<M: ControlledModel + ?Sized>(model: &M, block: usize, w: f64, t: f64) -> Result<HermitianOperator> {
    let h0 = model.drift(block, t)?;
    if w == 0.0 {
        return Ok(h0);
    }
    Ok(h0.add_scaled(&model.cd_field(block, t)?, w))
}

/// Time-dependent weight of the counterdiabatic field for a mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ControlWeight {
    Constant(f64),
    Switched(SwitchingFunction),
}

impl ControlWeight {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            ControlWeight::Constant(c) => *c,
            ControlWeight::Switched(s) => s.value(t),
        }
    }

    /// `1 - weight(t)`.
    pub fn complement(&self, t: f64) -> f64 {
        match self {
            ControlWeight::Constant(c) => 1.0 - c,
            ControlWeight::Switched(s) => s.complement(t),
        }
    }
}

/// Resolves the switching window of a mode: the whole ramp for full control,
/// the zero-width midpoint window for no control.
pub fn control_window<M: ControlledModel + ?Sized>(model: &M, mode: ControlMode) -> Result<ImpulseWindow> {
    let tau_q = model.schedule().tau_q();
    Ok(match mode {
        ControlMode::Uncontrolled => ImpulseWindow::degenerate(tau_q),
        ControlMode::Full => ImpulseWindow::whole(tau_q),
        ControlMode::Impulse => model.impulse_window()?,
        ControlMode::Window { eta } => {
            if !(0.0..=0.5 * tau_q).contains(&eta) {
                return Err(Error::param(format!("eta = {eta} outside [0, tau_q/2]")));
            }
            ImpulseWindow::symmetric(tau_q, eta)
        }
    })
}

pub fn control_weight<M: ControlledModel + ?Sized>(model: &M, protocol: &Protocol) -> Result<ControlWeight> {
    Ok(match protocol.mode {
        ControlMode::Uncontrolled => ControlWeight::Constant(0.0),
        ControlMode::Full => ControlWeight::Constant(1.0),
        ControlMode::Impulse | ControlMode::Window { .. } => {
            let m = protocol.steepness.unwrap_or_else(|| model.default_steepness());
            ControlWeight::Switched(SwitchingFunction::new(m, control_window(model, protocol.mode)?)?)
        }
    })
}

/// `H_0(t) + [δ_{1κ} + δ_{2κ} S(t)] H_CD(t)` for one block.
pub fn assemble_hamiltonian<M: ControlledModel + ?Sized>(
    model: &M,
    protocol: &Protocol,
    block: usize,
    t: f64,
) -> Result<HermitianOperator> {
    let w = control_weight(model, protocol)?;
    assemble_weighted(model, block, w.value(t), t)
}

/// Default RK4 step count for a model.
pub fn default_steps<M: ControlledModel + ?Sized>(model: &M) -> usize {
    let scaled = (STEPS_PER_TIME * model.schedule().tau_q() * model.energy_scale()).ceil();
    MIN_STEPS.max(scaled as usize)
}

/// Fidelity time series of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub switching: Vec<f64>,
    pub norm_drift: Vec<f64>,
}

impl SimulationTrace {
    pub fn final_fidelity(&self) -> f64 {
        *self.fidelity.last().expect("trace has at least two samples")
    }

    pub fn min_fidelity(&self) -> f64 {
        self.fidelity.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norm_drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Closed-form energetics for a step-function switch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticCosts {
    pub cost: f64,
    pub delta_e: f64,
    pub ratio: f64,
    /// Continuum (N → ∞) savings where the model has one.
    pub thermodynamic_delta_e: Option<f64>,
    pub thermodynamic_ratio: Option<f64>,
}

/// Energetics of one run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    /// Cost of full control with the exact field.
    pub cost: f64,
    /// Cost avoided by the applied protocol.
    pub delta_e: f64,
    pub ratio: f64,
    pub lower_bound: Option<f64>,
    pub analytic: Option<AnalyticCosts>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub window: ImpulseWindow,
    pub weight: ControlWeight,
    pub steps: usize,
    pub trace: SimulationTrace,
    pub costs: CostReport,
}

/// Runs the protocol from the instantaneous ground state at `t = 0` and
/// computes its cost figures.
pub fn run_protocol<M: ControlledModel + ?Sized>(model: &M, protocol: &Protocol) -> Result<RunResult> {
    let trace_result = simulate(model, protocol)?;
    let costs = cost_report(model, protocol)?;
    Ok(RunResult { costs, ..trace_result })
}

/// Runs only the dynamics. The returned cost report is zeroed.
pub fn simulate<M: ControlledModel + ?Sized>(model: &M, protocol: &Protocol) -> Result<RunResult> {
    if protocol.samples < 2 {
        return Err(Error::param("at least two samples are required"));
    }
    let window = control_window(model, protocol.mode)?;
    let weight = control_weight(model, protocol)?;
    let tau_q = model.schedule().tau_q();
    let intervals = protocol.samples - 1;
    let steps = protocol.steps.unwrap_or_else(|| default_steps(model));
    if steps == 0 {
        return Err(Error::param("steps must be at least 1"));
    }

    let weight_fn = move |t: f64| weight.value(t);
    let per_block: Vec<Vec<(C64, f64)>> = (0..model.block_count())
        .into_par_iter()
        .map(|block| -> Result<Vec<(C64, f64)>> {
            let generator = model.generator(block, &weight_fn);
            let psi0 = model.ground_state(block, 0.0)?;
            let mut samples = Vec::with_capacity(protocol.samples);
            let mut failure = None;
            propagate_sampled(generator.as_ref(), &psi0, 0.0, tau_q, steps, protocol.samples, |t, psi| {
                match model.ground_state(block, t) {
                    Ok(ground) => {
                        samples.push((psi.inner(&ground), psi.norm_sqr()));
                        Ok(())
                    }
                    Err(e) => {
                        failure = Some(e);
                        Err(NumericsError::InvalidArgument("ground state unavailable".into()))
                    }
                }
            })
            .map_err(|e| failure.take().unwrap_or(Error::Numerics(e)))?;
            Ok(samples)
        })
        .collect::<Result<_>>()?;

    let n = protocol.samples;
    let mut trace = SimulationTrace {
        times: Vec::with_capacity(n),
        fidelity: Vec::with_capacity(n),
        switching: Vec::with_capacity(n),
        norm_drift: Vec::with_capacity(n),
    };
    let h = tau_q / steps as f64;
    for j in 0..n {
        let step = (j as u128 * steps as u128 / intervals as u128) as usize;
        let t = if step == steps { tau_q } else { step as f64 * h };
        let mut overlap = C64::new(1.0, 0.0);
        let mut norm = 1.0;
        for block in &per_block {
            overlap *= block[j].0;
            norm *= block[j].1;
        }
        trace.times.push(t);
        trace.fidelity.push(overlap.norm_sqr());
        trace.switching.push(weight.value(t));
        trace.norm_drift.push((norm - 1.0).abs());
    }

    let zero = CostReport { cost: 0.0, delta_e: 0.0, ratio: 0.0, lower_bound: None, analytic: None };
    Ok(RunResult { window, weight, steps, trace, costs: zero })
}

/// Cost `C`, savings `δE`, their ratio, the geometric lower bound and any
/// closed-form cross-checks for a protocol.
pub fn cost_report<M: ControlledModel + ?Sized>(model: &M, protocol: &Protocol) -> Result<CostReport> {
    let n = protocol.cost_exponent;
    let weight = control_weight(model, protocol)?;
    let window = control_window(model, protocol.mode)?;
    let cost = cost_numeric_with(model, n)?;
    let delta_e = savings_numeric_with(model, &weight, &window, n)?;
    let ratio = if cost > 0.0 { delta_e / cost } else { 0.0 };
    let (lower_bound, analytic) = if n == 1 {
        (cost_lower_bound(model)?, model.analytic_costs(&window)?)
    } else {
        (None, None)
    };
    Ok(CostReport { cost, delta_e, ratio, lower_bound, analytic })
}

fn breakpoints(tau_q: f64, window: &ImpulseWindow) -> Vec<f64> {
    let mut pts = vec![0.0, window.t_minus, 0.5 * tau_q, window.t_plus, tau_q];
    pts.iter_mut().for_each(|p| *p = p.clamp(0.0, tau_q));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `C = (1/tau_q) ∫ ‖H_CD‖ dt` with the exact field.
pub fn cost_numeric<M: ControlledModel + ?Sized>(model: &M) -> Result<f64> {
    cost_numeric_with(model, 1)
}

fn cost_numeric_with<M: ControlledModel + ?Sized>(model: &M, n: i32) -> Result<f64> {
    let tau_q = model.schedule().tau_q();
    let pts = breakpoints(tau_q, &ImpulseWindow::degenerate(tau_q));
    Ok(integrate_with_breaks(|t| model.reference_cd_norm(t).powi(n), &pts, DEFAULT_REL_TOL)? / tau_q)
}

/// `δE = (1/tau_q) ∫ [‖H_CD^exact‖ - S(t) ‖H_CD^applied‖] dt`, which reduces
/// to `(1/tau_q) ∫ [1 - S] ‖H_CD‖` when the applied field is exact.
pub fn savings_numeric<M: ControlledModel + ?Sized>(model: &M, weight: &ControlWeight) -> Result<f64> {
    let window = match weight {
        ControlWeight::Switched(s) => s.window,
        ControlWeight::Constant(_) => ImpulseWindow::degenerate(model.schedule().tau_q()),
    };
    savings_numeric_with(model, weight, &window, 1)
}

fn savings_numeric_with<M: ControlledModel + ?Sized>(
    model: &M,
    weight: &ControlWeight,
    window: &ImpulseWindow,
    n: i32,
) -> Result<f64> {
    let tau_q = model.schedule().tau_q();
    let pts = breakpoints(tau_q, window);
    let integrand = |t: f64| {
        let applied = model.cd_norm(t).powi(n);
        let reference = model.reference_cd_norm(t).powi(n);
        (reference - applied) + weight.complement(t) * applied
    };
    Ok(integrate_with_breaks(integrand, &pts, DEFAULT_REL_TOL)? / tau_q)
}

/// Degeneracy threshold for the lower-bound integrand.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// `W[g] = sqrt(Σ_{n≠m} |<φ_m|∂_g H_0|φ_n>|² / (ε_n - ε_m)²)`, summed over
/// blocks. Pairs closer than [`DEGENERACY_TOL`] with vanishing coupling are
/// skipped; with non-zero coupling they are an error.
pub fn geometric_speed<M: ControlledModel + ?Sized>(model: &M, g: f64) -> Result<Option<f64>> {
    let mut total = 0.0;
    for block in 0..model.block_count() {
        let Some((h0, dh)) = model.field_operators(block, g) else {
            return Ok(None);
        };
        let eig = hermitian_eigensystem(&h0)?;
        let mut sum = 0.0;
        let dim = eig.values.len();
        let applied: Vec<StateVector> =
            eig.vectors.iter().map(|v| StateVector::from_dvector(dh.apply(v))).collect();
        let coupling_floor = 1e-10 * dh.frobenius_norm().max(f64::MIN_POSITIVE);
        for nidx in 0..dim {
            for midx in 0..dim {
                if nidx == midx {
                    continue;
                }
                let element = eig.vectors[midx].inner(&applied[nidx]).norm();
                let gap = eig.values[nidx] - eig.values[midx];
                if gap.abs() < DEGENERACY_TOL {
                    if element > coupling_floor {
                        return Err(Error::SpectralDegeneracy { g });
                    }
                    continue;
                }
                sum += (element / gap).powi(2);
            }
        }
        total += sum.sqrt();
    }
    Ok(Some(total))
}

/// `(1/tau_q) ∫_{g0}^{g(tau_q)} W[g] dg`, or `None` when the model does not
/// expose field-resolved operators.
pub fn cost_lower_bound<M: ControlledModel + ?Sized>(model: &M) -> Result<Option<f64>> {
    let s = model.schedule();
    if model.field_operators(0, s.g0()).is_none() {
        return Ok(None);
    }
    let (lo, hi) = (s.g0().min(s.final_field()), s.g0().max(s.final_field()));
    let failure = RefCell::new(None);
    let value = integrate_with_breaks(
        |g| match geometric_speed(model, g) {
            Ok(Some(w)) => w,
            Ok(None) => f64::NAN,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        &[lo, s.g_c(), hi],
        DEFAULT_REL_TOL,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(Some(value? / s.tau_q()))
}
