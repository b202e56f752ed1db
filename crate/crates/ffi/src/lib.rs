//! C ABI for `impulse-cd`.
//!
//! Models and run results are opaque heap handles created by `icd_*_new`
//! / `icd_run` and released with the matching `*_free`. Every fallible call
//! returns an [`IcdStatus`]; on failure [`icd_last_error`] describes the
//! cause for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use impulse_cd::protocol::{run_protocol, ControlMode, ControlledModel, CostReport, Protocol, SimulationTrace};
use impulse_cd::{Error, LzParams, MomentumModel, SpinModel, TfimParams, TruncationRange};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IcdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NumericalFailure = 3,
    OutOfRange = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum IcdMode {
    None = 0,
    Full = 1,
    #[default]
    Impulse = 2,
    Window = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IcdSample {
    pub t: f64,
    pub fidelity: f64,
    pub switching: f64,
    pub norm_drift: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IcdCosts {
    pub cost: f64,
    pub delta_e: f64,
    pub ratio: f64,
    /// NaN when the model has no geometric bound.
    pub lower_bound: f64,
}

/// Options for [`icd_run`]. Zero/non-positive fields select the defaults.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IcdRunOptions {
    pub mode: IcdMode,
    /// Window half-width, used only with `ICD_MODE_WINDOW`.
    pub eta: f64,
    pub steepness: f64,
    pub steps: u64,
    pub samples: u32,
}

enum Inner {
    Lz(LzParams),
    Momentum(MomentumModel),
    Spin(Box<SpinModel>),
}

/// Opaque model handle.
pub struct IcdModel(Inner);

impl IcdModel {
    fn as_model(&self) -> &dyn ControlledModel {
        match &self.0 {
            Inner::Lz(m) => m,
            Inner::Momentum(m) => m,
            Inner::Spin(m) => m.as_ref(),
        }
    }
}

/// Opaque result handle.
pub struct IcdRun {
    trace: SimulationTrace,
    costs: CostReport,
    t_minus: f64,
    t_plus: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> IcdStatus {
    match e {
        Error::InvalidParameter(_) | Error::TooLarge { .. } | Error::Unsupported(_) => IcdStatus::InvalidArgument,
        _ => IcdStatus::NumericalFailure,
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard<F: FnOnce() -> Result<(), (IcdStatus, String)>>(f: F) -> IcdStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IcdStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            IcdStatus::Panic
        }
    }
}

fn core<T>(r: impulse_cd::Result<T>) -> Result<T, (IcdStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (IcdStatus, String) {
    (IcdStatus::NullPointer, format!("{what} is null"))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), (IcdStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn n_sites(n: u32) -> usize {
    n as usize
}

/// Landau-Zener model `Δσx + g(t)σz` ramped from `g0` to `-g0`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn icd_model_new_lz(delta: f64, g0: f64, tau_q: f64, out: *mut *mut IcdModel) -> IcdStatus {
    guard(|| {
        let p = core(LzParams::new(delta, g0, tau_q))?;
        store(out, IcdModel(Inner::Lz(p)))
    })
}

/// Ising chain as `n/2` momentum modes, ramped from `g0` through `g = 1`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn icd_model_new_tfim_momentum(
    n: u32,
    omega: f64,
    g0: f64,
    tau_q: f64,
    out: *mut *mut IcdModel,
) -> IcdStatus {
    guard(|| {
        let p = core(TfimParams::new(n_sites(n), omega, g0, tau_q))?;
        store(out, IcdModel(Inner::Momentum(MomentumModel::new(p))))
    })
}

/// Dense spin-basis Ising chain with counterdiabatic range `trunc`
/// (`1..=n/2`).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn icd_model_new_tfim_spin(
    n: u32,
    omega: f64,
    g0: f64,
    tau_q: f64,
    trunc: u32,
    out: *mut *mut IcdModel,
) -> IcdStatus {
    guard(|| {
        let n = n_sites(n);
        let p = core(TfimParams::new(n, omega, g0, tau_q))?;
        let range = core(TruncationRange::new(trunc as usize, n))?;
        let model = core(SpinModel::new(p, range))?;
        store(out, IcdModel(Inner::Spin(Box::new(model))))
    })
}

/// # Safety
/// `model` must be null or a handle from `icd_model_new_*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn icd_model_free(model: *mut IcdModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Adiabatic-impulse crossover times `t_-`, `t_+`.
///
/// # Safety
/// `model` must be a live handle; `t_minus` and `t_plus` must be writable.
#[no_mangle]
pub unsafe extern "C" fn icd_model_window(model: *const IcdModel, t_minus: *mut f64, t_plus: *mut f64) -> IcdStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        if t_minus.is_null() || t_plus.is_null() {
            return Err(null("output pointer"));
        }
        let w = core(model.as_model().impulse_window())?;
        *t_minus = w.t_minus;
        *t_plus = w.t_plus;
        Ok(())
    })
}

fn protocol(opts: &IcdRunOptions) -> Result<Protocol, (IcdStatus, String)> {
    let mode = match opts.mode {
        IcdMode::None => ControlMode::Uncontrolled,
        IcdMode::Full => ControlMode::Full,
        IcdMode::Impulse => ControlMode::Impulse,
        IcdMode::Window => ControlMode::Window { eta: opts.eta },
    };
    let mut p = Protocol::new(mode);
    if opts.steepness > 0.0 {
        p = p.with_steepness(opts.steepness);
    }
    if opts.steps > 0 {
        let steps = usize::try_from(opts.steps).map_err(|_| (IcdStatus::InvalidArgument, "steps too large".into()))?;
        p = p.with_steps(steps);
    }
    if opts.samples > 0 {
        p = p.with_samples(opts.samples as usize);
    }
    Ok(p)
}

/// Default run options: impulse control with model defaults.
#[no_mangle]
pub extern "C" fn icd_run_options_default() -> IcdRunOptions {
    IcdRunOptions::default()
}

/// Simulates the model and computes its costs. `opts` may be null for
/// defaults.
///
/// # Safety
/// `model` must be a live handle, `opts` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn icd_run(model: *const IcdModel, opts: *const IcdRunOptions, out: *mut *mut IcdRun) -> IcdStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let opts = opts.as_ref().copied().unwrap_or_default();
        let r = core(run_protocol(model.as_model(), &protocol(&opts)?))?;
        store(out, IcdRun { trace: r.trace, costs: r.costs, t_minus: r.window.t_minus, t_plus: r.window.t_plus })
    })
}

/// # Safety
/// `run` must be null or a handle from [`icd_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn icd_run_free(run: *mut IcdRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Final ground-state fidelity, or NaN for a null handle.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn icd_run_final_fidelity(run: *const IcdRun) -> f64 {
    run.as_ref().map_or(f64::NAN, |r| r.trace.final_fidelity())
}

/// Control window used by the run.
///
/// # Safety
/// `run` must be a live handle; `t_minus` and `t_plus` must be writable.
#[no_mangle]
pub unsafe extern "C" fn icd_run_window(run: *const IcdRun, t_minus: *mut f64, t_plus: *mut f64) -> IcdStatus {
    guard(|| {
        let run = run.as_ref().ok_or_else(|| null("run"))?;
        if t_minus.is_null() || t_plus.is_null() {
            return Err(null("output pointer"));
        }
        *t_minus = run.t_minus;
        *t_plus = run.t_plus;
        Ok(())
    })
}

/// # Safety
/// `run` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn icd_run_costs(run: *const IcdRun, out: *mut IcdCosts) -> IcdStatus {
    guard(|| {
        let run = run.as_ref().ok_or_else(|| null("run"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let c = &run.costs;
        *out = IcdCosts { cost: c.cost, delta_e: c.delta_e, ratio: c.ratio, lower_bound: c.lower_bound.unwrap_or(f64::NAN) };
        Ok(())
    })
}

/// Number of trace samples, or 0 for a null handle.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn icd_run_trace_len(run: *const IcdRun) -> usize {
    run.as_ref().map_or(0, |r| r.trace.len())
}

/// # Safety
/// `run` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn icd_run_trace_sample(run: *const IcdRun, index: usize, out: *mut IcdSample) -> IcdStatus {
    guard(|| {
        let run = run.as_ref().ok_or_else(|| null("run"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let tr = &run.trace;
        if index >= tr.len() {
            return Err((IcdStatus::OutOfRange, format!("sample {index} out of range (len {})", tr.len())));
        }
        *out = IcdSample {
            t: tr.times[index],
            fidelity: tr.fidelity[index],
            switching: tr.switching[index],
            norm_drift: tr.norm_drift[index],
        };
        Ok(())
    })
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next `icd_*` call on the same thread.
#[no_mangle]
pub extern "C" fn icd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static, NUL-terminated version string.
#[no_mangle]
pub extern "C" fn icd_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!("version contains NUL"),
    };
    VERSION.as_ptr()
}
