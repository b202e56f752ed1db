//! Transverse-field Ising chain `H_0 = -ω Σ_i [g σ^x_i + σ^z_i σ^z_{i+1}]`
//! with periodic boundaries, in two representations:
//!
//! * [`MomentumModel`]: the even-parity sector decouples into `N/2`
//!   independent two-level systems, one per momentum `k_n = π(2n-1)/N`.
//! * [`SpinModel`]: dense `2^N` simulation with the counterdiabatic field
//!   truncated to interaction range `M`.

mod energetics;
mod momentum;
mod pauli;
mod spin;

pub use energetics::{phi_integral, tfim_cost_analytic, tfim_savings_analytic, tfim_savings_thermo};
pub use momentum::{momentum_evolve, MomentumModel};
pub use pauli::{Pauli, PauliString};
pub use spin::{
    cd_range_terms, even_parity_ground_state, parity_operator, spin_evolve, spin_hamiltonian, spin_hamiltonian_terms,
    truncated_cd_field, truncated_cd_terms, u_coefficient, SpinModel, TruncationRange, MAX_SPIN_SITES,
};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kzm::{ImpulseWindow, RampSchedule};
use crate::numerics::{pauli_combination, HermitianOperator, StateVector};

/// Critical transverse field.
pub const CRITICAL_FIELD: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TfimParams {
    n: usize,
    omega: f64,
    schedule: RampSchedule,
}

impl TfimParams {
    /// `n` must be even and positive; the ramp crosses `g_c = 1`.
    pub fn new(n: usize, omega: f64, g0: f64, tau_q: f64) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::param(format!("N must be even and positive, got {n}")));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::param(format!("ω must be positive, got {omega}")));
        }
        Ok(Self { n, omega, schedule: RampSchedule::new(g0, CRITICAL_FIELD, tau_q)? })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn schedule(&self) -> &RampSchedule {
        &self.schedule
    }

    pub fn field(&self, t: f64) -> f64 {
        self.schedule.value(t)
    }

    pub fn with_tau_q(&self, tau_q: f64) -> Result<Self> {
        Self::new(self.n, self.omega, self.schedule.g0(), tau_q)
    }
}

/// Momentum `k_n = π (2n - 1) / N` with lattice spacing 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentumMode {
    pub index: usize,
    pub k: f64,
}

/// The `N/2` positive momenta of the even-parity sector, ascending.
pub fn momentum_modes(p: &TfimParams) -> Vec<MomentumMode> {
    modes_for(p.n)
}

pub(crate) fn modes_for(n: usize) -> Vec<MomentumMode> {
    (1..=n / 2)
        .map(|index| MomentumMode { index, k: PI * (2 * index - 1) as f64 / n as f64 })
        .collect()
}

/// Fails for odd `n`.
pub fn momentum_modes_checked(n: usize) -> Result<Vec<MomentumMode>> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::param(format!("N must be even and positive, got {n}")));
    }
    Ok(modes_for(n))
}

/// `(h^x_k, h^z_k(g)) = (2ω sin k, 2ω (g - cos k))`.
pub fn subspace_fields(omega: f64, k: f64, g: f64) -> (f64, f64) {
    (2.0 * omega * k.sin(), 2.0 * omega * (g - k.cos()))
}

/// `H_{0,k} = h^x σ_x - h^z σ_z`.
pub fn subspace_hamiltonian(p: &TfimParams, k: &MomentumMode, t: f64) -> HermitianOperator {
    subspace_hamiltonian_at(p.omega, k.k, p.field(t))
}

pub(crate) fn subspace_hamiltonian_at(omega: f64, k: f64, g: f64) -> HermitianOperator {
    let (hx, hz) = subspace_fields(omega, k, g);
    pauli_combination(hx, 0.0, -hz)
}

/// `γ_k = 4ω sqrt(g² - 2g cos k + 1)`.
pub fn subspace_gap(p: &TfimParams, k: &MomentumMode, t: f64) -> f64 {
    subspace_gap_at(p.omega, k.k, p.field(t))
}

pub(crate) fn subspace_gap_at(omega: f64, k: f64, g: f64) -> f64 {
    // g² - 2g cos k + 1 = (g - cos k)² + sin² k
    4.0 * omega * (g - k.cos()).hypot(k.sin())
}

/// `γ_0 ≈ 4ω |g - 1|`, used only to locate the impulse window.
pub fn approximate_lowest_gap(p: &TfimParams, t: f64) -> f64 {
    4.0 * p.omega * (p.field(t) - CRITICAL_FIELD).abs()
}

/// `t∓ = tau_q/2 ∓ sqrt(tau_q / (8ω(1 - g0)))`; the whole ramp when
/// `tau_q < 1/(2ω(1 - g0))`, where the approximate gap is unreliable.
pub fn tfim_impulse_window(p: &TfimParams) -> Result<ImpulseWindow> {
    let g0 = p.schedule.g0();
    if g0 >= CRITICAL_FIELD {
        return Err(Error::param(format!("impulse window needs g0 < 1, got {g0}")));
    }
    let tau_q = p.schedule.tau_q();
    if tau_q < 1.0 / (2.0 * p.omega * (1.0 - g0)) {
        return Ok(ImpulseWindow::whole(tau_q));
    }
    Ok(ImpulseWindow::symmetric(tau_q, (tau_q / (8.0 * p.omega * (1.0 - g0))).sqrt()))
}

/// `dθ_k/dt = ġ sin k / (2 (g² - 2g cos k + 1))`.
pub(crate) fn subspace_angle_rate(k: f64, g: f64, g_dot: f64) -> f64 {
    let d = (g - k.cos()).powi(2) + k.sin().powi(2);
    g_dot * k.sin() / (2.0 * d)
}

/// `H_{CD,k} = ġ sin k / (2 (g² - 2g cos k + 1)) σ_y`.
pub fn subspace_cd_field(p: &TfimParams, k: &MomentumMode, t: f64) -> HermitianOperator {
    pauli_combination(0.0, subspace_angle_rate(k.k, p.field(t), p.schedule.rate()), 0.0)
}

/// Mode ground state `cos θ_k|0> + sin θ_k|1>` with
/// `tan θ_k = (h^z - sqrt(h^x² + h^z²)) / h^x`.
pub fn subspace_ground_state(p: &TfimParams, k: &MomentumMode, t: f64) -> StateVector {
    StateVector::qubit(subspace_angle(p.omega, k.k, p.field(t)))
}

pub(crate) fn subspace_angle(omega: f64, k: f64, g: f64) -> f64 {
    let (hx, hz) = subspace_fields(omega, k, g);
    let e = hx.hypot(hz);
    let num = if hz > 0.0 { -hx * hx / (hz + e) } else { hz - e };
    (num / hx).atan()
}

/// Landau-Zener estimate for the lowest mode,
/// `1 - exp[-(2πω/|ġ|) sin²(π/N)]`.
pub fn lowest_mode_lz_estimate(p: &TfimParams) -> f64 {
    let s = (PI / p.n as f64).sin();
    1.0 - (-(2.0 * PI * p.omega / p.schedule.rate().abs()) * s * s).exp()
}

/// Ground energy of the even-parity sector, `-Σ_k γ_k / 2`.
pub fn momentum_ground_energy(p: &TfimParams, g: f64) -> f64 {
    -modes_for(p.n).iter().map(|m| subspace_gap_at(p.omega, m.k, g) / 2.0).sum::<f64>()
}
