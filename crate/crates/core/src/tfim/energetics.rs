//! Closed-form control costs for the momentum-space Ising chain, using the
//! per-mode norm `‖H_CD‖ = Σ_k ‖H_{CD,k}‖`.

use std::f64::consts::{PI, SQRT_2};

use super::{modes_for, TfimParams};
use crate::error::Result;
use crate::kzm::ImpulseWindow;
use crate::numerics::{integrate, DEFAULT_REL_TOL};

/// `arctan[(g - cos k) / sin k]`, continuous for `k` in `[0, π]`.
fn mode_angle(k: f64, g: f64) -> f64 {
    (g - k.cos()).atan2(k.sin())
}

fn mode_sum(p: &TfimParams, g_lo: f64, g_hi: f64) -> f64 {
    modes_for(p.n()).iter().map(|m| mode_angle(m.k, g_hi) - mode_angle(m.k, g_lo)).sum()
}

/// `C = (1/(sqrt2 tau_q)) Σ_k {arctan[(g(tau_q) - cos k)/sin k] - arctan[(g0 - cos k)/sin k]}`.
pub fn tfim_cost_analytic(p: &TfimParams) -> f64 {
    let s = p.schedule();
    mode_sum(p, s.g0(), s.final_field()) / (SQRT_2 * s.tau_q())
}

/// Finite-N step-function savings `(δE, δE/C)`.
pub fn tfim_savings_analytic(p: &TfimParams, w: &ImpulseWindow) -> (f64, f64) {
    let s = p.schedule();
    let scale = 1.0 / (SQRT_2 * s.tau_q());
    let before = mode_sum(p, s.g0(), s.value(w.t_minus));
    let after = mode_sum(p, s.value(w.t_plus), s.final_field());
    let delta_e = scale * (before + after);
    let cost = tfim_cost_analytic(p);
    (delta_e, if cost > 0.0 { delta_e / cost } else { 0.0 })
}

/// `Φ[g] = ∫_0^π arctan[(g - cos x)/sin x] dx`.
pub fn phi_integral(g: f64) -> Result<f64> {
    Ok(integrate(|x| mode_angle(x, g), 0.0, PI, DEFAULT_REL_TOL * 1e-2)?)
}

/// Thermodynamic-limit savings `(δE, δE/C)` from `Φ`.
pub fn tfim_savings_thermo(p: &TfimParams, w: &ImpulseWindow) -> Result<(f64, f64)> {
    let s = p.schedule();
    let phi_end = phi_integral(s.final_field())?;
    let phi_start = phi_integral(s.g0())?;
    let phi_plus = phi_integral(s.value(w.t_plus))?;
    let phi_minus = phi_integral(s.value(w.t_minus))?;
    let delta_e = p.n() as f64 / (2.0 * SQRT_2 * PI * s.tau_q()) * (phi_end - phi_plus + phi_minus - phi_start);
    let ratio = 1.0 - (phi_plus - phi_minus) / (phi_end - phi_start);
    Ok((delta_e, ratio))
}
