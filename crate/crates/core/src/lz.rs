//! Landau-Zener model `H_0 = Δ σ_x + g(t) σ_z`, driven symmetrically through
//! the avoided crossing at `g = 0`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kzm::{ImpulseWindow, RampSchedule, LZ_DEFAULT_STEEPNESS};
use crate::numerics::{pauli_combination, sigma_z, Generator, HermitianOperator, PauliVectorFn, StateVector};
use crate::protocol::{AnalyticCosts, ControlledModel};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LzParams {
    delta: f64,
    schedule: RampSchedule,
}

impl LzParams {
    pub fn new(delta: f64, g0: f64, tau_q: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::param(format!("Δ must be positive, got {delta}")));
        }
        Ok(Self { delta, schedule: RampSchedule::new(g0, 0.0, tau_q)? })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn schedule(&self) -> &RampSchedule {
        &self.schedule
    }

    pub fn field(&self, t: f64) -> f64 {
        self.schedule.value(t)
    }
}

/// `tan θ = -(g + sqrt(Δ² + g²)) / Δ`, evaluated without cancellation.
fn mixing_angle(delta: f64, g: f64) -> f64 {
    let r = delta.hypot(g);
    let num = if g >= 0.0 { g + r } else { delta * delta / (r - g) };
    (-num / delta).atan()
}

pub fn lz_hamiltonian(p: &LzParams, t: f64) -> HermitianOperator {
    pauli_combination(p.delta, 0.0, p.field(t))
}

/// Ground and excited eigenstates `cos θ|0> + sin θ|1>`, `sin θ|0> - cos θ|1>`.
pub fn lz_eigenstates(p: &LzParams, t: f64) -> (StateVector, StateVector) {
    let theta = mixing_angle(p.delta, p.field(t));
    let ground = StateVector::qubit(theta);
    let excited = StateVector::qubit(theta - 0.5 * PI);
    (ground, excited)
}

/// `γ = 2 sqrt(g² + Δ²)`.
pub fn lz_gap(p: &LzParams, t: f64) -> f64 {
    2.0 * p.delta.hypot(p.field(t))
}

/// Rate of the mixing angle, `dθ/dt = -ġ Δ / (2 (Δ² + g²))`.
pub fn lz_angle_rate(p: &LzParams, t: f64) -> f64 {
    let g = p.field(t);
    -p.schedule.rate() * p.delta / (2.0 * (p.delta * p.delta + g * g))
}

/// `H_CD = dθ/dt σ_y`.
pub fn lz_cd_field(p: &LzParams, t: f64) -> HermitianOperator {
    pauli_combination(0.0, lz_angle_rate(p, t), 0.0)
}

/// Closed-form half-width `μ` of the impulse window (unclamped). For very
/// short ramps it can exceed `tau_q/2`; see [`lz_impulse_window`].
pub fn lz_impulse_half_width(p: &LzParams) -> f64 {
    let tau = p.schedule.tau_q();
    let g0 = p.schedule.g0();
    let a = (tau * p.delta).powi(2);
    let b = 4.0 * g0 * g0 * tau * tau;
    // sqrt(a² + b) - a = b / (sqrt(a² + b) + a)
    let numerator = b / ((a * a + b).sqrt() + a);
    0.5 * (numerator / (2.0 * g0 * g0)).sqrt()
}

/// `(tau_q/2 - μ, tau_q/2 + μ)` clamped to the ramp.
pub fn lz_impulse_window(p: &LzParams) -> ImpulseWindow {
    ImpulseWindow::symmetric(p.schedule.tau_q(), lz_impulse_half_width(p))
}

/// Landau-Zener excitation probability `exp(-π Δ² / |ġ|)`.
pub fn lz_transition_probability(p: &LzParams) -> f64 {
    (-PI * p.delta * p.delta / p.schedule.rate().abs()).exp()
}

/// `C = -(sqrt2 / tau_q) arctan(g0 / Δ)`.
pub fn lz_cost_analytic(p: &LzParams) -> f64 {
    -SQRT_2 / p.schedule.tau_q() * (p.schedule.g0() / p.delta).atan()
}

/// Step-function savings `(δE, δE/C)` for a window.
pub fn lz_savings_analytic(p: &LzParams, w: &ImpulseWindow) -> (f64, f64) {
    let a0 = (p.schedule.g0() / p.delta).atan();
    let a_minus = (p.field(w.t_minus) / p.delta).atan();
    let delta_e = SQRT_2 / p.schedule.tau_q() * (a_minus - a0);
    let ratio = 1.0 - a_minus / a0;
    (delta_e, ratio)
}

impl ControlledModel for LzParams {
    fn schedule(&self) -> &RampSchedule {
        &self.schedule
    }

    fn energy_scale(&self) -> f64 {
        self.delta
    }

    fn default_steepness(&self) -> f64 {
        LZ_DEFAULT_STEEPNESS * self.delta
    }

    fn impulse_window(&self) -> Result<ImpulseWindow> {
        Ok(lz_impulse_window(self))
    }

    fn block_count(&self) -> usize {
        1
    }

    fn drift(&self, _block: usize, t: f64) -> Result<HermitianOperator> {
        Ok(lz_hamiltonian(self, t))
    }

    fn cd_field(&self, _block: usize, t: f64) -> Result<HermitianOperator> {
        Ok(lz_cd_field(self, t))
    }

    fn ground_state(&self, _block: usize, t: f64) -> Result<StateVector> {
        Ok(lz_eigenstates(self, t).0)
    }

    fn cd_norm(&self, t: f64) -> f64 {
        SQRT_2 * lz_angle_rate(self, t).abs()
    }

    fn generator<'a>(&'a self, _block: usize, weight: &'a (dyn Fn(f64) -> f64 + Sync)) -> Box<dyn Generator + 'a> {
        Box::new(PauliVectorFn(move |t| [self.delta, weight(t) * lz_angle_rate(self, t), self.field(t)]))
    }

    fn field_operators(&self, _block: usize, g: f64) -> Option<(HermitianOperator, HermitianOperator)> {
        Some((pauli_combination(self.delta, 0.0, g), sigma_z()))
    }

    fn analytic_costs(&self, window: &ImpulseWindow) -> Result<Option<AnalyticCosts>> {
        let (delta_e, ratio) = lz_savings_analytic(self, window);
        Ok(Some(AnalyticCosts {
            cost: lz_cost_analytic(self),
            delta_e,
            ratio,
            thermodynamic_delta_e: None,
            thermodynamic_ratio: None,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kzm::impulse_window_generic;
    use crate::numerics::{frobenius_norm, hermitian_eigensystem, C64};
    use proptest::prelude::*;

    fn params(delta: f64, g0: f64, tau: f64) -> LzParams {
        LzParams::new(delta, g0, tau).unwrap()
    }

    #[test]
    fn hamiltonian_examples() {
        let p = params(1.0, -10.0, 2.0);
        let h = lz_hamiltonian(&p, 1.0);
        assert!(h.matrix().sub(&crate::numerics::sigma_x().matrix().clone()).max_abs() < 1e-15);
        // g = 3 at t = 6.5 on a (g0 = -10, tau = 10) ramp: [[3, 1], [1, -3]]
        let p = params(1.0, -10.0, 10.0);
        let h = lz_hamiltonian(&p, 6.5);
        assert_eq!(h.matrix().get(0, 0), C64::new(3.0, 0.0));
        assert_eq!(h.matrix().get(0, 1), C64::new(1.0, 0.0));
        assert_eq!(h.matrix().get(1, 1), C64::new(-3.0, 0.0));
    }

    #[test]
    fn eigenstates_at_resonance() {
        let p = params(1.0, -10.0, 2.0);
        let (g, e) = lz_eigenstates(&p, 1.0);
        let s = 0.5f64.sqrt();
        assert!((g.amplitude(0).re - s).abs() < 1e-15 && (g.amplitude(1).re + s).abs() < 1e-15);
        assert!(g.inner(&e).norm() < 1e-15);
    }

    #[test]
    fn eigenstates_far_below_resonance() {
        let p = params(1.0, -1e8, 2.0);
        let (g, _) = lz_eigenstates(&p, 0.0);
        assert!((g.amplitude(0).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gap_examples() {
        let p = params(1.0, -10.0, 2.0);
        assert_eq!(lz_gap(&p, 1.0), 2.0);
        let p = params(2.0, -10.0, 24.0);
        let t = p.schedule().time_at(2.0);
        assert!((lz_gap(&p, t) - 2.0 * 2f64.sqrt() * 2.0).abs() < 1e-12);
    }

    #[test]
    fn cd_field_examples() {
        let p = params(1.0, -10.0, 5.0); // ġ = 4
        assert!((frobenius_norm(lz_cd_field(&p, 2.5).matrix()) - 2f64.sqrt() * 2.0).abs() < 1e-14);
        assert!((lz_cd_field(&p, 2.5).matrix().get(1, 0) - C64::new(0.0, -2.0)).norm() < 1e-14);
        let p = params(1.0, -10.0, 20.0); // ġ = 1
        assert!((frobenius_norm(lz_cd_field(&p, 10.0).matrix()) - 0.5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn half_width_examples() {
        let p = params(1.0, -10.0, 2.0);
        assert!((lz_impulse_half_width(&p) - 0.21272).abs() < 1e-5);
        let p = params(1.0, -10.0, 1e-6);
        let mu = lz_impulse_half_width(&p);
        assert!((mu / ((1e-6f64 / 10.0).sqrt() / 2.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn transition_probability_examples() {
        let p = params(1.0, -10.0, 5.0);
        assert!((lz_transition_probability(&p) - (-PI / 4.0).exp()).abs() < 1e-15);
        assert!((lz_transition_probability(&p) - 0.45594).abs() < 1e-5);
        assert!(lz_transition_probability(&params(1.0, -10.0, 1e-9)) > 0.999_999);
        assert!(lz_transition_probability(&params(1.0, -10.0, 1e4)) < 1e-100);
    }

    #[test]
    fn analytic_cost_examples() {
        let p = params(1.0, -10.0, 5.0);
        assert!((lz_cost_analytic(&p) - 0.416098).abs() < 1e-6);
        let p2 = params(1.0, -10.0, 10.0);
        assert!((lz_cost_analytic(&p2) * 2.0 - lz_cost_analytic(&p)).abs() < 1e-15);
        assert!(lz_cost_analytic(&params(1.0, -1e-12, 5.0)) < 1e-12);
    }

    #[test]
    fn analytic_savings_extremes() {
        let p = params(1.0, -10.0, 5.0);
        let (de, r) = lz_savings_analytic(&p, &ImpulseWindow::whole(5.0));
        assert_eq!((de, r), (0.0, 0.0));
        let (_, r) = lz_savings_analytic(&p, &ImpulseWindow::degenerate(5.0));
        assert_eq!(r, 1.0);
        let (_, r) = lz_savings_analytic(&p, &lz_impulse_window(&p));
        assert!((r - 0.4).abs() < 0.1);
    }

    proptest! {
        #[test]
        fn eigen_oracle(delta in 0.1f64..5.0, g0 in -20.0f64..-0.1, frac in 0.0f64..1.0) {
            let p = params(delta, g0, 3.0);
            let t = 3.0 * frac;
            let eig = hermitian_eigensystem(&lz_hamiltonian(&p, t)).unwrap();
            let r = delta.hypot(p.field(t));
            prop_assert!((eig.values[0] + r).abs() < 1e-12 * r.max(1.0));
            prop_assert!((eig.values[1] - eig.values[0] - lz_gap(&p, t)).abs() < 1e-11 * r.max(1.0));
            let (ground, _) = lz_eigenstates(&p, t);
            prop_assert!((lz_hamiltonian(&p, t).expectation(&ground) + r).abs() < 1e-12 * r.max(1.0));
        }

        #[test]
        fn closed_form_half_width_matches_bisection(tau in 0.1f64..50.0) {
            let p = params(1.0, -10.0, tau);
            let w = impulse_window_generic(p.schedule(), |g| 2.0 * (g * g + 1.0f64).sqrt()).unwrap();
            prop_assert!((0.5 * tau - w.t_minus - lz_impulse_half_width(&p)).abs() < 1e-10);
        }
    }
}
