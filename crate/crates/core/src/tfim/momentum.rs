use std::f64::consts::SQRT_2;

use super::{
    modes_for, subspace_angle, subspace_angle_rate, subspace_fields, subspace_hamiltonian_at, tfim_cost_analytic,
    tfim_impulse_window, tfim_savings_analytic, tfim_savings_thermo, MomentumMode, TfimParams,
};
use crate::error::{Error, Result};
use crate::kzm::{ImpulseWindow, RampSchedule, TFIM_DEFAULT_STEEPNESS};
use crate::numerics::{pauli_combination, Generator, HermitianOperator, PauliVectorFn, StateVector};
use crate::protocol::{simulate, AnalyticCosts, ControlMode, ControlledModel, Protocol, SimulationTrace};

/// Ising chain as `N/2` independent momentum-space two-level systems.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumModel {
    params: TfimParams,
    modes: Vec<MomentumMode>,
}

impl MomentumModel {
    pub fn new(params: TfimParams) -> Self {
        Self { modes: modes_for(params.n()), params }
    }

    pub fn params(&self) -> &TfimParams {
        &self.params
    }

    pub fn modes(&self) -> &[MomentumMode] {
        &self.modes
    }

    fn mode(&self, block: usize) -> Result<f64> {
        self.modes
            .get(block)
            .map(|m| m.k)
            .ok_or_else(|| Error::param(format!("mode index {block} out of range")))
    }
}

impl ControlledModel for MomentumModel {
    fn schedule(&self) -> &RampSchedule {
        self.params.schedule()
    }

    fn energy_scale(&self) -> f64 {
        self.params.omega()
    }

    fn default_steepness(&self) -> f64 {
        TFIM_DEFAULT_STEEPNESS * self.params.omega()
    }

    fn impulse_window(&self) -> Result<ImpulseWindow> {
        tfim_impulse_window(&self.params)
    }

    fn block_count(&self) -> usize {
        self.modes.len()
    }

    fn drift(&self, block: usize, t: f64) -> Result<HermitianOperator> {
        Ok(subspace_hamiltonian_at(self.params.omega(), self.mode(block)?, self.params.field(t)))
    }

    fn cd_field(&self, block: usize, t: f64) -> Result<HermitianOperator> {
        let rate = subspace_angle_rate(self.mode(block)?, self.params.field(t), self.params.schedule().rate());
        Ok(pauli_combination(0.0, rate, 0.0))
    }

    fn ground_state(&self, block: usize, t: f64) -> Result<StateVector> {
        Ok(StateVector::qubit(subspace_angle(self.params.omega(), self.mode(block)?, self.params.field(t))))
    }

    fn cd_norm(&self, t: f64) -> f64 {
        let g = self.params.field(t);
        let rate = self.params.schedule().rate();
        self.modes.iter().map(|m| SQRT_2 * subspace_angle_rate(m.k, g, rate).abs()).sum()
    }

    fn field_operators(&self, block: usize, g: f64) -> Option<(HermitianOperator, HermitianOperator)> {
        let k = self.modes.get(block)?.k;
        let omega = self.params.omega();
        Some((subspace_hamiltonian_at(omega, k, g), pauli_combination(0.0, 0.0, -2.0 * omega)))
    }

    fn analytic_costs(&self, window: &ImpulseWindow) -> Result<Option<AnalyticCosts>> {
        let (delta_e, ratio) = tfim_savings_analytic(&self.params, window);
        let (thermo_de, thermo_ratio) = tfim_savings_thermo(&self.params, window)?;
        Ok(Some(AnalyticCosts {
            cost: tfim_cost_analytic(&self.params),
            delta_e,
            ratio,
            thermodynamic_delta_e: Some(thermo_de),
            thermodynamic_ratio: Some(thermo_ratio),
        }))
    }

    fn generator<'a>(&'a self, block: usize, weight: &'a (dyn Fn(f64) -> f64 + Sync)) -> Box<dyn Generator + 'a> {
        let k = self.modes[block].k;
        let omega = self.params.omega();
        let schedule = *self.params.schedule();
        Box::new(PauliVectorFn(move |t| {
            let g = schedule.value(t);
            let (hx, hz) = subspace_fields(omega, k, g);
            [hx, weight(t) * subspace_angle_rate(k, g, schedule.rate()), -hz]
        }))
    }
}

/// Evolves every momentum mode under the chosen control and returns the
/// product-state fidelity trace.
pub fn momentum_evolve(p: &TfimParams, mode: ControlMode) -> Result<SimulationTrace> {
    Ok(simulate(&MomentumModel::new(*p), &Protocol::new(mode))?.trace)
}
