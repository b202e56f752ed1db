//! Dense spin-basis simulation with range-truncated counterdiabatic control.

use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use super::pauli::{strings_to_operator, CompiledString, Pauli, PauliString};
use super::{tfim_impulse_window, TfimParams};
use crate::error::{Error, Result};
use crate::kzm::{ImpulseWindow, RampSchedule, TFIM_DEFAULT_STEEPNESS};
use crate::numerics::{hermitian_eigensystem, ComplexMatrix, Generator, HermitianOperator, NumericsError, StateVector};
use crate::protocol::{simulate, ControlMode, ControlledModel, Protocol, SimulationTrace};

/// Largest chain simulated in the dense `2^N` basis.
pub const MAX_SPIN_SITES: usize = 10;

/// Relative gap below which the even-parity ground level counts as degenerate.
const DEGENERATE_GROUND_TOL: f64 = 1e-10;

fn check_size(n: usize) -> Result<()> {
    if n > MAX_SPIN_SITES {
        return Err(Error::TooLarge { n, max: MAX_SPIN_SITES });
    }
    Ok(())
}

/// Terms of `-ω Σ_i [g X_i + Z_i Z_{i+1}]`, periodic.
pub fn spin_hamiltonian_terms(n: usize, omega: f64, g: f64) -> Vec<PauliString> {
    let field = (0..n).map(|i| PauliString::from_sites(n, -omega * g, &[(i, Pauli::X)]));
    let bonds = (0..n).map(|i| PauliString::from_sites(n, -omega, &[(i, Pauli::Z), (i + 1, Pauli::Z)]));
    field.chain(bonds).collect()
}

pub fn spin_hamiltonian(p: &TfimParams, t: f64) -> Result<HermitianOperator> {
    check_size(p.n())?;
    Ok(strings_to_operator(p.n(), &spin_hamiltonian_terms(p.n(), p.omega(), p.field(t))))
}

/// Parity `Π_i X_i`.
pub fn parity_operator(n: usize) -> Result<HermitianOperator> {
    check_size(n)?;
    let sites: Vec<_> = (0..n).map(|i| (i, Pauli::X)).collect();
    Ok(PauliString::from_sites(n, 1.0, &sites).to_operator())
}

/// Range-`m` counterdiabatic operator with unit coefficients,
/// `Σ_s [Z_s X_{s+1}⋯X_{s+m-1} Y_{s+m} + Y_s X_{s+1}⋯X_{s+m-1} Z_{s+m}]`.
///
/// This is the usual `X Z⋯Z Y + Y Z⋯Z X` form written in the frame where the
/// transverse field is along `x` and the coupling along `z`.
pub fn cd_range_terms(n: usize, m: usize) -> Vec<PauliString> {
    let mut out = Vec::with_capacity(2 * n);
    for s in 0..n {
        for (head, tail) in [(Pauli::Z, Pauli::Y), (Pauli::Y, Pauli::Z)] {
            let mut sites = vec![(s, head)];
            sites.extend((1..m).map(|j| (s + j, Pauli::X)));
            sites.push((s + m, tail));
            out.push(PauliString::from_sites(n, 1.0, &sites));
        }
    }
    out
}

/// `u_m(g) = (g^{2m} + g^N) / (8 g^{m+1} (1 + g^N))`, evaluated as
/// `(g^{m-1} + g^{N-m-1}) / (8 (1 + g^N))` so that `g = 0` is regular.
pub fn u_coefficient(m: usize, g: f64, n: usize) -> f64 {
    let pow = |e: usize| if e == 0 { 1.0 } else { g.powi(e as i32) };
    (pow(m - 1) + pow(n - m - 1)) / (8.0 * (1.0 + pow(n)))
}

/// Weight of range `m` in the exact sum: `1/2` at `m = N/2`, where each
/// bond is counted from both ends of the ring.
fn range_weight(m: usize, n: usize) -> f64 {
    if 2 * m == n {
        0.5
    } else {
        1.0
    }
}

/// Overall sign relating the range-`m` operators to `ġ u_m(g)` in this
/// frame; fixed by requiring exact tracking at `M = N/2`.
const CD_SIGN: f64 = 1.0;

fn range_coefficient(m: usize, n: usize, g: f64, g_dot: f64) -> f64 {
    CD_SIGN * g_dot * range_weight(m, n) * u_coefficient(m, g, n)
}

/// Maximum interaction range `M` of the truncated counterdiabatic field;
/// `M = N/2` is exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TruncationRange(usize);

impl TruncationRange {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || 2 * m > n {
            return Err(Error::param(format!("truncation range must be in 1..={}, got {m}", n / 2)));
        }
        Ok(Self(m))
    }

    pub fn full(n: usize) -> Self {
        Self(n / 2)
    }

    pub fn get(&self) -> usize {
        self.0
    }

    pub fn is_exact(&self, n: usize) -> bool {
        2 * self.0 == n
    }
}

/// Terms of the truncated field `Σ_{m=1}^{M} w_m u_m(g) ġ H^{[m]}`.
pub fn truncated_cd_terms(p: &TfimParams, range: TruncationRange, t: f64) -> Vec<PauliString> {
    let n = p.n();
    let g = p.field(t);
    let g_dot = p.schedule().rate();
    (1..=range.get())
        .flat_map(|m| {
            let c = range_coefficient(m, n, g, g_dot);
            cd_range_terms(n, m).into_iter().map(move |mut s| {
                s.coefficient *= c;
                s
            })
        })
        .collect()
}

pub fn truncated_cd_field(p: &TfimParams, range: TruncationRange, t: f64) -> Result<HermitianOperator> {
    check_size(p.n())?;
    Ok(strings_to_operator(p.n(), &truncated_cd_terms(p, range, t)))
}

/// Restriction of a parity-symmetric operator to the even sector, in the
/// basis `(|b> + |b̄>)/√2` for `b` with site 0 up.
fn even_sector(h: &HermitianOperator, n: usize) -> HermitianOperator {
    let full = (1usize << n) - 1;
    let half = 1usize << (n - 1);
    let m = h.matrix();
    let reduced = ComplexMatrix::from_fn(half, |a, b| m.get(a, b) + m.get(a, b ^ full));
    HermitianOperator::with_tolerance(reduced, 1e-10).expect("parity-symmetric input")
}

/// Lowest eigenpair of `h` within the even-parity sector.
pub fn even_parity_ground_state(h: &HermitianOperator, n: usize, time: f64) -> Result<(f64, StateVector)> {
    let reduced = even_sector(h, n);
    let eig = hermitian_eigensystem(&reduced)?;
    let (e0, e1) = (eig.values[0], eig.values[1]);
    if e1 - e0 < DEGENERATE_GROUND_TOL * e0.abs().max(1.0) {
        return Err(Error::DegenerateGround { time });
    }
    let full = (1usize << n) - 1;
    let v = &eig.vectors[0];
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    for b in 0..(1usize << (n - 1)) {
        let a = v.amplitude(b) * FRAC_1_SQRT_2;
        amps[b] = a;
        amps[b ^ full] = a;
    }
    Ok((e0, StateVector::from_amplitudes(amps)))
}

/// Dense spin-basis model with counterdiabatic range `M`.
#[derive(Clone, Debug)]
pub struct SpinModel {
    params: TfimParams,
    range: TruncationRange,
    field_strings: Vec<CompiledString>,
    bond_diagonal: Vec<f64>,
    cd_strings: Vec<Vec<CompiledString>>,
    /// `Tr(H^[m] H^[m'])` for `m, m' = 1..=N/2`.
    gram: Vec<Vec<f64>>,
}

impl SpinModel {
    pub fn new(params: TfimParams, range: TruncationRange) -> Result<Self> {
        let n = params.n();
        check_size(n)?;
        TruncationRange::new(range.get(), n)?;
        let field_strings = (0..n).map(|i| PauliString::from_sites(n, 1.0, &[(i, Pauli::X)]).compile()).collect();
        let bond_diagonal = (0..1usize << n)
            .map(|b| {
                (0..n)
                    .map(|i| {
                        let (x, y) = (bit(b, n, i), bit(b, n, (i + 1) % n));
                        if x == y {
                            1.0
                        } else {
                            -1.0
                        }
                    })
                    .sum()
            })
            .collect();
        let full = n / 2;
        let ranges: Vec<Vec<PauliString>> = (1..=full).map(|m| cd_range_terms(n, m)).collect();
        let cd_strings = ranges.iter().map(|r| r.iter().map(PauliString::compile).collect()).collect();
        let gram = gram_matrix(n, &ranges);
        Ok(Self { params, range, field_strings, bond_diagonal, cd_strings, gram })
    }

    pub fn params(&self) -> &TfimParams {
        &self.params
    }

    pub fn range(&self) -> TruncationRange {
        self.range
    }

    fn cd_norm_up_to(&self, range: usize, t: f64) -> f64 {
        let n = self.params.n();
        let g = self.params.field(t);
        let rate = self.params.schedule().rate();
        let c: Vec<f64> = (1..=range).map(|m| range_coefficient(m, n, g, rate)).collect();
        let mut sum = 0.0;
        for (i, ci) in c.iter().enumerate() {
            for (j, cj) in c.iter().enumerate() {
                sum += ci * cj * self.gram[i][j];
            }
        }
        sum.max(0.0).sqrt()
    }
}

fn bit(b: usize, n: usize, site: usize) -> bool {
    (b >> (n - 1 - site)) & 1 == 1
}

/// Frobenius inner products of the range operators, from label coincidences.
fn gram_matrix(n: usize, ranges: &[Vec<PauliString>]) -> Vec<Vec<f64>> {
    let dim = (1u64 << n) as f64;
    let tallies: Vec<HashMap<&[Pauli], f64>> = ranges
        .iter()
        .map(|r| {
            let mut h = HashMap::new();
            for s in r {
                *h.entry(s.labels.as_slice()).or_insert(0.0) += s.coefficient;
            }
            h
        })
        .collect();
    tallies
        .iter()
        .map(|a| {
            tallies
                .iter()
                .map(|b| a.iter().map(|(k, ca)| ca * b.get(k).copied().unwrap_or(0.0)).sum::<f64>() * dim)
                .collect()
        })
        .collect()
}

struct SpinGenerator<'a> {
    model: &'a SpinModel,
    weight: &'a (dyn Fn(f64) -> f64 + Sync),
}

impl Generator for SpinGenerator<'_> {
    fn apply(&self, t: f64, psi: &DVector<C64>, out: &mut DVector<C64>) -> std::result::Result<(), NumericsError> {
        let p = &self.model.params;
        let (n, omega) = (p.n(), p.omega());
        let g = p.field(t);
        let w = (self.weight)(t);
        if !(g.is_finite() && w.is_finite()) {
            return Err(NumericsError::Propagation { time: t });
        }
        let psi = psi.as_slice();
        let out = out.as_mut_slice();
        for (o, (d, a)) in out.iter_mut().zip(self.model.bond_diagonal.iter().zip(psi)) {
            *o = a * (-omega * d);
        }
        for s in &self.model.field_strings {
            s.apply_add(-omega * g, psi, out);
        }
        if w != 0.0 {
            let rate = p.schedule().rate();
            for m in 1..=self.model.range.get() {
                let c = w * range_coefficient(m, n, g, rate);
                if !c.is_finite() {
                    return Err(NumericsError::Propagation { time: t });
                }
                for s in &self.model.cd_strings[m - 1] {
                    s.apply_add(c, psi, out);
                }
            }
        }
        Ok(())
    }
}

impl ControlledModel for SpinModel {
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
        1
    }

    fn drift(&self, _block: usize, t: f64) -> Result<HermitianOperator> {
        spin_hamiltonian(&self.params, t)
    }

    fn cd_field(&self, _block: usize, t: f64) -> Result<HermitianOperator> {
        truncated_cd_field(&self.params, self.range, t)
    }

    fn ground_state(&self, _block: usize, t: f64) -> Result<StateVector> {
        let h = spin_hamiltonian(&self.params, t)?;
        Ok(even_parity_ground_state(&h, self.params.n(), t)?.1)
    }

    fn cd_norm(&self, t: f64) -> f64 {
        self.cd_norm_up_to(self.range.get(), t)
    }

    fn reference_cd_norm(&self, t: f64) -> f64 {
        self.cd_norm_up_to(self.params.n() / 2, t)
    }

    fn generator<'a>(&'a self, _block: usize, weight: &'a (dyn Fn(f64) -> f64 + Sync)) -> Box<dyn Generator + 'a> {
        Box::new(SpinGenerator { model: self, weight })
    }
}

/// Dense evolution under `H_0 + [mode] H_CD^{(M)}` from the even-parity
/// ground state.
pub fn spin_evolve(p: &TfimParams, mode: ControlMode, range: TruncationRange) -> Result<SimulationTrace> {
    Ok(simulate(&SpinModel::new(*p, range)?, &Protocol::new(mode))?.trace)
}
