use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::numerics::{ComplexMatrix, HermitianOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// Real coefficient times a tensor product of single-site Pauli operators.
///
/// Site `i` of an `N`-site string acts on bit `N - 1 - i` of the
/// computational-basis index, so site 0 is the most significant qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliString {
    pub coefficient: f64,
    pub labels: Vec<Pauli>,
}

impl PauliString {
    pub fn new(coefficient: f64, labels: Vec<Pauli>) -> Self {
        Self { coefficient, labels }
    }

    /// Identity everywhere except the listed sites; site indices wrap
    /// modulo `n`. Later entries for the same site multiply onto earlier ones
    /// only if they are equal labels (which gives identity); mixing different
    /// labels on one site is a logic error and panics.
    pub fn from_sites(n: usize, coefficient: f64, sites: &[(usize, Pauli)]) -> Self {
        let mut labels = vec![Pauli::I; n];
        for &(site, p) in sites {
            let s = site % n;
            labels[s] = match (labels[s], p) {
                (Pauli::I, q) => q,
                (a, b) if a == b => Pauli::I,
                (a, b) => panic!("conflicting labels {a:?} and {b:?} on site {s}"),
            };
        }
        Self { coefficient, labels }
    }

    pub fn sites(&self) -> usize {
        self.labels.len()
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.labels.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub(crate) fn compile(&self) -> CompiledString {
        let n = self.labels.len();
        let (mut flip, mut sign_mask, mut ny) = (0usize, 0usize, 0u32);
        for (site, p) in self.labels.iter().enumerate() {
            let bit = 1usize << (n - 1 - site);
            match p {
                Pauli::I => {}
                Pauli::X => flip |= bit,
                Pauli::Y => {
                    flip |= bit;
                    sign_mask |= bit;
                    ny += 1;
                }
                Pauli::Z => sign_mask |= bit,
            }
        }
        let i_power = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)];
        CompiledString { flip, sign_mask, phase: i_power[(ny % 4) as usize] * self.coefficient }
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(1 << self.labels.len()).into_dmatrix();
        self.compile().accumulate_into(&mut m, 1.0);
        ComplexMatrix::from_dmatrix(m)
    }

    pub fn to_operator(&self) -> HermitianOperator {
        HermitianOperator::new(self.to_matrix()).expect("Pauli strings with real coefficients are Hermitian")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}·", self.coefficient)?;
        for p in &self.labels {
            write!(f, "{p:?}")?;
        }
        Ok(())
    }
}

/// Dense sum of Pauli strings.
pub fn strings_to_operator(n: usize, strings: &[PauliString]) -> HermitianOperator {
    let mut m = ComplexMatrix::zeros(1 << n).into_dmatrix();
    for s in strings {
        s.compile().accumulate_into(&mut m, 1.0);
    }
    HermitianOperator::new(ComplexMatrix::from_dmatrix(m)).expect("sum of Hermitian strings")
}

/// Bit-mask form: `P|b> = phase (-1)^{popcount(b & sign_mask)} |b ^ flip>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct CompiledString {
    pub flip: usize,
    pub sign_mask: usize,
    pub phase: C64,
}

impl CompiledString {
    fn sign(&self, b: usize) -> f64 {
        if (b & self.sign_mask).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    fn accumulate_into(&self, m: &mut nalgebra::DMatrix<C64>, scale: f64) {
        for b in 0..m.ncols() {
            m[(b ^ self.flip, b)] += self.phase * (scale * self.sign(b));
        }
    }

    /// `out += scale * P psi`.
    #[inline]
    pub fn apply_add(&self, scale: f64, psi: &[C64], out: &mut [C64]) {
        let z = self.phase * scale;
        for (b, amp) in psi.iter().enumerate() {
            let s = if (b & self.sign_mask).count_ones() & 1 == 0 { z } else { -z };
            out[b ^ self.flip] += s * amp;
        }
    }
}
