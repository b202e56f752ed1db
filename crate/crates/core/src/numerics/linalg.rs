//! Dense complex matrices, Hermitian operators and state vectors.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use super::NumericsError;

/// Default relative tolerance for the hermiticity check.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// A square matrix of complex numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    /// Wraps an existing nalgebra matrix. Panics if it is not square.
    pub fn from_dmatrix(m: DMatrix<C64>) -> Self {
        assert!(m.is_square(), "ComplexMatrix must be square, got {}x{}", m.nrows(), m.ncols());
        Self(m)
    }

    /// Builds a matrix from row-major entries. Panics if `entries.len()` is
    /// not a perfect square.
    pub fn from_row_slice(entries: &[C64]) -> Self {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        assert_eq!(dim * dim, entries.len(), "entry count is not a square");
        Self(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.map(|z| z * factor))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn mul_vec(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.0 * v
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }
}

/// Frobenius norm `sqrt(sum |A_ij|^2)`.
pub fn frobenius_norm(a: &ComplexMatrix) -> f64 {
    a.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// A complex matrix verified to be Hermitian within a relative tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
    tolerance: f64,
}

impl HermitianOperator {
    /// Checks `max|A - A^dagger| <= tol * max|A|` with the default tolerance.
    pub fn new(matrix: ComplexMatrix) -> Result<Self, NumericsError> {
        Self::with_tolerance(matrix, HERMITICITY_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tolerance: f64) -> Result<Self, NumericsError> {
        if !matrix.is_finite() {
            return Err(NumericsError::NonFinite("operator entries".into()));
        }
        let deviation = hermiticity_deviation(&matrix);
        let scale = matrix.max_abs();
        if deviation > tolerance * scale {
            return Err(NumericsError::NotHermitian { deviation, scale });
        }
        Ok(Self { matrix, tolerance })
    }

    pub fn zero(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::zeros(dim), tolerance: HERMITICITY_TOL }
    }

    /// Real diagonal operator.
    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        let m = ComplexMatrix::from_fn(n, |i, j| if i == j { C64::new(entries[i], 0.0) } else { C64::new(0.0, 0.0) });
        Self { matrix: m, tolerance: HERMITICITY_TOL }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { matrix: self.matrix.scaled(factor), tolerance: self.tolerance }
    }

    /// Sum of two Hermitian operators (Hermitian by construction).
    pub fn add(&self, other: &Self) -> Self {
        Self { matrix: self.matrix.add(&other.matrix), tolerance: self.tolerance.max(other.tolerance) }
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, other: &Self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.add(&other.matrix.scaled(factor)),
            tolerance: self.tolerance.max(other.tolerance),
        }
    }

    pub fn apply(&self, psi: &StateVector) -> DVector<C64> {
        self.matrix.mul_vec(psi.amplitudes())
    }

    /// `<psi|A|psi>`, real for Hermitian `A`.
    pub fn expectation(&self, psi: &StateVector) -> f64 {
        psi.amplitudes().dotc(&self.apply(psi)).re
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius_norm(&self.matrix)
    }
}

fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    let d = m.dim();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in i..d {
            let diff = (m.get(i, j) - m.get(j, i).conj()).norm();
            worst = worst.max(diff);
        }
    }
    worst
}

/// Complex amplitude vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(DVector<C64>);

impl StateVector {
    /// Takes amplitudes as given; no normalization.
    pub fn from_amplitudes(amps: Vec<C64>) -> Self {
        Self(DVector::from_vec(amps))
    }

    pub fn from_dvector(v: DVector<C64>) -> Self {
        Self(v)
    }

    /// Rescales to unit norm. Returns an error for the zero vector.
    pub fn normalized(amps: Vec<C64>) -> Result<Self, NumericsError> {
        let v = DVector::from_vec(amps);
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(NumericsError::NonFinite("state normalization".into()));
        }
        Ok(Self(v / C64::new(n, 0.0)))
    }

    /// Computational basis state `|index>`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Self(v)
    }

    /// Real two-component state `cos(theta)|0> + sin(theta)|1>`.
    pub fn qubit(theta: f64) -> Self {
        Self(DVector::from_vec(vec![C64::new(theta.cos(), 0.0), C64::new(theta.sin(), 0.0)]))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn amplitude(&self, i: usize) -> C64 {
        self.0[i]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_squared()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.0.dotc(&other.0)
    }

    /// `|<self|other>|^2`.
    pub fn overlap_probability(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }
}

/// Eigen-decomposition of a Hermitian operator with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: Vec<StateVector>,
}

impl Eigensystem {
    pub fn ground(&self) -> (f64, &StateVector) {
        (self.values[0], &self.vectors[0])
    }
}

/// Eigenvalues in ascending order with orthonormal eigenvectors. The phase of
/// each eigenvector is fixed so that its largest-magnitude component (first
/// one on ties) is real and positive.
pub fn hermitian_eigensystem(a: &HermitianOperator) -> Result<Eigensystem, NumericsError> {
    if !a.matrix().is_finite() {
        return Err(NumericsError::NonFinite("eigensystem input".into()));
    }
    let dim = a.dim();
    let eig = SymmetricEigen::new(a.matrix().as_dmatrix().clone());
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mut values = Vec::with_capacity(dim);
    let mut vectors = Vec::with_capacity(dim);
    for i in order {
        values.push(eig.eigenvalues[i]);
        let col: DVector<C64> = eig.eigenvectors.column(i).into_owned();
        vectors.push(StateVector(fix_phase(col)));
    }
    Ok(Eigensystem { values, vectors })
}

fn fix_phase(mut v: DVector<C64>) -> DVector<C64> {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return v;
    }
    let pivot = v.iter().position(|z| z.norm() >= max * (1.0 - 1e-10)).unwrap_or(0);
    let phase = v[pivot] / C64::new(v[pivot].norm(), 0.0);
    let rot = phase.conj();
    v.iter_mut().for_each(|z| *z *= rot);
    v[pivot] = C64::new(v[pivot].re, 0.0);
    v
}

pub fn sigma_x() -> HermitianOperator {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    HermitianOperator { matrix: ComplexMatrix::from_row_slice(&[o, l, l, o]), tolerance: HERMITICITY_TOL }
}

pub fn sigma_y() -> HermitianOperator {
    let o = C64::new(0.0, 0.0);
    let i = C64::new(0.0, 1.0);
    HermitianOperator { matrix: ComplexMatrix::from_row_slice(&[o, -i, i, o]), tolerance: HERMITICITY_TOL }
}

pub fn sigma_z() -> HermitianOperator {
    HermitianOperator::diagonal(&[1.0, -1.0])
}

/// `a * sigma_x + b * sigma_y + c * sigma_z`.
pub fn pauli_combination(a: f64, b: f64, c: f64) -> HermitianOperator {
    HermitianOperator {
        matrix: ComplexMatrix::from_row_slice(&[
            C64::new(c, 0.0),
            C64::new(a, -b),
            C64::new(a, b),
            C64::new(-c, 0.0),
        ]),
        tolerance: HERMITICITY_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn frobenius_of_zero_and_sigma_y() {
        assert_eq!(frobenius_norm(&ComplexMatrix::zeros(3)), 0.0);
        assert_relative_eq!(sigma_y().frobenius_norm(), 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn frobenius_matches_trace_form() {
        let a = ComplexMatrix::from_row_slice(&[c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0), c(4.0, -1.0)]);
        let tr = a.adjoint().matmul(&a).trace().re;
        assert_relative_eq!(frobenius_norm(&a), tr.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = ComplexMatrix::from_row_slice(&[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(HermitianOperator::new(a), Err(NumericsError::NotHermitian { .. })));
    }

    #[test]
    fn sigma_z_eigensystem() {
        let e = hermitian_eigensystem(&sigma_z()).unwrap();
        assert_eq!(e.values, vec![-1.0, 1.0]);
        assert_relative_eq!(e.vectors[0].amplitude(1).re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(e.vectors[1].amplitude(0).re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn sigma_x_eigensystem_phase_convention() {
        let e = hermitian_eigensystem(&sigma_x()).unwrap();
        let s = 0.5f64.sqrt();
        assert_relative_eq!(e.values[0], -1.0, epsilon = 1e-14);
        assert_relative_eq!(e.values[1], 1.0, epsilon = 1e-14);
        // (|0> - |1>)/sqrt2 and (|0> + |1>)/sqrt2, first component positive on ties
        assert_relative_eq!(e.vectors[0].amplitude(0).re, s, epsilon = 1e-12);
        assert_relative_eq!(e.vectors[0].amplitude(1).re, -s, epsilon = 1e-12);
        assert_relative_eq!(e.vectors[1].amplitude(0).re, s, epsilon = 1e-12);
        assert_relative_eq!(e.vectors[1].amplitude(1).re, s, epsilon = 1e-12);
    }

    #[test]
    fn pauli_combination_matches_sum() {
        let direct = sigma_x().scaled(0.3).add(&sigma_y().scaled(-1.2)).add(&sigma_z().scaled(2.0));
        let combo = pauli_combination(0.3, -1.2, 2.0);
        assert!(combo.matrix().sub(direct.matrix()).max_abs() < 1e-15);
    }
}
