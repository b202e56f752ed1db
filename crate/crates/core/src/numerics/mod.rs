//! Dense complex linear algebra, time-dependent Schrödinger propagation,
//! quadrature and root finding. Units: hbar = 1 throughout.

mod linalg;
mod propagate;
mod quadrature;
mod roots;

pub use linalg::{
    frobenius_norm, hermitian_eigensystem, pauli_combination, sigma_x, sigma_y, sigma_z, ComplexMatrix,
    Eigensystem, HermitianOperator, StateVector, HERMITICITY_TOL,
};
pub use num_complex::Complex64 as C64;
pub use propagate::{propagate, propagate_sampled, Generator, OperatorFn, PauliVectorFn};
pub use quadrature::{integrate, integrate_with_breaks, DEFAULT_REL_TOL};
pub use roots::{bisect_root, bisect_root_default, DEFAULT_BRACKET_TOL};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("generator is not finite at t = {time}")]
    Propagation { time: f64 },
    #[error("operator is not Hermitian: max|A - A†| = {deviation:e} (max|A| = {scale:e})")]
    NotHermitian { deviation: f64, scale: f64 },
    #[error("quadrature did not reach tolerance on [{a}, {b}]")]
    Quadrature { a: f64, b: f64 },
    #[error("root not bracketed on [{lo}, {hi}]")]
    RootNotBracketed { lo: f64, hi: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("{0}")]
    InvalidArgument(String),
}
