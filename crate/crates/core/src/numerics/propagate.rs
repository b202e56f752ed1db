//! Fixed-step fourth-order Runge-Kutta integration of `i d/dt psi = H(t) psi`
//! (hbar = 1).

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use super::linalg::{HermitianOperator, StateVector};
use super::NumericsError;

/// A time-dependent Hamiltonian acting on state vectors.
///
/// `apply` writes `H(t) psi` into `out` and must fail with
/// [`NumericsError::Propagation`] if `H(t)` is not finite.
pub trait Generator {
    fn apply(&self, t: f64, psi: &DVector<C64>, out: &mut DVector<C64>) -> Result<(), NumericsError>;
}

/// Adapts any `Fn(f64) -> HermitianOperator` into a [`Generator`].
pub struct OperatorFn<F>(pub F);

impl<F> Generator for OperatorFn<F>
where
    F: Fn(f64) -> HermitianOperator,
{
    fn apply(&self, t: f64, psi: &DVector<C64>, out: &mut DVector<C64>) -> Result<(), NumericsError> {
        let h = (self.0)(t);
        if !h.matrix().is_finite() {
            return Err(NumericsError::Propagation { time: t });
        }
        out.gemv(C64::new(1.0, 0.0), h.matrix().as_dmatrix(), psi, C64::new(0.0, 0.0));
        Ok(())
    }
}

/// Two-level generator `a σ_x + b σ_y + c σ_z` from a coefficient function,
/// avoiding a matrix allocation per evaluation.
pub struct PauliVectorFn<F>(pub F);

impl<F> Generator for PauliVectorFn<F>
where
    F: Fn(f64) -> [f64; 3],
{
    fn apply(&self, t: f64, psi: &DVector<C64>, out: &mut DVector<C64>) -> Result<(), NumericsError> {
        let [a, b, c] = (self.0)(t);
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(NumericsError::Propagation { time: t });
        }
        let off = C64::new(a, -b);
        out[0] = psi[0] * c + off * psi[1];
        out[1] = off.conj() * psi[0] - psi[1] * c;
        Ok(())
    }
}

impl<G: Generator + ?Sized> Generator for &G {
    fn apply(&self, t: f64, psi: &DVector<C64>, out: &mut DVector<C64>) -> Result<(), NumericsError> {
        (**self).apply(t, psi, out)
    }
}

/// Propagates `psi0` from `t_start` to `t_end` in `steps` equal RK4 steps and
/// returns the state at every step, endpoints included.
pub fn propagate<G: Generator + ?Sized>(
    generator: &G,
    psi0: &StateVector,
    t_start: f64,
    t_end: f64,
    steps: usize,
) -> Result<Vec<(f64, StateVector)>, NumericsError> {
    let mut out = Vec::with_capacity(steps + 1);
    propagate_sampled(generator, psi0, t_start, t_end, steps, steps + 1, |t, psi| {
        out.push((t, psi.clone()));
        Ok(())
    })?;
    Ok(out)
}

/// Like [`propagate`] but only hands `samples` states (endpoints included) to
/// `observer`. Sample `j` is taken at step `floor(j * steps / (samples - 1))`,
/// which is uniform when `samples - 1` divides `steps`. Returns the final state.
pub fn propagate_sampled<G, O>(
    generator: &G,
    psi0: &StateVector,
    t_start: f64,
    t_end: f64,
    steps: usize,
    samples: usize,
    mut observer: O,
) -> Result<StateVector, NumericsError>
where
    G: Generator + ?Sized,
    O: FnMut(f64, &StateVector) -> Result<(), NumericsError>,
{
    if steps == 0 {
        return Err(NumericsError::InvalidArgument("steps must be at least 1".into()));
    }
    if samples < 2 {
        return Err(NumericsError::InvalidArgument("at least two samples are required".into()));
    }
    if !(t_start.is_finite() && t_end.is_finite()) {
        return Err(NumericsError::InvalidArgument("non-finite time span".into()));
    }

    let dim = psi0.dim();
    let h = (t_end - t_start) / steps as f64;
    let minus_i = C64::new(0.0, -1.0);
    let mut psi = psi0.amplitudes().clone();
    let mut k1 = DVector::zeros(dim);
    let mut k2 = DVector::zeros(dim);
    let mut k3 = DVector::zeros(dim);
    let mut k4 = DVector::zeros(dim);
    let mut tmp = DVector::zeros(dim);

    let sample_step = |j: usize| (j as u128 * steps as u128 / (samples as u128 - 1)) as usize;
    let mut next_sample = 0usize;
    let mut state = StateVector::from_dvector(psi.clone());

    for i in 0..=steps {
        let t = if i == steps { t_end } else { t_start + i as f64 * h };
        while next_sample < samples && sample_step(next_sample) == i {
            state = StateVector::from_dvector(psi.clone());
            observer(t, &state)?;
            next_sample += 1;
        }
        if i == steps {
            break;
        }

        let half = t + 0.5 * h;
        generator.apply(t, &psi, &mut k1)?;
        k1 *= minus_i;

        tmp.copy_from(&psi);
        tmp.axpy(C64::new(0.5 * h, 0.0), &k1, C64::new(1.0, 0.0));
        generator.apply(half, &tmp, &mut k2)?;
        k2 *= minus_i;

        tmp.copy_from(&psi);
        tmp.axpy(C64::new(0.5 * h, 0.0), &k2, C64::new(1.0, 0.0));
        generator.apply(half, &tmp, &mut k3)?;
        k3 *= minus_i;

        tmp.copy_from(&psi);
        tmp.axpy(C64::new(h, 0.0), &k3, C64::new(1.0, 0.0));
        generator.apply(t + h, &tmp, &mut k4)?;
        k4 *= minus_i;

        let w = C64::new(h / 6.0, 0.0);
        psi.axpy(w, &k1, C64::new(1.0, 0.0));
        psi.axpy(w * 2.0, &k2, C64::new(1.0, 0.0));
        psi.axpy(w * 2.0, &k3, C64::new(1.0, 0.0));
        psi.axpy(w, &k4, C64::new(1.0, 0.0));
        if !psi.norm_squared().is_finite() {
            return Err(NumericsError::Propagation { time: t + h });
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linalg::{sigma_x, sigma_z};
    use std::f64::consts::PI;

    #[test]
    fn zero_generator_is_identity() {
        let psi0 = StateVector::normalized(vec![C64::new(0.6, 0.1), C64::new(-0.2, 0.7)]).unwrap();
        let trace = propagate(&OperatorFn(|_| HermitianOperator::zero(2)), &psi0, 0.0, 3.0, 50).unwrap();
        assert_eq!(trace.len(), 51);
        for (_, psi) in &trace {
            assert_eq!(psi, &psi0);
        }
    }

    #[test]
    fn rabi_half_period() {
        let delta = 1.7;
        let g = OperatorFn(move |_| sigma_x().scaled(delta));
        let trace = propagate(&g, &StateVector::basis(2, 0), 0.0, PI / (2.0 * delta), 2000).unwrap();
        let (t_last, last) = trace.last().unwrap();
        assert_eq!(*t_last, PI / (2.0 * delta));
        assert!((last.amplitude(1).norm_sqr() - 1.0).abs() < 1e-8);
        // exp(-i pi/2 sigma_x)|0> = -i|1>
        assert!((last.amplitude(1) - C64::new(0.0, -1.0)).norm() < 1e-8);
    }

    #[test]
    fn non_finite_generator_reports_time() {
        let g = OperatorFn(|t: f64| if t > 0.5 { sigma_z().scaled(f64::NAN) } else { sigma_z() });
        let err = propagate(&g, &StateVector::basis(2, 0), 0.0, 1.0, 10).unwrap_err();
        match err {
            NumericsError::Propagation { time } => assert!(time > 0.5 && time <= 0.6 + 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sampling_includes_endpoints() {
        let g = OperatorFn(|_| sigma_x());
        let mut times = Vec::new();
        propagate_sampled(&g, &StateVector::basis(2, 0), 1.0, 2.0, 100, 11, |t, _| {
            times.push(t);
            Ok(())
        })
        .unwrap();
        assert_eq!(times.len(), 11);
        assert_eq!(times[0], 1.0);
        assert_eq!(*times.last().unwrap(), 2.0);
        assert!((times[5] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn pauli_vector_matches_dense() {
        use crate::numerics::linalg::pauli_combination;
        let coeffs = |t: f64| [0.3 + t, -1.1 * t, 2.0 - t];
        let fast = PauliVectorFn(coeffs);
        let dense = OperatorFn(move |t| {
            let [a, b, c] = coeffs(t);
            pauli_combination(a, b, c)
        });
        let psi0 = StateVector::normalized(vec![C64::new(0.2, 0.5), C64::new(-0.7, 0.1)]).unwrap();
        let a = propagate(&fast, &psi0, 0.0, 2.0, 300).unwrap();
        let b = propagate(&dense, &psi0, 0.0, 2.0, 300).unwrap();
        let diff = (a.last().unwrap().1.amplitudes() - b.last().unwrap().1.amplitudes()).norm();
        assert!(diff < 1e-14);
    }

    #[test]
    fn overflowing_state_is_an_error() {
        let g = OperatorFn(|_| sigma_z().scaled(10.0));
        let err = propagate(&g, &StateVector::basis(2, 0), 0.0, 1e100, 2).unwrap_err();
        assert!(matches!(err, NumericsError::Propagation { .. }));
    }

    #[test]
    fn rejects_zero_steps() {
        let g = OperatorFn(|_| sigma_x());
        assert!(propagate(&g, &StateVector::basis(2, 0), 0.0, 1.0, 0).is_err());
    }
}
