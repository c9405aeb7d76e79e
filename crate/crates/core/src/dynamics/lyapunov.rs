//! Lyapunov spectrum from the Jacobi matrix with periodic QR
//! re-orthonormalisation (Benettin et al.).

use nalgebra::DMatrix;

use super::flow::{advance, resolve_scheme, step_plan, FlowOptions, Tangent};
use super::model::{HamiltonianModel, PhasePoint};
use super::DynamicsError;

#[derive(Clone, Debug, PartialEq)]
pub struct LyapunovSpectrum {
    /// Sorted descending.
    pub exponents: Vec<f64>,
    /// Σ exponents; vanishes for volume-preserving flows.
    pub sum: f64,
    pub renormalizations: usize,
}

pub fn lyapunov_spectrum(
    model: &dyn HamiltonianModel,
    phi0: &PhasePoint,
    total_time: f64,
    renorm_interval: f64,
    opts: &FlowOptions,
) -> Result<LyapunovSpectrum, DynamicsError> {
    let d = 2 * model.dof();
    if phi0.len() != d {
        return Err(DynamicsError::DimensionMismatch { expected: d, got: phi0.len() });
    }
    if !(total_time.is_finite() && total_time > 0.0) {
        return Err(DynamicsError::InvalidSpan { t_i: 0.0, t_f: total_time });
    }
    if !(renorm_interval > 0.0 && renorm_interval <= total_time) {
        return Err(DynamicsError::InvalidParameter(format!(
            "renormalisation interval {renorm_interval} must lie in (0, T]"
        )));
    }
    let scheme = resolve_scheme(model, opts.integrator)?;
    let (blocks, block_len) = step_plan(total_time, renorm_interval)?;
    let (steps, h) = step_plan(block_len, opts.dt)?;

    let mut phi = phi0.clone();
    let mut tangent = Tangent {
        jacobi: DMatrix::identity(d, d),
        adjoint: None,
        lambda: None,
    };
    let mut log_growth = vec![0.0; d];
    for b in 0..blocks {
        for _ in 0..steps {
            advance(model, scheme, &mut phi, Some(&mut tangent), h);
        }
        if !phi.iter().chain(tangent.jacobi.iter()).all(|x| x.is_finite()) {
            return Err(DynamicsError::NonFinite { t: (b + 1) as f64 * block_len });
        }
        let qr = tangent.jacobi.clone().qr();
        let r = qr.r();
        for (i, acc) in log_growth.iter_mut().enumerate() {
            *acc += r[(i, i)].abs().ln();
        }
        tangent.jacobi = qr.q();
    }
    let mut exponents: Vec<f64> = log_growth.iter().map(|g| g / total_time).collect();
    exponents.sort_by(|a, b| b.total_cmp(a));
    let sum = exponents.iter().sum();
    Ok(LyapunovSpectrum {
        exponents,
        sum,
        renormalizations: blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::model::BuiltinModel;
    use nalgebra::DVector;

    fn pt(q: f64, p: f64) -> PhasePoint {
        DVector::from_row_slice(&[q, p])
    }

    #[test]
    fn harmonic_exponents_vanish() {
        let s = lyapunov_spectrum(&BuiltinModel::Harmonic, &pt(1.0, 0.0), 1000.0, 1.0, &FlowOptions::default()).unwrap();
        assert_eq!(s.exponents.len(), 2);
        assert!(s.exponents.iter().all(|l| l.abs() < 1e-3), "{:?}", s.exponents);
        assert!(s.sum.abs() < 1e-3);
        assert_eq!(s.renormalizations, 1000);
    }

    #[test]
    fn free_particle_separates_algebraically() {
        let s = lyapunov_spectrum(&BuiltinModel::Free, &pt(0.0, 1.0), 1000.0, 10.0, &FlowOptions::default()).unwrap();
        assert!(s.exponents.iter().all(|l| l.abs() < 1e-2), "{:?}", s.exponents);
        assert!(s.sum.abs() < 1e-3);
        assert!(s.exponents[0] >= s.exponents[1]);
    }

    #[test]
    fn rejects_bad_interval() {
        assert!(lyapunov_spectrum(&BuiltinModel::Free, &pt(0.0, 1.0), 1.0, 2.0, &FlowOptions::default()).is_err());
    }
}
