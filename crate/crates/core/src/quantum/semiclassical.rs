use rayon::prelude::*;

use super::kernel::WavePacket;
use super::propagator::exact_kernel;
use super::{QuantumError, QuantumModel};
use crate::dynamics::{classical_propagator, FlowOptions, PhasePoint};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemiclassicalOptions {
    /// Initial packet width in units of the coherent width √(ħ/2).
    pub width_factor: f64,
    pub flow: FlowOptions,
}

impl Default for SemiclassicalOptions {
    fn default() -> Self {
        Self {
            width_factor: 1.0,
            flow: FlowOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcentrationRow {
    pub hbar: f64,
    /// Standard deviation of the initial |ψ|².
    pub initial_width: f64,
    /// Standard deviation of the final |ψ|².
    pub final_width: f64,
    /// √⟨(q − q_cl)²⟩ under the final |ψ|².
    pub spread: f64,
    pub peak: f64,
    pub classical_endpoint: f64,
    pub peak_offset: f64,
    pub norm: f64,
}

/// Evolves a Gaussian packet centred on φ_i with the closed-form kernel and
/// measures how tightly |ψ(q_f)|² sits around the classical endpoint.
pub fn semiclassical_concentration(
    model: QuantumModel,
    phi_i: &PhasePoint,
    t: f64,
    hbars: &[f64],
    opts: &SemiclassicalOptions,
) -> Result<Vec<ConcentrationRow>, QuantumError> {
    if phi_i.len() != 2 {
        return Err(QuantumError::InvalidParameter("one degree of freedom only".into()));
    }
    if !(t >= 0.0 && t.is_finite()) || !(opts.width_factor > 0.0) {
        return Err(QuantumError::InvalidParameter("need T ≥ 0 and a positive width factor".into()));
    }
    let cl = classical_propagator(&model.classical(), phi_i, 0.0, t, &opts.flow)?;
    let q_cl = cl.phi_final[0];
    let (q0, p0) = (phi_i[0], phi_i[1]);
    hbars
        .par_iter()
        .map(|&hbar| {
            let width = opts.width_factor * (hbar / 2.0).sqrt();
            let psi0 = WavePacket::gaussian(q0, p0, width, hbar)?;
            let psi = if t == 0.0 { psi0 } else { exact_kernel(model, t, hbar)?.apply(&psi0)? };
            let peak = psi.mean();
            Ok(ConcentrationRow {
                hbar,
                initial_width: width,
                final_width: psi.width(),
                spread: psi.spread_about(q_cl),
                peak,
                classical_endpoint: q_cl,
                peak_offset: (peak - q_cl).abs(),
                norm: psi.norm(),
            })
        })
        .collect()
}

/// Fitted p in spread ∝ ħ^p.
pub fn scaling_exponent(rows: &[ConcentrationRow]) -> Option<f64> {
    if rows.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.hbar.ln(), r.spread.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Largest relative departure of spread/√ħ from its value in the first row.
pub fn scaling_deviation(rows: &[ConcentrationRow]) -> f64 {
    let Some(first) = rows.first() else { return 0.0 };
    let reference = first.spread / first.hbar.sqrt();
    rows.iter()
        .map(|r| (r.spread / r.hbar.sqrt() / reference - 1.0).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn halving_hbar() {
        let phi = DVector::from_row_slice(&[1.0, 0.0]);
        let rows = semiclassical_concentration(QuantumModel::Harmonic, &phi, 1.3, &[0.2, 0.1], &Default::default()).unwrap();
        let ratio = rows[1].spread / rows[0].spread;
        assert!((ratio - 0.5f64.sqrt()).abs() < 0.2 * 0.5f64.sqrt());
        assert!(rows.iter().all(|r| (r.norm - 1.0).abs() < 1e-10));
    }

    #[test]
    fn zero_time_spread_is_initial_width() {
        let phi = DVector::from_row_slice(&[0.4, 0.7]);
        let rows = semiclassical_concentration(QuantumModel::Free, &phi, 0.0, &[0.3], &Default::default()).unwrap();
        assert!((rows[0].spread - rows[0].initial_width).abs() < 1e-15);
    }

    #[test]
    fn peak_follows_classical_endpoint() {
        let phi = DVector::from_row_slice(&[1.0, 0.5]);
        for model in [QuantumModel::Free, QuantumModel::Harmonic] {
            let rows = semiclassical_concentration(model, &phi, 2.0, &[1.0, 0.1, 0.01], &Default::default()).unwrap();
            let last = rows.last().unwrap();
            assert!(last.peak_offset < last.final_width / 10.0);
            assert!(scaling_deviation(&rows) < 0.2);
            assert!((scaling_exponent(&rows).unwrap() - 0.5).abs() < 0.1);
        }
    }
}
