use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rayon::prelude::*;

use super::kernel::{GaussianKernel, KernelValue};
use super::{QuantumError, QuantumModel};

/// |sin T| below this is treated as a caustic.
pub const CAUSTIC_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagatorRequest {
    pub model: QuantumModel,
    pub q_i: f64,
    pub q_f: f64,
    pub t: f64,
    pub hbar: f64,
    pub slices: usize,
}

impl PropagatorRequest {
    fn validate(&self) -> Result<(), QuantumError> {
        let finite = [self.q_i, self.q_f, self.t, self.hbar].iter().all(|v| v.is_finite());
        if !finite || self.t <= 0.0 || self.hbar <= 0.0 {
            return Err(QuantumError::InvalidParameter(format!(
                "need finite q, T > 0 and ħ > 0 (T = {}, ħ = {})",
                self.t, self.hbar
            )));
        }
        Ok(())
    }
}

/// Closed-form kernel. For the oscillator the phase picks up −π/2 at each
/// caustic crossed, so kernels for T beyond π stay continuous in T.
pub fn exact_kernel(model: QuantumModel, t: f64, hbar: f64) -> Result<GaussianKernel, QuantumError> {
    if !(t > 0.0 && hbar > 0.0 && t.is_finite() && hbar.is_finite()) {
        return Err(QuantumError::InvalidParameter("need T > 0 and ħ > 0".into()));
    }
    Ok(match model {
        QuantumModel::Free => GaussianKernel {
            a: 0.5 / t,
            b: -1.0 / t,
            c: 0.5 / t,
            log_modulus: -0.5 * (2.0 * PI * hbar * t).ln(),
            phase: -FRAC_PI_4,
            hbar,
        },
        QuantumModel::Harmonic => {
            let (s, c) = t.sin_cos();
            if s.abs() < CAUSTIC_TOLERANCE {
                return Err(QuantumError::Caustic { distance: s.abs() });
            }
            let crossings = (t / PI).floor();
            GaussianKernel {
                a: c / (2.0 * s),
                b: -1.0 / s,
                c: c / (2.0 * s),
                log_modulus: -0.5 * (2.0 * PI * hbar * s.abs()).ln(),
                phase: -FRAC_PI_4 - FRAC_PI_2 * crossings,
                hbar,
            }
        }
    })
}

pub fn exact_propagator(req: &PropagatorRequest) -> Result<KernelValue, QuantumError> {
    req.validate()?;
    let k = exact_kernel(req.model, req.t, req.hbar)?;
    Ok(k.value(req.q_f, req.q_i, req.model.caustic_distance(req.t)))
}

/// One slice of length ε with the trapezoidal action
/// (x − y)²/(2ε) − ε v (x² + y²)/2.
pub fn short_time_kernel(model: QuantumModel, eps: f64, hbar: f64) -> GaussianKernel {
    let v = model.potential();
    GaussianKernel {
        a: 0.5 / eps - 0.5 * eps * v,
        b: -1.0 / eps,
        c: 0.5 / eps - 0.5 * eps * v,
        log_modulus: -0.5 * (2.0 * PI * hbar * eps).ln(),
        phase: -FRAC_PI_4,
        hbar,
    }
}

/// N-slice kernel by sequential closed-form convolution over the N − 1
/// intermediate positions.
pub fn sliced_kernel(model: QuantumModel, t: f64, hbar: f64, slices: usize) -> Result<GaussianKernel, QuantumError> {
    if slices == 0 {
        return Err(QuantumError::InvalidParameter("need at least one slice".into()));
    }
    let step = short_time_kernel(model, t / slices as f64, hbar);
    let mut k = step;
    for _ in 1..slices {
        k = step.compose(&k)?;
    }
    Ok(k)
}

pub fn sliced_propagator(req: &PropagatorRequest) -> Result<KernelValue, QuantumError> {
    req.validate()?;
    let k = sliced_kernel(req.model, req.t, req.hbar, req.slices)?;
    Ok(k.value(req.q_f, req.q_i, req.model.caustic_distance(req.t)))
}

pub fn relative_error(approx: &KernelValue, exact: &KernelValue) -> f64 {
    (approx.value - exact.value).norm() / exact.modulus
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergencePoint {
    pub slices: usize,
    pub relative_error: f64,
}

pub fn convergence_sweep(base: &PropagatorRequest, slices: &[usize]) -> Result<Vec<ConvergencePoint>, QuantumError> {
    let exact = exact_propagator(base)?;
    slices
        .par_iter()
        .map(|&n| {
            let v = sliced_propagator(&PropagatorRequest { slices: n, ..*base })?;
            Ok(ConvergencePoint {
                slices: n,
                relative_error: relative_error(&v, &exact),
            })
        })
        .collect()
}

/// Least-squares order p in error ∝ N^{−p}.
pub fn fit_order(points: &[ConvergencePoint]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.relative_error > 0.0)
        .map(|p| ((p.slices as f64).ln(), p.relative_error.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(-sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req(model: QuantumModel, q_i: f64, q_f: f64, t: f64, slices: usize) -> PropagatorRequest {
        PropagatorRequest {
            model,
            q_i,
            q_f,
            t,
            hbar: 1.0,
            slices,
        }
    }

    #[test]
    fn free_at_origin() {
        let v = exact_propagator(&req(QuantumModel::Free, 0.0, 0.0, 1.0, 1)).unwrap();
        let expected = num_complex::Complex64::new(0.0, 2.0 * PI).powf(-0.5);
        assert!((v.value - expected).norm() < 1e-15);
    }

    #[test]
    fn oscillator_quarter_period() {
        let v = exact_propagator(&req(QuantumModel::Harmonic, 1.0, 0.0, FRAC_PI_2, 1)).unwrap();
        assert!((v.modulus - (2.0 * PI).powf(-0.5)).abs() < 1e-15);
        assert!((v.caustic_distance - 1.0).abs() < 1e-15);
    }

    #[test]
    fn oscillator_short_time_is_free() {
        let ho = exact_propagator(&req(QuantumModel::Harmonic, 0.0, 0.0, 1e-3, 1)).unwrap();
        let fr = exact_propagator(&req(QuantumModel::Free, 0.0, 0.0, 1e-3, 1)).unwrap();
        assert!(relative_error(&ho, &fr) < 1e-6);
        // away from the origin the potential phase enters at first order
        let short = short_time_kernel(QuantumModel::Harmonic, 1e-3, 1.0);
        for (qi, qf) in [(0.3, 0.31), (-0.2, -0.2), (1.0, 0.98)] {
            let ho = exact_propagator(&req(QuantumModel::Harmonic, qi, qf, 1e-3, 1)).unwrap();
            let e = relative_error(&short.value(qf, qi, 1e-3), &ho);
            assert!(e < 1e-6, "{e}");
        }
    }

    #[test]
    fn caustic_is_reported() {
        let r = exact_propagator(&req(QuantumModel::Harmonic, 0.0, 0.0, PI, 1));
        assert!(matches!(r, Err(QuantumError::Caustic { .. })));
        assert!(matches!(QuantumModel::from_name("quartic"), Err(QuantumError::UnsupportedModel(_))));
    }

    #[test]
    fn group_law_across_a_caustic() {
        for model in [QuantumModel::Free, QuantumModel::Harmonic] {
            for (t1, t2) in [(0.4, 0.9), (2.0, 2.5), (1.2, 3.9)] {
                let k = exact_kernel(model, t2, 1.3).unwrap().compose(&exact_kernel(model, t1, 1.3).unwrap()).unwrap();
                let direct = exact_kernel(model, t1 + t2, 1.3).unwrap();
                for (x, y) in [(0.0, 0.0), (0.7, -0.4), (1.5, 2.0)] {
                    let (m1, p1) = k.eval(x, y);
                    let (m2, p2) = direct.eval(x, y);
                    assert!((m1 - m2).abs() < 1e-8 * m2, "{model:?} {t1} {t2}");
                    assert!((p1 - p2).abs() < 1e-8, "{model:?} {t1} {t2}: {p1} vs {p2}");
                }
            }
        }
    }

    #[test]
    fn free_slicing_is_exact() {
        for n in [1, 2, 3, 17, 256] {
            let r = req(QuantumModel::Free, 0.3, -0.8, 1.7, n);
            let e = relative_error(&sliced_propagator(&r).unwrap(), &exact_propagator(&r).unwrap());
            assert!(e < 1e-12, "N = {n}: {e}");
        }
    }

    #[test]
    fn oscillator_slicing_converges_quadratically() {
        let base = req(QuantumModel::Harmonic, 1.0, 0.5, 1.0, 0);
        let pts = convergence_sweep(&base, &[2, 4, 8, 16, 32, 64, 128, 256, 512]).unwrap();
        for w in pts.windows(2) {
            assert!(w[1].relative_error < w[0].relative_error);
        }
        assert!(pts.last().unwrap().relative_error < 1e-3);
        let p = fit_order(&pts).unwrap();
        assert!((p - 2.0).abs() < 0.3, "order {p}");
    }

    #[test]
    fn sliced_kernels_are_unitary() {
        let k = sliced_kernel(QuantumModel::Harmonic, 2.0, 0.5, 64).unwrap();
        assert!(k.unitarity_defect() < 1e-10);
    }

    proptest::proptest! {
        #[test]
        fn group_law(t1 in 0.05f64..1.4, t2 in 0.05f64..1.4, x in -2.0f64..2.0, y in -2.0f64..2.0, hbar in 0.1f64..2.0) {
            for model in [QuantumModel::Free, QuantumModel::Harmonic] {
                let k = exact_kernel(model, t2, hbar).unwrap().compose(&exact_kernel(model, t1, hbar).unwrap()).unwrap();
                let direct = exact_kernel(model, t1 + t2, hbar).unwrap();
                let (m1, p1) = k.eval(x, y);
                let (m2, p2) = direct.eval(x, y);
                proptest::prop_assert!((m1 - m2).abs() < 1e-8 * m2);
                proptest::prop_assert!((p1 - p2).abs() < 1e-8 * (1.0 + p2.abs()));
            }
        }

        #[test]
        fn sliced_norm_is_conserved(n in 2usize..200, t in 0.1f64..3.0, q0 in -1.0f64..1.0, p0 in -1.0f64..1.0) {
            let k = sliced_kernel(QuantumModel::Harmonic, t, 1.0, n).unwrap();
            let psi = crate::quantum::WavePacket::gaussian(q0, p0, 0.5, 1.0).unwrap();
            proptest::prop_assert!((k.apply(&psi).unwrap().norm() - 1.0).abs() < 1e-6);
        }
    }
}
