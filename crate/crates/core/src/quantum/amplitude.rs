//! Ghost-sector form of P = K ∫ |⟨φ_f, c_f | φ_i, c_i⟩|² dc_i dc_f.
//!
//! On an N-slice lattice the ghost part of the kernel is
//! Π_k exp{i c̄_k · (c_{k+1} − M_k c_k)} · exp{i c̄_f · c_N}, where M_k is
//! the one-slice Jacobi transporter. Interior ghosts are integrated out one
//! slice at a time, which leaves a function of c_0 = c_i and c̄_f only. Its
//! Grassmann square is then integrated over dc_i dc̄_f.
//!
//! The bosonic deltas are Gaussians of width ε. The amplitude is a Gaussian
//! of width √2 ε, so its square is (8πε²)^{-n} times the normalised
//! width-ε Gaussian, and K = (8πε²)^n / G with G the ghost integral.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::QuantumError;
use crate::dynamics::{classical_propagator, extended_flow, ExtendedState, FlowOptions, HamiltonianModel, PhasePoint};
use crate::grassmann::{create_algebra, Algebra, CoefficientMode, GeneratorRole, GeneratorTable, GrassmannElement};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmplitudeOptions {
    pub slices: usize,
    pub epsilon: f64,
    pub flow: FlowOptions,
    /// Scan half-width in units of ε and points per ε for locating the
    /// bosonic peak.
    pub scan_half_width: f64,
    pub scan_density: usize,
}

impl Default for AmplitudeOptions {
    fn default() -> Self {
        Self {
            slices: 4,
            epsilon: 1e-2,
            flow: FlowOptions::default(),
            scan_half_width: 3.0,
            scan_density: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeReport {
    pub t: f64,
    pub slices: usize,
    pub epsilon: f64,
    pub det_transporter: f64,
    /// ∫ dc_i dc̄_f of the Grassmann square of the ghost kernel.
    pub ghost_integral: Complex64,
    pub constant: Complex64,
    pub lattice_endpoint: PhasePoint,
    pub classical_endpoint: PhasePoint,
    pub bosonic_peak: PhasePoint,
    pub peak_offset: f64,
    /// Remaining Grassmann content after the integration; zero when the
    /// integrand was a pure top form in c_i, c̄_f.
    pub residual_grassmann: f64,
}

struct GhostTable {
    algebra: Algebra<Complex64>,
    c: Vec<Vec<usize>>,
    cbar: Vec<Vec<usize>>,
    cbar_f: Vec<usize>,
}

fn ghost_table(d: usize, n: usize) -> Result<GhostTable, QuantumError> {
    let mut gens: Vec<(String, GeneratorRole)> = Vec::new();
    let mut c = Vec::new();
    let mut cbar = Vec::new();
    for k in 0..=n {
        c.push((0..d).map(|a| {
            gens.push((format!("c{k}_{a}"), GeneratorRole::GhostC));
            gens.len() - 1
        }).collect());
    }
    for k in 0..n {
        cbar.push((0..d).map(|a| {
            gens.push((format!("c̄{k}_{a}"), GeneratorRole::GhostCBar));
            gens.len() - 1
        }).collect());
    }
    let cbar_f = (0..d)
        .map(|a| {
            gens.push((format!("c̄f_{a}"), GeneratorRole::GhostCBar));
            gens.len() - 1
        })
        .collect();
    let table: Arc<GeneratorTable> = create_algebra(CoefficientMode::Float, &gens)?;
    Ok(GhostTable {
        algebra: Algebra::new(table)?,
        c,
        cbar,
        cbar_f,
    })
}

/// i c̄ · (next − M prev), with `prev` absent for the final boundary factor.
fn bilinear(
    alg: &Algebra<Complex64>,
    cbar: &[usize],
    next: &[usize],
    transport: Option<(&DMatrix<f64>, &[usize])>,
) -> Result<GrassmannElement<Complex64>, QuantumError> {
    let mut x = alg.zero();
    for a in 0..cbar.len() {
        let mut v = alg.generator(next[a])?;
        if let Some((m, prev)) = transport {
            for b in 0..prev.len() {
                if m[(a, b)] != 0.0 {
                    v = v.try_sub(&alg.generator(prev[b])?.scale(&Complex64::from(m[(a, b)])))?;
                }
            }
        }
        x = x.try_add(&alg.generator(cbar[a])?.try_mul(&v)?)?;
    }
    Ok(x.scale(&Complex64::i()))
}

/// Ghost kernel as a function of c_i and c̄_f, given one-slice transporters.
fn ghost_kernel(g: &GhostTable, steps: &[DMatrix<f64>]) -> Result<GrassmannElement<Complex64>, QuantumError> {
    let alg = &g.algebra;
    let mut e = alg.one();
    for (k, m) in steps.iter().enumerate() {
        let x = bilinear(alg, &g.cbar[k], &g.c[k + 1], Some((m, &g.c[k])))?;
        e = e.try_mul(&x.exp()?)?;
        let mut gens = g.cbar[k].clone();
        if k > 0 {
            gens.extend(&g.c[k]);
        }
        e = e.berezin(&gens)?;
    }
    let n = steps.len();
    let x = bilinear(alg, &g.cbar_f, &g.c[n], None)?;
    e = e.try_mul(&x.exp()?)?;
    if n > 0 {
        e = e.berezin(&g.c[n])?;
    }
    Ok(e)
}

fn slice_transporters(
    model: &dyn HamiltonianModel,
    phi_i: &PhasePoint,
    t: f64,
    n: usize,
    flow: &FlowOptions,
) -> Result<(Vec<DMatrix<f64>>, PhasePoint), QuantumError> {
    let d = phi_i.len();
    if t == 0.0 {
        return Ok((vec![DMatrix::identity(d, d); n], phi_i.clone()));
    }
    let h = t / n as f64;
    let mut phi = phi_i.clone();
    let mut out = Vec::with_capacity(n);
    let opts = FlowOptions {
        sample_every: usize::MAX,
        ..*flow
    };
    for k in 0..n {
        let s0 = ExtendedState::initial(k as f64 * h, phi.clone(), DVector::zeros(d));
        let traj = extended_flow(model, &s0, (k + 1) as f64 * h, &opts)?;
        let end = traj.endpoint();
        out.push(end.jacobi.clone());
        phi = end.phi.clone();
    }
    Ok((out, phi))
}

pub fn probability_amplitude_check(
    model: &dyn HamiltonianModel,
    phi_i: &PhasePoint,
    t: f64,
    opts: &AmplitudeOptions,
) -> Result<AmplitudeReport, QuantumError> {
    if !model.is_quadratic() {
        return Err(QuantumError::UnsupportedModel(model.name().to_string()));
    }
    if opts.slices == 0 || !(opts.epsilon > 0.0) || !(t >= 0.0 && t.is_finite()) {
        return Err(QuantumError::InvalidParameter("need N ≥ 1, ε > 0 and T ≥ 0".into()));
    }
    let d = phi_i.len();
    let ndof = d / 2;
    let (steps, lattice_endpoint) = slice_transporters(model, phi_i, t, opts.slices, &opts.flow)?;
    let j_total = steps.iter().fold(DMatrix::identity(d, d), |acc, m| m * acc);
    let det = j_total.determinant();
    if !det.is_finite() || det.abs() < 1e-12 {
        return Err(QuantumError::DegenerateTransporter(det));
    }

    let g = ghost_table(d, opts.slices)?;
    let amp = ghost_kernel(&g, &steps)?;
    let square = amp.try_mul(&amp.conjugate())?;
    let mut measure = g.c[0].clone();
    measure.extend(&g.cbar_f);
    let integrated = square.berezin(&measure)?;
    let ghost_integral = integrated.scalar_part();
    let residual_grassmann = integrated
        .terms()
        .filter(|(m, _)| m.degree() > 0)
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max);
    if ghost_integral.norm() < 1e-300 {
        return Err(QuantumError::DegenerateTransporter(det));
    }
    let eps = opts.epsilon;
    let constant = Complex64::from((8.0 * PI * eps * eps).powi(ndof as i32)) / ghost_integral;

    let classical = classical_propagator(model, phi_i, 0.0, t, &opts.flow)?.phi_final;
    let bosonic_peak = scan_peak(&lattice_endpoint, &classical, eps, opts);
    let peak_offset = (&bosonic_peak - &classical).norm();
    Ok(AmplitudeReport {
        t,
        slices: opts.slices,
        epsilon: eps,
        det_transporter: det,
        ghost_integral,
        constant,
        lattice_endpoint,
        classical_endpoint: classical,
        bosonic_peak,
        peak_offset,
        residual_grassmann,
    })
}

/// |a(φ)|² with a the width-√2ε Gaussian centred on the lattice endpoint.
fn bosonic_square(phi: &PhasePoint, centre: &PhasePoint, eps: f64) -> f64 {
    let d = phi.len() as i32;
    let r2 = (phi - centre).norm_squared();
    (4.0 * PI * eps * eps).powi(-d) * (-r2 / (2.0 * eps * eps)).exp()
}

/// Grid maximum of |a|² around the classical endpoint (one degree of freedom
/// only; larger systems return the lattice endpoint itself).
fn scan_peak(centre: &PhasePoint, around: &PhasePoint, eps: f64, opts: &AmplitudeOptions) -> PhasePoint {
    if centre.len() != 2 {
        return centre.clone();
    }
    let h = eps / opts.scan_density.max(1) as f64;
    let m = (opts.scan_half_width * opts.scan_density as f64).ceil() as i64;
    let mut best = (f64::NEG_INFINITY, around.clone());
    for i in -m..=m {
        for j in -m..=m {
            let p = DVector::from_row_slice(&[around[0] + i as f64 * h, around[1] + j as f64 * h]);
            let v = bosonic_square(&p, centre, eps);
            if v > best.0 {
                best = (v, p);
            }
        }
    }
    best.1
}
