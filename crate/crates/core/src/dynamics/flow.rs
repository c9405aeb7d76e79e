//! Hamilton flow in the extended space (φ, λ, J, J̄).
//!
//! J transports the ghosts c^a (Jacobi fields), J̄ transports the ghosts
//! c̄_a and λ contragrediently, so that c̄_a c^a and λ_a c^a are preserved.
//! For separable H the split integrators propagate the exact tangent map of
//! each sub-step, which keeps det J = 1 and J̄ᵀJ = I to rounding error.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::model::{hamilton_field, symplectic_matrix, HamiltonianModel, PhasePoint};
use super::DynamicsError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    /// Yoshida4 for separable models, Rk4 otherwise.
    Auto,
    /// Strang-split kick–drift–kick.
    Leapfrog,
    /// Fourth-order symmetric composition of three leapfrog steps.
    Yoshida4,
    Rk4,
}

/// How λ is propagated. Only the homogeneous part λ̇ = −Aᵀλ is integrated
/// numerically; the Grassmann-bilinear source from ∂³H is checked on the
/// symbolic lattice instead. `Sourced` is accepted only where that source
/// vanishes identically (quadratic H).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaMode {
    Homogeneous,
    Sourced,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowOptions {
    pub dt: f64,
    pub integrator: Integrator,
    /// Record every k-th step (the final state is always recorded).
    pub sample_every: usize,
    pub lambda_mode: LambdaMode,
    /// Post-check bound on |det J − 1| and max |J̄ᵀJ − I|.
    pub invariant_tolerance: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            integrator: Integrator::Auto,
            sample_every: 1,
            lambda_mode: LambdaMode::Homogeneous,
            invariant_tolerance: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseTrajectory {
    pub times: Vec<f64>,
    pub points: Vec<PhasePoint>,
    /// max |H(φ(t)) − H(φ(t_i))| over all steps.
    pub energy_drift: f64,
}

impl PhaseTrajectory {
    pub fn endpoint(&self) -> &PhasePoint {
        self.points.last().expect("trajectory is never empty")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedState {
    pub t: f64,
    pub phi: PhasePoint,
    pub lambda: DVector<f64>,
    /// c-sector transporter, J(t_i) = I.
    pub jacobi: DMatrix<f64>,
    /// c̄-sector transporter.
    pub adjoint: DMatrix<f64>,
}

impl ExtendedState {
    pub fn initial(t: f64, phi: PhasePoint, lambda: DVector<f64>) -> Self {
        let d = phi.len();
        Self {
            t,
            phi,
            lambda,
            jacobi: DMatrix::identity(d, d),
            adjoint: DMatrix::identity(d, d),
        }
    }

    pub fn det_jacobi(&self) -> f64 {
        self.jacobi.determinant()
    }

    /// max |(J̄ᵀJ − I)_{ab}|
    pub fn pairing_error(&self) -> f64 {
        let d = self.phi.len();
        (self.adjoint.transpose() * &self.jacobi - DMatrix::identity(d, d)).amax()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ExtendedState>,
    pub energy_drift: f64,
    pub max_det_error: f64,
    pub max_pairing_error: f64,
}

impl Trajectory {
    pub fn endpoint(&self) -> &ExtendedState {
        self.states.last().expect("trajectory is never empty")
    }
}

pub(crate) struct Tangent {
    pub jacobi: DMatrix<f64>,
    pub adjoint: Option<DMatrix<f64>>,
    pub lambda: Option<DVector<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Scheme {
    Leapfrog,
    Yoshida4,
    Rk4,
}

pub(crate) fn resolve_scheme(
    model: &dyn HamiltonianModel,
    integrator: Integrator,
) -> Result<Scheme, DynamicsError> {
    match integrator {
        Integrator::Auto if model.is_separable() => Ok(Scheme::Yoshida4),
        Integrator::Auto | Integrator::Rk4 => Ok(Scheme::Rk4),
        Integrator::Leapfrog | Integrator::Yoshida4 if !model.is_separable() => {
            Err(DynamicsError::NotSeparable(model.name().to_string()))
        }
        Integrator::Leapfrog => Ok(Scheme::Leapfrog),
        Integrator::Yoshida4 => Ok(Scheme::Yoshida4),
    }
}

/// Splits a span into equal steps no longer than `dt`.
pub(crate) fn step_plan(span: f64, dt: f64) -> Result<(usize, f64), DynamicsError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(DynamicsError::StepUnderflow(dt));
    }
    let steps = (span / dt - 1e-9).ceil().max(1.0);
    if !steps.is_finite() || steps > 1e12 {
        return Err(DynamicsError::StepUnderflow(dt));
    }
    let h = span / steps;
    if h <= f64::EPSILON * span.abs().max(1.0) {
        return Err(DynamicsError::StepUnderflow(h));
    }
    Ok((steps as usize, h))
}

const YOSHIDA_W1: f64 = 1.351_207_191_959_657_6; // 1 / (2 − 2^{1/3})
const YOSHIDA_W0: f64 = -1.702_414_383_919_315_3; // −2^{1/3} / (2 − 2^{1/3})

pub(crate) fn advance(
    model: &dyn HamiltonianModel,
    scheme: Scheme,
    phi: &mut PhasePoint,
    tangent: Option<&mut Tangent>,
    h: f64,
) {
    match scheme {
        Scheme::Leapfrog => leapfrog(model, phi, tangent, h),
        Scheme::Yoshida4 => {
            let mut tangent = tangent;
            for w in [YOSHIDA_W1, YOSHIDA_W0, YOSHIDA_W1] {
                leapfrog(model, phi, tangent.as_deref_mut(), w * h);
            }
        }
        Scheme::Rk4 => rk4(model, phi, tangent, h),
    }
}

fn leapfrog(model: &dyn HamiltonianModel, phi: &mut PhasePoint, tangent: Option<&mut Tangent>, h: f64) {
    let mut tangent = tangent;
    kick(model, phi, tangent.as_deref_mut(), 0.5 * h);
    drift(model, phi, tangent.as_deref_mut(), h);
    kick(model, phi, tangent, 0.5 * h);
}

/// p ← p − τ ∂_qH(q). Tangent map [[I, 0], [−τH_qq, I]].
fn kick(model: &dyn HamiltonianModel, phi: &mut PhasePoint, tangent: Option<&mut Tangent>, tau: f64) {
    let n = model.dof();
    if let Some(t) = tangent {
        let hqq = model.hessian(phi).view((0, 0), (n, n)).into_owned();
        let jq = t.jacobi.rows(0, n).into_owned();
        let mut jp = t.jacobi.rows_mut(n, n);
        jp -= &hqq * &jq * tau;
        // inverse transpose [[I, τH_qq], [0, I]]
        if let Some(adj) = t.adjoint.as_mut() {
            let ap = adj.rows(n, n).into_owned();
            let mut aq = adj.rows_mut(0, n);
            aq += &hqq * ap * tau;
        }
        if let Some(l) = t.lambda.as_mut() {
            let lp = l.rows(n, n).into_owned();
            let mut lq = l.rows_mut(0, n);
            lq += &hqq * lp * tau;
        }
    }
    let g = model.gradient(phi);
    for j in 0..n {
        phi[n + j] -= tau * g[j];
    }
}

/// q ← q + τ ∂_pH(p). Tangent map [[I, τH_pp], [0, I]].
fn drift(model: &dyn HamiltonianModel, phi: &mut PhasePoint, tangent: Option<&mut Tangent>, tau: f64) {
    let n = model.dof();
    if let Some(t) = tangent {
        let hpp = model.hessian(phi).view((n, n), (n, n)).into_owned();
        let jp = t.jacobi.rows(n, n).into_owned();
        let mut jq = t.jacobi.rows_mut(0, n);
        jq += &hpp * &jp * tau;
        // inverse transpose [[I, 0], [−τH_pp, I]]
        if let Some(adj) = t.adjoint.as_mut() {
            let aq = adj.rows(0, n).into_owned();
            let mut ap = adj.rows_mut(n, n);
            ap -= &hpp * aq * tau;
        }
        if let Some(l) = t.lambda.as_mut() {
            let lq = l.rows(0, n).into_owned();
            let mut lp = l.rows_mut(n, n);
            lp -= &hpp * lq * tau;
        }
    }
    let g = model.gradient(phi);
    for j in 0..n {
        phi[j] += tau * g[n + j];
    }
}

struct Deriv {
    phi: DVector<f64>,
    jacobi: Option<DMatrix<f64>>,
    adjoint: Option<DMatrix<f64>>,
    lambda: Option<DVector<f64>>,
}

fn extended_rhs(
    model: &dyn HamiltonianModel,
    omega: &DMatrix<f64>,
    phi: &PhasePoint,
    jacobi: Option<&DMatrix<f64>>,
    adjoint: Option<&DMatrix<f64>>,
    lambda: Option<&DVector<f64>>,
) -> Deriv {
    let field = hamilton_field(model, phi);
    if jacobi.is_none() && adjoint.is_none() && lambda.is_none() {
        return Deriv {
            phi: field,
            jacobi: None,
            adjoint: None,
            lambda: None,
        };
    }
    let a = omega * model.hessian(phi);
    let at = a.transpose();
    Deriv {
        phi: field,
        jacobi: jacobi.map(|j| &a * j),
        adjoint: adjoint.map(|m| -(&at * m)),
        lambda: lambda.map(|l| -(&at * l)),
    }
}

fn rk4(model: &dyn HamiltonianModel, phi: &mut PhasePoint, tangent: Option<&mut Tangent>, h: f64) {
    let omega = symplectic_matrix(model.dof());
    match tangent {
        None => {
            let k1 = hamilton_field(model, phi);
            let k2 = hamilton_field(model, &(&*phi + &k1 * (0.5 * h)));
            let k3 = hamilton_field(model, &(&*phi + &k2 * (0.5 * h)));
            let k4 = hamilton_field(model, &(&*phi + &k3 * h));
            *phi += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        Some(t) => {
            let stage = |scale: f64, k: Option<&Deriv>| {
                let shift_v = |base: &DVector<f64>, d: Option<&DVector<f64>>| match d {
                    Some(d) => base + d * scale,
                    None => base.clone(),
                };
                let shift_m = |base: &DMatrix<f64>, d: Option<&DMatrix<f64>>| match d {
                    Some(d) => base + d * scale,
                    None => base.clone(),
                };
                let p = shift_v(phi, k.map(|k| &k.phi));
                let j = shift_m(&t.jacobi, k.and_then(|k| k.jacobi.as_ref()));
                let a = t
                    .adjoint
                    .as_ref()
                    .map(|a| shift_m(a, k.and_then(|k| k.adjoint.as_ref())));
                let l = t
                    .lambda
                    .as_ref()
                    .map(|l| shift_v(l, k.and_then(|k| k.lambda.as_ref())));
                extended_rhs(model, &omega, &p, Some(&j), a.as_ref(), l.as_ref())
            };
            let k1 = stage(0.0, None);
            let k2 = stage(0.5 * h, Some(&k1));
            let k3 = stage(0.5 * h, Some(&k2));
            let k4 = stage(h, Some(&k3));
            let w = h / 6.0;
            *phi += (&k1.phi + &k2.phi * 2.0 + &k3.phi * 2.0 + &k4.phi) * w;
            let combine_m = |f: fn(&Deriv) -> Option<&DMatrix<f64>>| {
                let (a, b, c, d) = (f(&k1).unwrap(), f(&k2).unwrap(), f(&k3).unwrap(), f(&k4).unwrap());
                (a + b * 2.0 + c * 2.0 + d) * w
            };
            t.jacobi += combine_m(|k| k.jacobi.as_ref());
            if let Some(adj) = t.adjoint.as_mut() {
                *adj += combine_m(|k| k.adjoint.as_ref());
            }
            if let Some(l) = t.lambda.as_mut() {
                let (a, b, c, d) = (
                    k1.lambda.as_ref().unwrap(),
                    k2.lambda.as_ref().unwrap(),
                    k3.lambda.as_ref().unwrap(),
                    k4.lambda.as_ref().unwrap(),
                );
                *l += (a + b * 2.0 + c * 2.0 + d) * w;
            }
        }
    }
}

fn check_dimension(model: &dyn HamiltonianModel, phi: &PhasePoint) -> Result<(), DynamicsError> {
    let expected = 2 * model.dof();
    if phi.len() != expected {
        return Err(DynamicsError::DimensionMismatch {
            expected,
            got: phi.len(),
        });
    }
    Ok(())
}

fn check_span(t_i: f64, t_f: f64) -> Result<(), DynamicsError> {
    if !(t_i.is_finite() && t_f.is_finite() && t_f > t_i) {
        return Err(DynamicsError::InvalidSpan { t_i, t_f });
    }
    Ok(())
}

/// Integrates φ̇ = ω∇H from `t_i` to `t_f`.
pub fn hamilton_flow(
    model: &dyn HamiltonianModel,
    phi0: &PhasePoint,
    t_i: f64,
    t_f: f64,
    opts: &FlowOptions,
) -> Result<PhaseTrajectory, DynamicsError> {
    check_dimension(model, phi0)?;
    check_span(t_i, t_f)?;
    let scheme = resolve_scheme(model, opts.integrator)?;
    let (steps, h) = step_plan(t_f - t_i, opts.dt)?;
    let every = opts.sample_every.max(1);
    let e0 = model.energy(phi0);
    let mut phi = phi0.clone();
    let mut times = vec![t_i];
    let mut points = vec![phi.clone()];
    let mut drift = 0.0f64;
    for k in 1..=steps {
        advance(model, scheme, &mut phi, None, h);
        let t = t_i + k as f64 * h;
        if !phi.iter().all(|x| x.is_finite()) {
            return Err(DynamicsError::NonFinite { t });
        }
        drift = drift.max((model.energy(&phi) - e0).abs());
        if k % every == 0 || k == steps {
            times.push(t);
            points.push(phi.clone());
        }
    }
    Ok(PhaseTrajectory {
        times,
        points,
        energy_drift: drift,
    })
}

/// Joint integration of φ, λ, J and J̄ with shared steps.
pub fn extended_flow(
    model: &dyn HamiltonianModel,
    state0: &ExtendedState,
    t_f: f64,
    opts: &FlowOptions,
) -> Result<Trajectory, DynamicsError> {
    check_dimension(model, &state0.phi)?;
    check_span(state0.t, t_f)?;
    if opts.lambda_mode == LambdaMode::Sourced && !model.is_quadratic() {
        return Err(DynamicsError::SourcedLambdaUnsupported(model.name().to_string()));
    }
    let scheme = resolve_scheme(model, opts.integrator)?;
    let (steps, h) = step_plan(t_f - state0.t, opts.dt)?;
    let every = opts.sample_every.max(1);
    let e0 = model.energy(&state0.phi);

    let mut phi = state0.phi.clone();
    let mut tangent = Tangent {
        jacobi: state0.jacobi.clone(),
        adjoint: Some(state0.adjoint.clone()),
        lambda: Some(state0.lambda.clone()),
    };
    let snapshot = |t: f64, phi: &PhasePoint, tangent: &Tangent| ExtendedState {
        t,
        phi: phi.clone(),
        lambda: tangent.lambda.clone().unwrap(),
        jacobi: tangent.jacobi.clone(),
        adjoint: tangent.adjoint.clone().unwrap(),
    };
    let mut states = vec![snapshot(state0.t, &phi, &tangent)];
    let mut times = vec![state0.t];
    let mut drift = 0.0f64;
    let mut det_err = (states[0].det_jacobi() - 1.0).abs();
    let mut pair_err = states[0].pairing_error();
    for k in 1..=steps {
        advance(model, scheme, &mut phi, Some(&mut tangent), h);
        let t = state0.t + k as f64 * h;
        if !phi.iter().all(|x| x.is_finite()) || !tangent.jacobi.iter().all(|x| x.is_finite()) {
            return Err(DynamicsError::NonFinite { t });
        }
        drift = drift.max((model.energy(&phi) - e0).abs());
        det_err = det_err.max((tangent.jacobi.determinant() - 1.0).abs());
        let d = phi.len();
        let pairing = tangent.adjoint.as_ref().unwrap().transpose() * &tangent.jacobi
            - DMatrix::identity(d, d);
        pair_err = pair_err.max(pairing.amax());
        if k % every == 0 || k == steps {
            times.push(t);
            states.push(snapshot(t, &phi, &tangent));
        }
    }
    if det_err > opts.invariant_tolerance {
        return Err(DynamicsError::InvariantViolation {
            invariant: "det J = 1",
            value: det_err,
            tolerance: opts.invariant_tolerance,
        });
    }
    if pair_err > opts.invariant_tolerance {
        return Err(DynamicsError::InvariantViolation {
            invariant: "J̄ᵀJ = I",
            value: pair_err,
            tolerance: opts.invariant_tolerance,
        });
    }
    Ok(Trajectory {
        times,
        states,
        energy_drift: drift,
        max_det_error: det_err,
        max_pairing_error: pair_err,
    })
}

/// Endpoint of the classical flow, P(φ_f, t_f | φ_i, t_i) = δ(φ_f − φ_cl).
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalPropagator {
    pub phi_initial: PhasePoint,
    pub phi_final: PhasePoint,
    pub t_initial: f64,
    pub t_final: f64,
}

impl ClassicalPropagator {
    /// The transition probability is a Dirac delta at `phi_final`.
    pub const DISTRIBUTION: &'static str = "delta";

    /// δ(φ − φ_final) regularised as an isotropic Gaussian of width `eps`.
    pub fn regularized_density(&self, phi: &PhasePoint, eps: f64) -> f64 {
        let d = phi.len() as i32;
        let r2 = (phi - &self.phi_final).norm_squared();
        (2.0 * std::f64::consts::PI * eps * eps).powi(-d).sqrt() * (-r2 / (2.0 * eps * eps)).exp()
    }
}

pub fn classical_propagator(
    model: &dyn HamiltonianModel,
    phi_i: &PhasePoint,
    t_i: f64,
    t_f: f64,
    opts: &FlowOptions,
) -> Result<ClassicalPropagator, DynamicsError> {
    check_dimension(model, phi_i)?;
    let phi_final = if t_f == t_i {
        phi_i.clone()
    } else {
        hamilton_flow(
            model,
            phi_i,
            t_i,
            t_f,
            &FlowOptions {
                sample_every: usize::MAX,
                ..*opts
            },
        )?
        .endpoint()
        .clone()
    };
    Ok(ClassicalPropagator {
        phi_initial: phi_i.clone(),
        phi_final,
        t_initial: t_i,
        t_final: t_f,
    })
}
