//! Hamiltonians with derivatives up to third order.
//!
//! Coordinates are ordered φ = (q₁..qₙ, p₁..pₙ). Built-in models provide
//! analytic derivatives; anything not overridden falls back to central
//! differences of the next-lower derivative with step `1e-5·max(1, |φ_a|)`.

use nalgebra::{DMatrix, DVector};

pub type PhasePoint = DVector<f64>;

/// `t[a][(b, c)] = ∂_a ∂_b ∂_c H`.
pub type ThirdDerivative = Vec<DMatrix<f64>>;

pub const FD_RELATIVE_STEP: f64 = 1e-5;

pub trait HamiltonianModel: Send + Sync {
    fn name(&self) -> &str;

    /// Degrees of freedom n; phase space has dimension 2n.
    fn dof(&self) -> usize;

    fn energy(&self, phi: &PhasePoint) -> f64;

    fn gradient(&self, phi: &PhasePoint) -> DVector<f64> {
        fd_gradient(|x| self.energy(x), phi)
    }

    fn hessian(&self, phi: &PhasePoint) -> DMatrix<f64> {
        fd_jacobian(|x| self.gradient(x), phi)
    }

    fn third_derivative(&self, phi: &PhasePoint) -> ThirdDerivative {
        fd_third(|x| self.hessian(x), phi)
    }

    /// H = T(p) + V(q), which enables the split symplectic integrators.
    fn is_separable(&self) -> bool {
        false
    }

    /// Quadratic H, so every third derivative vanishes.
    fn is_quadratic(&self) -> bool {
        false
    }
}

fn fd_step(x: f64) -> f64 {
    FD_RELATIVE_STEP * x.abs().max(1.0)
}

pub fn fd_gradient(f: impl Fn(&PhasePoint) -> f64, phi: &PhasePoint) -> DVector<f64> {
    let mut g = DVector::zeros(phi.len());
    let mut x = phi.clone();
    for a in 0..phi.len() {
        let h = fd_step(phi[a]);
        x[a] = phi[a] + h;
        let up = f(&x);
        x[a] = phi[a] - h;
        let down = f(&x);
        x[a] = phi[a];
        g[a] = (up - down) / (2.0 * h);
    }
    g
}

/// Central-difference Jacobian of a vector field, symmetrised (the fields
/// this is applied to are gradients).
pub fn fd_jacobian(f: impl Fn(&PhasePoint) -> DVector<f64>, phi: &PhasePoint) -> DMatrix<f64> {
    let d = phi.len();
    let mut m = DMatrix::zeros(d, d);
    let mut x = phi.clone();
    for b in 0..d {
        let h = fd_step(phi[b]);
        x[b] = phi[b] + h;
        let up = f(&x);
        x[b] = phi[b] - h;
        let down = f(&x);
        x[b] = phi[b];
        m.set_column(b, &((up - down) / (2.0 * h)));
    }
    (&m + m.transpose()) * 0.5
}

pub fn fd_third(f: impl Fn(&PhasePoint) -> DMatrix<f64>, phi: &PhasePoint) -> ThirdDerivative {
    let d = phi.len();
    let mut x = phi.clone();
    (0..d)
        .map(|a| {
            let h = fd_step(phi[a]);
            x[a] = phi[a] + h;
            let up = f(&x);
            x[a] = phi[a] - h;
            let down = f(&x);
            x[a] = phi[a];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// ω = [[0, I], [−I, 0]] in the (q, p) ordering.
pub fn symplectic_matrix(n: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        w[(j, n + j)] = 1.0;
        w[(n + j, j)] = -1.0;
    }
    w
}

/// Hamilton vector field φ̇ = ω ∇H.
pub fn hamilton_field(model: &dyn HamiltonianModel, phi: &PhasePoint) -> DVector<f64> {
    let n = model.dof();
    let g = model.gradient(phi);
    let mut v = DVector::zeros(2 * n);
    for j in 0..n {
        v[j] = g[n + j];
        v[n + j] = -g[j];
    }
    v
}

/// One-degree-of-freedom models with analytic derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinModel {
    /// p²/2
    Free,
    /// (q² + p²)/2
    Harmonic,
    /// p²/2 + q⁴/4
    Quartic,
    /// p²/2 − cos q
    Pendulum,
}

impl BuiltinModel {
    pub const ALL: [BuiltinModel; 4] = [
        BuiltinModel::Free,
        BuiltinModel::Harmonic,
        BuiltinModel::Quartic,
        BuiltinModel::Pendulum,
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "free" => Some(Self::Free),
            "ho" | "harmonic" => Some(Self::Harmonic),
            "quartic" => Some(Self::Quartic),
            "pendulum" => Some(Self::Pendulum),
            _ => None,
        }
    }

    fn potential_derivatives(self, q: f64) -> [f64; 4] {
        match self {
            Self::Free => [0.0; 4],
            Self::Harmonic => [0.5 * q * q, q, 1.0, 0.0],
            Self::Quartic => [0.25 * q.powi(4), q.powi(3), 3.0 * q * q, 6.0 * q],
            Self::Pendulum => [-q.cos(), q.sin(), q.cos(), -q.sin()],
        }
    }
}

impl HamiltonianModel for BuiltinModel {
    fn name(&self) -> &str {
        match self {
            Self::Free => "free",
            Self::Harmonic => "harmonic",
            Self::Quartic => "quartic",
            Self::Pendulum => "pendulum",
        }
    }

    fn dof(&self) -> usize {
        1
    }

    fn energy(&self, phi: &PhasePoint) -> f64 {
        0.5 * phi[1] * phi[1] + self.potential_derivatives(phi[0])[0]
    }

    fn gradient(&self, phi: &PhasePoint) -> DVector<f64> {
        DVector::from_vec(vec![self.potential_derivatives(phi[0])[1], phi[1]])
    }

    fn hessian(&self, phi: &PhasePoint) -> DMatrix<f64> {
        let v2 = self.potential_derivatives(phi[0])[2];
        DMatrix::from_row_slice(2, 2, &[v2, 0.0, 0.0, 1.0])
    }

    fn third_derivative(&self, phi: &PhasePoint) -> ThirdDerivative {
        let v3 = self.potential_derivatives(phi[0])[3];
        vec![
            DMatrix::from_row_slice(2, 2, &[v3, 0.0, 0.0, 0.0]),
            DMatrix::zeros(2, 2),
        ]
    }

    fn is_separable(&self) -> bool {
        true
    }

    fn is_quadratic(&self) -> bool {
        matches!(self, Self::Free | Self::Harmonic)
    }
}

/// Model given only by its energy function; all derivatives are finite
/// differences.
pub struct NumericModel<F> {
    name: String,
    dof: usize,
    energy: F,
    separable: bool,
}

impl<F> NumericModel<F>
where
    F: Fn(&PhasePoint) -> f64 + Send + Sync,
{
    pub fn new(name: impl Into<String>, dof: usize, energy: F) -> Self {
        Self {
            name: name.into(),
            dof,
            energy,
            separable: false,
        }
    }

    /// Declares H = T(p) + V(q). The caller is responsible for this being true.
    pub fn separable(mut self) -> Self {
        self.separable = true;
        self
    }
}

impl<F> HamiltonianModel for NumericModel<F>
where
    F: Fn(&PhasePoint) -> f64 + Send + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }
    fn dof(&self) -> usize {
        self.dof
    }
    fn energy(&self, phi: &PhasePoint) -> f64 {
        (self.energy)(phi)
    }
    fn is_separable(&self) -> bool {
        self.separable
    }
}
