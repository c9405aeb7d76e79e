//! Classical mechanics in the extended space (φ, λ, c, c̄).
//!
//! The ghost sector is linear in c and c̄, so numerically it is carried by
//! two matrices: the Jacobi matrix J (c(t) = J c(0)) and the adjoint
//! transporter J̄ (c̄(t) = J̄ c̄(0)). Densities are evolved on a grid by the
//! Liouville operator, or sampled as ensembles of trajectories.

mod ensemble;
mod flow;
pub mod io;
mod liouville;
mod lyapunov;
mod model;

use thiserror::Error;

pub use ensemble::{ensemble_evolve, histogram_l2, iid_gaussian_samples, stratified_gaussian_samples, EnsembleResult};
pub use flow::{
    classical_propagator, extended_flow, hamilton_flow, ClassicalPropagator, ExtendedState,
    FlowOptions, Integrator, LambdaMode, PhaseTrajectory, Trajectory,
};
pub use liouville::{liouville_evolve, BoundaryReport, Distribution, Grid, LiouvilleOptions, LiouvilleResult, Topology};
pub use lyapunov::{lyapunov_spectrum, LyapunovSpectrum};
pub use model::{
    fd_gradient, fd_jacobian, fd_third, hamilton_field, symplectic_matrix, BuiltinModel,
    HamiltonianModel, NumericModel, PhasePoint, ThirdDerivative, FD_RELATIVE_STEP,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("step size {0} underflows")]
    StepUnderflow(f64),
    #[error("invalid time span [{t_i}, {t_f}]")]
    InvalidSpan { t_i: f64, t_f: f64 },
    #[error("expected a phase point of dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("split integrators need a separable Hamiltonian; {0} is not declared separable")]
    NotSeparable(String),
    #[error("sourced λ propagation needs a quadratic Hamiltonian; {0} has third derivatives")]
    SourcedLambdaUnsupported(String),
    #[error("invariant {invariant} violated: {value:e} > {tolerance:e}")]
    InvariantViolation {
        invariant: &'static str,
        value: f64,
        tolerance: f64,
    },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
