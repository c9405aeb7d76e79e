//! Quantum side for Gaussian systems: closed-form and time-sliced
//! propagators, ħ → 0 concentration of wave packets onto the classical
//! endpoint, and the probability/amplitude relation in the ghost sector.
//!
//! Only the free particle p²/2 and the oscillator (q² + p²)/2 are supported,
//! with unit mass and frequency.

mod amplitude;
mod kernel;
mod propagator;
mod semiclassical;

use thiserror::Error;

use crate::dynamics::{BuiltinModel, DynamicsError};
use crate::grassmann::GrassmannError;

pub use amplitude::{probability_amplitude_check, AmplitudeOptions, AmplitudeReport};
pub use kernel::{GaussianKernel, KernelValue, WavePacket};
pub use propagator::{
    convergence_sweep, exact_kernel, exact_propagator, fit_order, relative_error, short_time_kernel,
    sliced_kernel, sliced_propagator, ConvergencePoint, PropagatorRequest, CAUSTIC_TOLERANCE,
};
pub use semiclassical::{
    scaling_deviation, scaling_exponent, semiclassical_concentration, ConcentrationRow, SemiclassicalOptions,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("model {0:?} has no quantum propagator here (free or ho only)")]
    UnsupportedModel(String),
    #[error("caustic: distance {distance:e}")]
    Caustic { distance: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("kernel parameters overflowed")]
    Overflow,
    #[error("degenerate transporter: det J = {0:e}")]
    DegenerateTransporter(f64),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuantumModel {
    Free,
    Harmonic,
}

impl QuantumModel {
    pub fn from_name(name: &str) -> Result<Self, QuantumError> {
        match name.to_ascii_lowercase().as_str() {
            "free" => Ok(Self::Free),
            "ho" | "harmonic" => Ok(Self::Harmonic),
            _ => Err(QuantumError::UnsupportedModel(name.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Free => "free",
            Self::Harmonic => "harmonic",
        }
    }

    pub fn classical(self) -> BuiltinModel {
        match self {
            Self::Free => BuiltinModel::Free,
            Self::Harmonic => BuiltinModel::Harmonic,
        }
    }

    /// Coefficient v of the potential v q².
    pub(crate) fn potential(self) -> f64 {
        match self {
            Self::Free => 0.0,
            Self::Harmonic => 0.5,
        }
    }

    /// |sin T| for the oscillator, T for the free particle.
    pub fn caustic_distance(self, t: f64) -> f64 {
        match self {
            Self::Free => t.abs(),
            Self::Harmonic => t.sin().abs(),
        }
    }
}
