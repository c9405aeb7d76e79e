//! Superspace: superfields over the Grassmann partners θ, θ̄ of time, the
//! nilpotent expansion of H(Φ) and of the lattice action, Berezin reduction
//! to the classical path-integral weight, and the θ, θ̄ → 0 projector.
//!
//! All identities are checked in exact rational arithmetic. Bosonic data are
//! seeded random rationals; ghosts, θ and θ̄ are symbolic generators.

mod field;
mod lattice;
mod poly;
pub mod verify;

use thiserror::Error;

use crate::grassmann::GrassmannError;

pub use field::{
    build_superfield, decompose, evaluate_on_superfield, expand_function, expansion_components, lift,
    scalar_value, taylor_expand, tilde_hamiltonian, truncation_remainder, Components, FloatModel, SuperField,
    SuperspaceHamiltonian, SymplecticForm,
};
pub use lattice::{
    berezin_reduce, classical_lattice_action, coordinate_names, lattice_euler_lagrange, lattice_superaction,
    lattice_superaction_varied, lattice_surface_term, quantize_projector, surface_term, tilde_lattice_action,
    Boundary, EulerLagrangeReport, LatticePath, LatticeSlice, Variation,
};
pub use poly::{Polynomial, PolynomialHamiltonian};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SuperspaceError {
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
    #[error("{what}: expected dimension {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("value carries Grassmann generators where a plain number is required")]
    NotScalar,
    #[error("ħ must be a positive real number, got {0}")]
    InvalidHbar(String),
    #[error("projected action still carries ghost or θ content")]
    GhostContent,
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("lattice was built without the auxiliary generators needed for variations")]
    MissingAuxiliary,
}
