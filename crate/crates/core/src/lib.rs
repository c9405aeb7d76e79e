//! Classical path integrals in superspace.
//!
//! * [`grassmann`]: sparse exterior algebra with Berezin integration.
//! * [`superspace`]: superfields, nilpotent expansions of the Hamiltonian and
//!   of the lattice action, and the θ, θ̄ → 0 projector.
//! * [`dynamics`]: Hamilton flow with Jacobi and adjoint transport, Liouville
//!   evolution of phase-space densities, ensembles and Lyapunov spectra.
//! * [`quantum`]: Gaussian propagators, time slicing, semiclassical
//!   concentration and the probability/amplitude check in the ghost sector.

pub mod dynamics;
pub mod grassmann;
pub mod quantum;
pub mod superspace;
