//! Simulator core for non-equilibrium fermionic open quantum systems.
//!
//! The crate builds Hamiltonians and Lindblad superoperators from a
//! fermion-to-qubit (Jordan-Wigner) mapping, integrates the vectorized
//! master equation `d/dt vec(rho) = L(t) vec(rho)`, and computes
//! occupation, entanglement, and purity observables. Energies are in units
//! of a reference coupling J with hbar = 1; times are in units of 1/J.

extern crate blas_src;

pub mod error;
pub mod evolve;
pub mod linalg;
pub mod liouvillian;
pub mod model;
pub mod observables;
pub mod operator;

pub use error::{Error, Result};
pub use operator::{FockLabel, Operator, Pauli, SiteIndex};
