//! Fermi-Hubbard toolkit: lattice modes, Jordan-Wigner mapping, exact
//! diagonalization, and adaptive interaction-picture ansatz optimisation
//! with a Hamiltonian-variational baseline.

pub mod adam;
pub mod circuit;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod fermion;
pub mod gates;
pub mod hamiltonian;
pub mod hva;
pub mod lattice;
pub mod pauli;
pub mod perturbation;
pub mod sector;
pub mod slater;
pub mod statevector;
pub mod vipsa;

pub use error::{Error, Result};
