//! Numerical laboratory for pseudo-PT-symmetric, time-dependent SU(1,1) Hamiltonians.
//!
//! Everything is represented densely on a truncated Fock space. The
//! [`model`] module builds the Hamiltonian, metric, Dyson map and the
//! antilinear symmetry `η̃ = PT·η`, and evaluates the symmetry residuals;
//! [`dynamics`] integrates the Schrödinger equation and compares with the
//! closed-form solution.

pub mod dynamics;
pub mod error;
pub mod expm;
pub mod fock;
pub mod model;
pub mod operator;
pub mod su11;

pub use error::{Error, Result};
pub use fock::FockSpace;
pub use operator::{commutator, interior_distance, AntilinearOperator, Complex, LinearOperator};
