//! Schrödinger evolution, closed-form solution, inner products and spectra.

pub mod analytic;
pub mod inner;
pub mod integrate;
pub mod spectrum;
pub mod state;

pub use analytic::{analytic_state, AnalyticSolution};
pub use inner::{eta_inner, pt_inner};
pub use integrate::{
    integrate, integrate_dyson_frame, integrate_partial, propagate, Generator, IntegratorConfig,
    ModelGenerator, PartialRun, ScaledGenerator, Trajectory,
};
pub use spectrum::{all_eigenvalues, max_imaginary, min_hermitian_eigenvalue, spectrum};
pub use state::{fidelity, StateVector};
