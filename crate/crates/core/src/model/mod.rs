//! The time-dependent SU(1,1) model and its symmetry residuals.

pub mod checks;
pub mod hamiltonian;
pub mod metric;
pub mod params;
pub mod profile;

pub use checks::{Bound, ResidualReport};
pub use hamiltonian::{
    hamiltonian_at, hamiltonian_on, projected_coupling, projected_hamiltonian_at,
};
pub use metric::{
    adjoint_action, adjoint_action_rhs, boundary_projections, conjugate_by_metric,
    disentangled_metric, disentangled_metric_with, dyson_map, dyson_map_inverse, eta_tilde, metric,
    Disentangling, Generator,
};
pub use params::{gamma_from_coupling, Coupling, GammaSolution, ModelParams};
pub use profile::TimeProfile;
