use crate::error::Result;
use crate::fock::FockSpace;
use crate::model::metric::boundary_projections;
use crate::model::params::ModelParams;
use crate::operator::{Complex, LinearOperator};
use crate::su11::Su11Generators;

/// `Ω K₀ + iG (K₊ + K₋)` on the given space.
pub fn hamiltonian_on(space: FockSpace, omega: f64, g: f64) -> LinearOperator {
    let k = Su11Generators::new(space);
    &k.k0.scale_real(omega) + &k.sum().scale(Complex::new(0.0, g))
}

/// The model Hamiltonian `H(t)`.
pub fn hamiltonian_at(params: &ModelParams, t: f64) -> Result<LinearOperator> {
    Ok(hamiltonian_on(
        params.space,
        params.omega_at(t)?,
        params.coupling_at(t)?,
    ))
}

/// `K₊ + K₋` with the couplings that leave the space replaced by their
/// η-orthogonal projections back onto it.
///
/// The plain truncation of `iG(K₊ + K₋)` has spurious complex eigenvalues
/// near the cutoff that grow exponentially under time evolution. Projecting
/// with respect to the metric inner product instead keeps every column except
/// the last two unchanged and makes `ΩK₀ + iG·S` self-adjoint for the leading
/// block of `η` whenever the constraint holds.
pub fn projected_coupling(space: FockSpace, gamma: f64) -> Result<LinearOperator> {
    let n = space.dim();
    let mut s = Su11Generators::new(space).sum().into_entries();
    let [x0, x1] = boundary_projections(space, gamma)?;
    // Couplings |n−2⟩ → |n⟩ and |n−1⟩ → |n+1⟩ of K₊ on the next larger space.
    let c0 = 0.5 * (((n - 1) * n) as f64).sqrt();
    let c1 = 0.5 * ((n * (n + 1)) as f64).sqrt();
    for i in 0..n {
        s[(i, n - 2)] += x0[i] * c0;
        s[(i, n - 1)] += x1[i] * c1;
    }
    LinearOperator::new(space, s)
}

/// `ΩK₀ + iG·S` with `S` from [`projected_coupling`] at the model's γ.
pub fn projected_hamiltonian_at(params: &ModelParams, t: f64) -> Result<LinearOperator> {
    let k0 = Su11Generators::new(params.space).k0;
    let s = projected_coupling(params.space, params.gamma)?;
    Ok(&k0.scale_real(params.omega_at(t)?) + &s.scale(Complex::new(0.0, params.coupling_at(t)?)))
}
