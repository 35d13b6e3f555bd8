//! Named residuals for every symmetry relation of the model.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::model::hamiltonian::{hamiltonian_at, hamiltonian_on};
use crate::model::metric::{
    conjugate_by_metric, dyson_map, dyson_map_inverse, eta_tilde, metric, metric_generator,
};
use crate::model::params::ModelParams;
use crate::model::profile::TimeProfile;
use crate::operator::{interior_distance, interior_norm, LinearOperator, I};
use crate::su11::{parity, Su11Generators};

/// Which side of the tolerance a value has to fall on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    /// Discrimination checks: the value must reach the threshold.
    AtLeast,
    /// The value must lie in `[lower, tolerance]`.
    Within,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub bound: Bound,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    pub passed: bool,
}

impl ResidualReport {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            bound: Bound::AtMost,
            lower: None,
            passed: value <= tolerance,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance: threshold,
            bound: Bound::AtLeast,
            lower: None,
            passed: value >= threshold,
        }
    }

    pub fn within(name: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance: upper,
            bound: Bound::Within,
            lower: Some(lower),
            passed: value >= lower && value <= upper,
        }
    }
}

/// `PT·H·PT` against `H†`; the matrix of `PT·H·PT` is `P·conj(H)·P`.
pub fn pseudo_pt_residual(h: &LinearOperator, buffer: usize) -> Result<ResidualReport> {
    let p = parity(h.space());
    let lhs = &(&p * &h.conj()) * &p;
    let value = interior_distance(&lhs, &h.adjoint(), buffer)?;
    Ok(ResidualReport::at_most("pseudo_pt", value, 1e-13))
}

/// `H† η − η H` with explicit matrices; only meaningful while η stays well conditioned.
pub fn static_quasi_hermiticity_residual(
    h: &LinearOperator,
    eta: &LinearOperator,
    buffer: usize,
) -> Result<ResidualReport> {
    let value = interior_distance(&(&h.adjoint() * eta), &(eta * h), buffer)?;
    Ok(ResidualReport::at_most(
        "static_quasi_hermiticity",
        value,
        1e-9,
    ))
}

/// `exp(iθ(K₊−K₋))·H·exp(−iθ(K₊−K₋))` on `params.space`.
fn conjugated_hamiltonian(params: &ModelParams, angle: f64, t: f64) -> Result<LinearOperator> {
    let omega = params.omega_at(t)?;
    let g = params.coupling_at(t)?;
    conjugate_by_metric(params.space, angle, |s| hamiltonian_on(s, omega, g))
}

/// `η H(t) η⁻¹ − H†(t)`.
///
/// Equivalent to `H†η − ηH = 0` but free of the large matrix elements of η
/// itself, which grow like `sec(γ)ⁿ` in the number basis.
pub fn pseudo_hermiticity_residual(params: &ModelParams, t: f64) -> Result<ResidualReport> {
    let h = hamiltonian_at(params, t)?;
    let lhs = conjugated_hamiltonian(params, params.gamma, t)?;
    let value = interior_distance(&lhs, &h.adjoint(), params.space.buffer())?;
    Ok(ResidualReport::at_most("pseudo_hermiticity", value, 1e-9))
}

/// `∂ₜη̃ − i[H, η̃]`, multiplied on the left by `η·P`.
///
/// The left factor turns the antilinear residual with matrix part
/// `P·∂ₜη⁻¹ − iP(Hη⁻¹ − η⁻¹H†)` into `η·∂ₜη⁻¹ − i(ηHη⁻¹ − H†)`, and
/// `η(t)·η⁻¹(t±dt)` collapses to a single small-angle metric. The
/// derivative is a central difference.
pub fn heisenberg_residual(params: &ModelParams, t: f64, dt: f64) -> Result<ResidualReport> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::InvalidParams(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let space = params.space;
    let gamma = |_t: f64| params.gamma;
    let forward = metric(space, gamma(t) - gamma(t + dt), 1.0)?;
    let backward = metric(space, gamma(t) - gamma(t - dt), 1.0)?;
    let derivative = (&forward - &backward).scale_real(0.5 / dt);
    let h = hamiltonian_at(params, t)?;
    let conj = conjugated_hamiltonian(params, params.gamma, t)?;
    let commutator_part = (&conj - &h.adjoint()).scale(I);
    let value = interior_distance(&derivative, &commutator_part, space.buffer())?;
    Ok(ResidualReport::at_most("heisenberg", value, 1e-9))
}

/// Same relation evaluated directly on the antilinear matrices, on a
/// doubled space. Usable only at small γ where η is well conditioned.
pub fn heisenberg_residual_direct(params: &ModelParams, t: f64, dt: f64) -> Result<ResidualReport> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::InvalidParams(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let space = params.space;
    let work = space.padded(space.dim());
    let wide = params.on_space(work);
    let tilde = eta_tilde(work, params.gamma)?;
    // γ is constant, so η̃(t ± dt) = η̃(t).
    let derivative = (&tilde.matrix_operator() - &tilde.matrix_operator()).scale_real(0.5 / dt);
    let h = hamiltonian_at(&wide, t)?;
    let comm = tilde.commutator_with(&h)?.scale(I).matrix_operator();
    let residual = (&derivative - &comm).restrict(space)?;
    let value = interior_norm(residual.entries(), space.buffer())?;
    Ok(ResidualReport::at_most("heisenberg_direct", value, 1e-9))
}

/// `i(∂ₜη)η⁻¹ + γ̇(K₊ − K₋)` for a time-dependent angle γ(t).
pub fn gauge_term_residual(
    space: FockSpace,
    gamma: &TimeProfile,
    t: f64,
    dt: f64,
) -> Result<ResidualReport> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::InvalidParams(format!(
            "dt must be positive, got {dt}"
        )));
    }
    let g0 = gamma.eval(t)?;
    let forward = metric(space, gamma.eval(t + dt)? - g0, 1.0)?;
    let backward = metric(space, gamma.eval(t - dt)? - g0, 1.0)?;
    let lhs = (&forward - &backward).scale(I * (0.5 / dt));
    let rhs = Su11Generators::new(space)
        .difference()
        .scale_real(-gamma.derivative(t));
    let value = interior_distance(&lhs, &rhs, space.buffer())?;
    Ok(ResidualReport::at_most("gauge_term", value, 1e-6))
}

/// `ρ H(t) ρ⁻¹`, which reduces to `(Ω cos γ + 2G sin γ)·K₀` when the constraint holds.
pub fn transformed_hamiltonian(params: &ModelParams, t: f64) -> Result<LinearOperator> {
    let violation = params.constraint_violation(t)?;
    if violation > 1e-10 {
        return Err(Error::ConstraintViolated { t, violation });
    }
    conjugated_hamiltonian(params, 0.5 * params.gamma, t)
}

/// Off-diagonal interior norm of `ρHρ⁻¹` and the worst diagonal deviation
/// from `(Ω cos γ + 2G sin γ)·kₙ` over `n < count`.
///
/// Unlike [`transformed_hamiltonian`] this does not insist on the
/// constraint, so a violated constraint shows up as a large defect.
pub fn diagonalization_defects(params: &ModelParams, t: f64, count: usize) -> Result<(f64, f64)> {
    let hp = conjugated_hamiltonian(params, 0.5 * params.gamma, t)?;
    let off = interior_norm(hp.off_diagonal().entries(), params.space.buffer())?;
    let coeff = params.dyson_coefficient(t)?;
    let diag = (0..count.min(params.space.interior()))
        .map(|n| (hp.get(n, n) - coeff * crate::su11::eigenvalue(n)).norm())
        .fold(0.0, f64::max);
    Ok((off, diag))
}

/// Interior distance of `η̃∘η̃` from the identity, with products formed on a doubled space.
pub fn eta_tilde_involution_defect(space: FockSpace, gamma: f64) -> Result<f64> {
    let work = space.padded(space.dim());
    let tilde = eta_tilde(work, gamma)?;
    let sq = tilde.then_antilinear(&tilde)?.restrict(space)?;
    interior_distance(&sq, &LinearOperator::identity(space), space.buffer())
}

/// Generator-level form of `η̃∘η̃ = 1`: `η̃∘η̃ = exp(P·conj(X)·P)·exp(X)`, which is
/// the identity exactly when `P·conj(X)·P + X = 0`.
pub fn eta_tilde_generator_defect(space: FockSpace, gamma: f64) -> Result<f64> {
    let x = metric_generator(space, gamma);
    let p = parity(space);
    let reflected = &(&p * &x.conj()) * &p;
    interior_distance(&reflected, &(-&x), space.buffer())
}

/// `‖η̃ − η̃†‖` on the interior, with the antilinear adjoint of [`crate::AntilinearOperator::adjoint`].
pub fn eta_tilde_adjoint_gap(space: FockSpace, gamma: f64) -> Result<f64> {
    let tilde = eta_tilde(space, gamma)?;
    interior_distance(
        &tilde.matrix_operator(),
        &tilde.adjoint().matrix_operator(),
        space.buffer(),
    )
}

/// `η` against `PT·η⁻¹·TP`, whose matrix is `P·conj(η⁻¹)·P`.
pub fn metric_reflection_defect(space: FockSpace, gamma: f64) -> Result<f64> {
    let eta = metric(space, gamma, 1.0)?;
    let inv = metric(space, gamma, -1.0)?;
    let p = parity(space);
    interior_distance(&eta, &(&(&p * &inv.conj()) * &p), space.buffer())
}

/// `ρ†` against `PT·ρ⁻¹·PT`.
pub fn dyson_conjugate_defect(space: FockSpace, gamma: f64) -> Result<f64> {
    let rho = dyson_map(space, gamma)?;
    let inv = dyson_map_inverse(space, gamma)?;
    let p = parity(space);
    interior_distance(&rho.adjoint(), &(&(&p * &inv.conj()) * &p), space.buffer())
}

/// `η(γ₁)·η(γ₂)` against `η(γ₁ + γ₂)`, with the product formed on a doubled space.
pub fn metric_group_defect(space: FockSpace, gamma1: f64, gamma2: f64) -> Result<f64> {
    let work = space.padded(space.dim());
    let prod = (&metric(work, gamma1, 1.0)? * &metric(work, gamma2, 1.0)?).restrict(space)?;
    interior_distance(&prod, &metric(space, gamma1 + gamma2, 1.0)?, space.buffer())
}

/// `max |⟨ρ⁻¹n|η|ρ⁻¹m⟩ − δₙₘ|` over `n, m < count`.
///
/// The states and their images under `ρ` are formed on a doubled space so
/// that `η = ρ†ρ` can be applied as `‖ρψ‖²`-type products without touching the
/// truncation boundary.
pub fn eta_orthonormality_defect(space: FockSpace, gamma: f64, count: usize) -> Result<f64> {
    if count > space.interior() {
        return Err(Error::StateOutOfRange {
            n: count,
            limit: space.interior(),
        });
    }
    let work = space.padded(space.dim());
    let rho = dyson_map(work, gamma)?;
    let inv = dyson_map_inverse(work, gamma)?;
    let images = rho.entries() * inv.entries().columns(0, count);
    let gram = images.adjoint() * &images;
    let mut worst: f64 = 0.0;
    for n in 0..count {
        for m in 0..count {
            let delta = if n == m { 1.0 } else { 0.0 };
            worst = worst.max((gram[(n, m)] - delta).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::metric::{adjoint_action_rhs, Generator};
    use crate::operator::Complex;
    use std::f64::consts::FRAC_PI_4;

    fn space() -> FockSpace {
        FockSpace::new(64, 8).unwrap()
    }

    fn explicit(omega: f64, g: f64, gamma: f64) -> ModelParams {
        ModelParams::explicit(
            space(),
            TimeProfile::constant(omega),
            TimeProfile::constant(g),
            gamma,
        )
        .unwrap()
    }

    #[test]
    fn pseudo_pt_cases() {
        let s = space();
        let h = hamiltonian_on(s, 2.0, 1.0);
        assert!(pseudo_pt_residual(&h, 8).unwrap().passed);
        let k0 = Su11Generators::new(s).k0;
        assert!(pseudo_pt_residual(&k0, 8).unwrap().value < 1e-13);
        // A real symmetric coupling between opposite parities flips sign under P.
        let x = LinearOperator::from_diagonal(s, |n| Complex::from(n as f64));
        let mut m = x.entries().clone();
        m[(0, 1)] = Complex::from(1.0);
        m[(1, 0)] = Complex::from(1.0);
        let bad = pseudo_pt_residual(&LinearOperator::new(s, m).unwrap(), 8).unwrap();
        let expected = 2.0 * 2f64.sqrt() / 56.0;
        assert!((bad.value - expected).abs() < 1e-12);
        assert!(!bad.passed);
    }

    #[test]
    fn pseudo_hermiticity_discriminates() {
        let ok = pseudo_hermiticity_residual(&explicit(2.0, 1.0, FRAC_PI_4), 0.0).unwrap();
        assert!(ok.value < 1e-9, "{ok:?}");
        let bad = pseudo_hermiticity_residual(&explicit(2.0, 1.0, 0.3), 0.0).unwrap();
        assert!(bad.value > 1e-2, "{bad:?}");
        let herm = pseudo_hermiticity_residual(&explicit(2.0, 0.0, 0.0), 0.0).unwrap();
        assert_eq!(herm.value, 0.0);
    }

    #[test]
    fn static_form_agrees_at_small_angle() {
        let s = space();
        let gamma: f64 = 0.1;
        let omega = 2.0;
        let h = hamiltonian_on(s.padded(64), omega, omega * gamma.tan() / 2.0);
        let eta = metric(s.padded(64), gamma, 1.0).unwrap();
        let r = static_quasi_hermiticity_residual(&h, &eta, 8).unwrap();
        assert!(r.value < 1e-9, "{r:?}");
        let g = TimeProfile::constant(0.0);
        let p = ModelParams::explicit(s, TimeProfile::constant(1.0), g, 0.0).unwrap();
        let h = hamiltonian_at(&p, 0.0).unwrap();
        let r = static_quasi_hermiticity_residual(&h, &LinearOperator::identity(s), 8).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn heisenberg_cases() {
        let derived =
            ModelParams::derived(space(), TimeProfile::sinusoidal(1.0, 0.3, 2.0, 0.0), 0.6)
                .unwrap();
        for t in [0.0, 1.1, 2.5] {
            assert!(heisenberg_residual(&derived, t, 1e-3).unwrap().value < 1e-9);
        }
        let perturbed = explicit(2.0, 1.25 * 2.0 * 0.6f64.tan() / 2.0, 0.6);
        assert!(heisenberg_residual(&perturbed, 0.0, 1e-3).unwrap().value > 1e-2);
        let herm = explicit(1.0, 0.0, 0.0);
        assert!(heisenberg_residual(&herm, 0.0, 1e-3).unwrap().value < 1e-13);
        assert!(heisenberg_residual(&herm, 0.0, 0.0).is_err());
    }

    #[test]
    fn heisenberg_direct_matches_at_small_angle() {
        let gamma: f64 = 0.1;
        let derived = ModelParams::derived(space(), TimeProfile::constant(1.5), gamma).unwrap();
        assert!(
            heisenberg_residual_direct(&derived, 0.0, 1e-3)
                .unwrap()
                .value
                < 1e-9
        );
        let perturbed = explicit(1.5, 1.25 * 1.5 * gamma.tan() / 2.0, gamma);
        assert!(
            heisenberg_residual_direct(&perturbed, 0.0, 1e-3)
                .unwrap()
                .value
                > 1e-3
        );
    }

    #[test]
    fn gauge_term_for_varying_angle() {
        let s = space();
        let gamma = TimeProfile::sinusoidal(0.2, 0.1, 1.0, 0.0);
        for t in [0.0, 0.4, 2.0] {
            let r = gauge_term_residual(s, &gamma, t, 1e-4).unwrap();
            assert!(r.passed, "{r:?}");
        }
        let sampled = TimeProfile::sampled(vec![(0.0, 0.1), (1.0, 0.2), (2.0, 0.15)]).unwrap();
        let r = gauge_term_residual(s, &sampled, 0.5, 1e-4).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn dyson_map_diagonalizes() {
        let p = explicit(2.0, 1.0, FRAC_PI_4);
        let coeff = p.dyson_coefficient(0.0).unwrap();
        assert!((coeff - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-14);
        let (off, diag) = diagonalization_defects(&p, 0.0, 16).unwrap();
        assert!(off < 1e-9 && diag < 1e-9, "{off:e} {diag:e}");
        let bad = explicit(2.0, 1.0, 0.3);
        assert!(matches!(
            transformed_hamiltonian(&bad, 0.0),
            Err(Error::ConstraintViolated { .. })
        ));
        let herm = explicit(3.0, 0.0, 0.0);
        let h = transformed_hamiltonian(&herm, 0.0).unwrap();
        assert_eq!(h, hamiltonian_on(space(), 3.0, 0.0));
    }

    #[test]
    fn symmetry_operator_properties() {
        let s = space();
        assert!(eta_tilde_involution_defect(s, 0.1).unwrap() < 1e-10);
        assert_eq!(eta_tilde_generator_defect(s, 1.2).unwrap(), 0.0);
        assert!(eta_tilde_adjoint_gap(s, 0.3).unwrap() > 0.01);
        assert!(metric_reflection_defect(s, 0.3).unwrap() < 1e-10);
        assert!(dyson_conjugate_defect(s, 0.3).unwrap() < 1e-10);
    }

    #[test]
    fn hermitian_transpose_convention_hides_property_iii() {
        // With matrix part conj(Mᵀ) the gap vanishes identically, since P·η⁻¹ is Hermitian.
        let s = space();
        let tilde = eta_tilde(s, 0.3).unwrap();
        let m = tilde.matrix_operator();
        assert!(interior_distance(&m, &m.adjoint(), 8).unwrap() < 1e-9);
    }

    #[test]
    fn group_property_on_resolvable_angles() {
        let s = space();
        assert!(metric_group_defect(s, 0.05, 0.07).unwrap() < 1e-9);
        assert!(metric_group_defect(s, -0.1, 0.04).unwrap() < 1e-9);
    }

    #[test]
    fn transformed_generators_close() {
        let s = space();
        let g = 0.3;
        let k0 = adjoint_action_rhs(s.padded(8), g, Generator::K0);
        let kp = adjoint_action_rhs(s.padded(8), g, Generator::Kplus);
        let km = adjoint_action_rhs(s.padded(8), g, Generator::Kminus);
        let c = crate::operator::commutator(&k0, &kp)
            .unwrap()
            .restrict(s)
            .unwrap();
        assert!(interior_distance(&c, &kp.restrict(s).unwrap(), 8).unwrap() < 1e-8);
        let c = crate::operator::commutator(&kp, &km)
            .unwrap()
            .restrict(s)
            .unwrap();
        assert!(
            interior_distance(&c, &k0.restrict(s).unwrap().scale_real(-2.0), 8).unwrap() < 1e-8
        );
    }
}
