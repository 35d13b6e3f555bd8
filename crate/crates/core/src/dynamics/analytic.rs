use nalgebra::DVector;

use crate::dynamics::state::StateVector;
use crate::error::{Error, Result};
use crate::model::metric::dyson_map_inverse;
use crate::model::params::ModelParams;
use crate::operator::Complex;
use crate::su11::eigenvalue;

/// Closed-form eigenmode `ρ⁻¹·exp(−i kₙ Θ(t))·|n⟩` with `ρ⁻¹|n⟩` cached.
#[derive(Debug, Clone)]
pub struct AnalyticSolution {
    params: ModelParams,
    n: usize,
    mode: DVector<Complex>,
}

impl AnalyticSolution {
    pub fn new(params: &ModelParams, n: usize) -> Result<Self> {
        if !params.is_derived() {
            return Err(Error::InvalidParams(
                "the closed-form solution needs derived coupling".into(),
            ));
        }
        let space = params.space;
        let limit = space.interior();
        if n >= limit {
            return Err(Error::StateOutOfRange { n, limit });
        }
        let inv = dyson_map_inverse(space, params.gamma)?;
        let mode = inv.entries().column(n).into_owned();
        Ok(Self {
            params: params.clone(),
            n,
            mode,
        })
    }

    /// `ρ⁻¹|n⟩`.
    pub fn initial_state(&self) -> Result<StateVector> {
        StateVector::new(self.params.space, self.mode.clone())
    }

    pub fn state_at(&self, t: f64) -> Result<StateVector> {
        let theta = self.params.phase_integral(t)?;
        let phase = Complex::from_polar(1.0, -eigenvalue(self.n) * theta);
        StateVector::new(self.params.space, &self.mode * phase)
    }
}

pub fn analytic_state(params: &ModelParams, n: usize, t: f64) -> Result<StateVector> {
    AnalyticSolution::new(params, n)?.state_at(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockSpace;
    use crate::model::TimeProfile;
    use std::f64::consts::FRAC_PI_3;

    fn space() -> FockSpace {
        FockSpace::new(32, 4).unwrap()
    }

    #[test]
    fn initial_phase_is_one() {
        let p = ModelParams::derived(space(), TimeProfile::constant(1.0), 0.3).unwrap();
        let s = analytic_state(&p, 2, 0.0).unwrap();
        let inv = dyson_map_inverse(space(), 0.3).unwrap();
        assert_eq!(s.amplitudes(), &inv.entries().column(2).into_owned());
    }

    #[test]
    fn constant_drive_phase() {
        let p = ModelParams::derived(space(), TimeProfile::constant(1.0), FRAC_PI_3).unwrap();
        let t = 0.7;
        assert!((p.phase_integral(t).unwrap() - 2.0 * t).abs() < 1e-12);
        let a = AnalyticSolution::new(&p, 1).unwrap();
        let s = a.state_at(t).unwrap();
        let expected = &a.initial_state().unwrap().into_amplitudes()
            * Complex::from_polar(1.0, -2.0 * eigenvalue(1) * t);
        assert!((s.amplitudes() - expected).norm() < 1e-12);
    }

    #[test]
    fn hermitian_limit_is_number_state() {
        let omega = TimeProfile::sinusoidal(1.0, 0.3, 2.0, 0.0);
        let p = ModelParams::derived(space(), omega.clone(), 0.0).unwrap();
        let t = 1.3;
        let s = analytic_state(&p, 3, t).unwrap();
        let phase = -eigenvalue(3) * omega.integral(0.0, t).unwrap();
        assert!((s.amplitudes()[3] - Complex::from_polar(1.0, phase)).norm() < 1e-12);
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn preconditions() {
        let p = ModelParams::derived(space(), TimeProfile::constant(1.0), 0.3).unwrap();
        assert_eq!(
            analytic_state(&p, 28, 0.0).unwrap_err(),
            Error::StateOutOfRange { n: 28, limit: 28 }
        );
        let e = ModelParams::explicit(
            space(),
            TimeProfile::constant(1.0),
            TimeProfile::constant(0.1),
            0.3,
        )
        .unwrap();
        assert!(matches!(
            analytic_state(&e, 0, 0.0),
            Err(Error::InvalidParams(_))
        ));
    }
}
