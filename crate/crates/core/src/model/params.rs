use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::model::profile::TimeProfile;

/// Distance from ±π/2 below which the metric is considered ill-conditioned.
pub const METRIC_GUARD: f64 = 1e-6;

/// How G(t) is obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum Coupling {
    /// `G(t) = Ω(t)·tan(γ)/2`, so that `Ω = 2G·cot γ` holds at every t.
    Derived,
    Explicit(TimeProfile),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub omega: TimeProfile,
    pub coupling: Coupling,
    /// Metric angle γ in radians.
    pub gamma: f64,
    pub space: FockSpace,
}

pub fn check_angle(angle: f64) -> Result<()> {
    if !angle.is_finite() || angle.abs() >= FRAC_PI_2 - METRIC_GUARD {
        return Err(Error::Conditioning { angle });
    }
    Ok(())
}

impl ModelParams {
    pub fn derived(space: FockSpace, omega: TimeProfile, gamma: f64) -> Result<Self> {
        omega.validate()?;
        check_angle(gamma)?;
        Ok(Self {
            omega,
            coupling: Coupling::Derived,
            gamma,
            space,
        })
    }

    pub fn explicit(
        space: FockSpace,
        omega: TimeProfile,
        g: TimeProfile,
        gamma: f64,
    ) -> Result<Self> {
        omega.validate()?;
        g.validate()?;
        check_angle(gamma)?;
        Ok(Self {
            omega,
            coupling: Coupling::Explicit(g),
            gamma,
            space,
        })
    }

    /// Same model on another Fock space.
    pub fn on_space(&self, space: FockSpace) -> Self {
        Self {
            space,
            ..self.clone()
        }
    }

    pub fn is_derived(&self) -> bool {
        matches!(self.coupling, Coupling::Derived)
    }

    pub fn omega_at(&self, t: f64) -> Result<f64> {
        self.omega.eval(t)
    }

    pub fn coupling_at(&self, t: f64) -> Result<f64> {
        match &self.coupling {
            Coupling::Derived => Ok(self.omega_at(t)? * self.gamma.tan() / 2.0),
            Coupling::Explicit(g) => g.eval(t),
        }
    }

    /// `|G(t) − Ω(t)·tan(γ)/2|`.
    pub fn constraint_violation(&self, t: f64) -> Result<f64> {
        let omega = self.omega_at(t)?;
        let g = self.coupling_at(t)?;
        Ok((g - omega * self.gamma.tan() / 2.0).abs())
    }

    /// Coefficient of K₀ after the Dyson map: `Ω cos γ + 2G sin γ`.
    pub fn dyson_coefficient(&self, t: f64) -> Result<f64> {
        let omega = self.omega_at(t)?;
        let g = self.coupling_at(t)?;
        Ok(omega * self.gamma.cos() + 2.0 * g * self.gamma.sin())
    }

    /// `Θ(t) = ∫₀ᵗ (Ω cos γ + 2G sin γ) dt′`.
    pub fn phase_integral(&self, t: f64) -> Result<f64> {
        let (c, s) = (self.gamma.cos(), self.gamma.sin());
        let omega_int = self.omega.integral(0.0, t)?;
        let g_int = match &self.coupling {
            Coupling::Derived => omega_int * self.gamma.tan() / 2.0,
            Coupling::Explicit(g) => g.integral(0.0, t)?,
        };
        Ok(omega_int * c + 2.0 * g_int * s)
    }
}

/// Angle solving `Ω₀ = 2G₀·cot γ` in `(−π/2, π/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSolution {
    pub gamma: f64,
    /// Set when Ω₀ = 0, where γ sits on ±π/2 and the metric is unusable.
    pub boundary: bool,
}

pub fn gamma_from_coupling(omega0: f64, g0: f64) -> Result<GammaSolution> {
    if omega0 == 0.0 && g0 == 0.0 {
        return Err(Error::DegenerateCoupling);
    }
    if !omega0.is_finite() || !g0.is_finite() {
        return Err(Error::InvalidParams("Omega and G must be finite".into()));
    }
    if omega0 == 0.0 {
        return Ok(GammaSolution {
            gamma: g0.signum() * FRAC_PI_2,
            boundary: true,
        });
    }
    Ok(GammaSolution {
        gamma: (2.0 * g0 / omega0).atan(),
        boundary: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn space() -> FockSpace {
        FockSpace::new(16, 2).unwrap()
    }

    #[test]
    fn gamma_examples() {
        let g = gamma_from_coupling(2.0, 1.0).unwrap();
        assert!((g.gamma - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(gamma_from_coupling(1.0, 0.0).unwrap().gamma, 0.0);
        assert!((gamma_from_coupling(2.0, -1.0).unwrap().gamma + FRAC_PI_4).abs() < 1e-15);
        assert_eq!(
            gamma_from_coupling(0.0, 0.0),
            Err(Error::DegenerateCoupling)
        );
        let b = gamma_from_coupling(0.0, -3.0).unwrap();
        assert!(b.boundary);
        assert_eq!(b.gamma, -FRAC_PI_2);
    }

    #[test]
    fn gamma_solves_constraint() {
        for (o, g) in [(1.3, 0.2), (-0.7, 0.4), (2.0, -5.0)] {
            let gamma = gamma_from_coupling(o, g).unwrap().gamma;
            assert!((o - 2.0 * g / gamma.tan()).abs() < 1e-12);
        }
    }

    #[test]
    fn derived_mode_satisfies_constraint() {
        let p = ModelParams::derived(space(), TimeProfile::sinusoidal(1.0, 0.3, 2.0, 0.0), 0.4)
            .unwrap();
        for t in [0.0, 0.7, 3.3] {
            assert!(p.constraint_violation(t).unwrap() < 1e-15);
            let omega = p.omega_at(t).unwrap();
            let coeff = p.dyson_coefficient(t).unwrap();
            assert!((coeff - omega / 0.4f64.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn explicit_mode_reports_violation() {
        let p = ModelParams::explicit(
            space(),
            TimeProfile::constant(2.0),
            TimeProfile::constant(1.25),
            FRAC_PI_4,
        )
        .unwrap();
        assert!((p.constraint_violation(0.0).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn angle_guard() {
        assert!(
            ModelParams::derived(space(), TimeProfile::constant(1.0), FRAC_PI_2 - 1e-7).is_err()
        );
        assert!(ModelParams::derived(space(), TimeProfile::constant(1.0), -1.5).is_ok());
    }

    #[test]
    fn phase_integral_for_constant_profile() {
        let gamma = std::f64::consts::FRAC_PI_3;
        let p = ModelParams::derived(space(), TimeProfile::constant(1.0), gamma).unwrap();
        assert!((p.phase_integral(1.5).unwrap() - 3.0).abs() < 1e-14);
    }
}
