use nalgebra::DVector;

use crate::dynamics::state::StateVector;
use crate::error::{Error, Result};
use crate::model::hamiltonian::{hamiltonian_on, projected_coupling};
use crate::model::metric::{conjugate_by_metric, dyson_map, dyson_map_inverse};
use crate::model::params::ModelParams;
use crate::model::profile::TimeProfile;
use crate::operator::{Complex, LinearOperator, I};
use crate::su11::Su11Generators;

/// Steps shorter than this fraction of the run length count as underflow.
const MIN_RELATIVE_STEP: f64 = 1e-12;
/// Euclidean norm beyond which the state is declared divergent.
const DIVERGENCE_NORM: f64 = 1e150;

/// Fixed-step classical RK4 settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_start: f64,
    pub t_end: f64,
}

impl IntegratorConfig {
    pub fn new(dt: f64, t_end: f64) -> Result<Self> {
        let c = Self {
            dt,
            t_start: 0.0,
            t_end,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let span = self.t_end - self.t_start;
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return Err(Error::InvalidIntegrator(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !span.is_finite() || span < 0.0 {
            return Err(Error::InvalidIntegrator(format!(
                "t_end {} precedes t_start {}",
                self.t_end, self.t_start
            )));
        }
        if span > 0.0 && self.dt > span / 10.0 {
            return Err(Error::InvalidIntegrator(format!(
                "dt {} exceeds a tenth of the run length {span}",
                self.dt
            )));
        }
        if span > 0.0 && self.dt < MIN_RELATIVE_STEP * span.max(1.0) {
            return Err(Error::StepUnderflow { dt: self.dt });
        }
        Ok(())
    }

    /// Number of steps; the last step lands exactly on `t_end`.
    pub fn steps(&self) -> usize {
        let span = self.t_end - self.t_start;
        if span == 0.0 {
            return 0;
        }
        let n = span / self.dt;
        // Tolerate representation error in t_end/dt.
        let r = n.round();
        if (n - r).abs() < 1e-9 * r.max(1.0) {
            r as usize
        } else {
            n.ceil() as usize
        }
    }

    pub fn time(&self, step: usize) -> f64 {
        let n = self.steps();
        if step == n {
            return self.t_end;
        }
        self.t_start + step as f64 * self.dt
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub eta_norms: Vec<f64>,
    pub theta: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&StateVector> {
        self.states.last()
    }

    /// `max_t |⟨ψ|η|ψ⟩(t) − ⟨ψ|η|ψ⟩(0)|`.
    pub fn eta_norm_drift(&self) -> f64 {
        let first = self.eta_norms.first().copied().unwrap_or(0.0);
        self.eta_norms
            .iter()
            .map(|v| (v - first).abs())
            .fold(0.0, f64::max)
    }

    /// `max_t |‖ψ(t)‖ − ‖ψ(0)‖|`.
    pub fn euclid_norm_drift(&self) -> f64 {
        let first = self.states.first().map(StateVector::norm).unwrap_or(0.0);
        self.states
            .iter()
            .map(|s| (s.norm() - first).abs())
            .fold(0.0, f64::max)
    }
}

/// Right-hand side of `i∂ₜψ = H(t)ψ`, evaluated as `H(t)ψ`.
pub trait Generator {
    fn apply(&self, t: f64, psi: &DVector<Complex>) -> Result<DVector<Complex>>;
}

/// `Ω(t)K₀ + iG(t)·S` with the metric-projected coupling `S`.
pub struct ModelGenerator<'a> {
    params: &'a ModelParams,
    k0: LinearOperator,
    s: LinearOperator,
}

impl<'a> ModelGenerator<'a> {
    pub fn new(params: &'a ModelParams) -> Result<Self> {
        Ok(Self {
            params,
            s: projected_coupling(params.space, params.gamma)?,
            k0: Su11Generators::new(params.space).k0,
        })
    }

    /// Plain truncation of `K₊ + K₋`, whose cutoff modes grow exponentially.
    pub fn truncated(params: &'a ModelParams) -> Self {
        let k = Su11Generators::new(params.space);
        Self {
            params,
            s: k.sum(),
            k0: k.k0,
        }
    }
}

impl Generator for ModelGenerator<'_> {
    fn apply(&self, t: f64, psi: &DVector<Complex>) -> Result<DVector<Complex>> {
        let omega = self.params.omega_at(t)?;
        let g = self.params.coupling_at(t)?;
        Ok(self.k0.apply(psi) * Complex::from(omega) + self.s.apply(psi) * (I * g))
    }
}

/// `f(t)·A` for a fixed operator `A`.
pub struct ScaledGenerator<'a> {
    pub profile: &'a TimeProfile,
    pub operator: LinearOperator,
}

impl Generator for ScaledGenerator<'_> {
    fn apply(&self, t: f64, psi: &DVector<Complex>) -> Result<DVector<Complex>> {
        Ok(self.operator.apply(psi) * Complex::from(self.profile.eval(t)?))
    }
}

/// Result of a run that may have stopped early.
#[derive(Debug, Clone)]
pub struct PartialRun {
    pub trajectory: Trajectory,
    pub error: Option<Error>,
}

/// RK4 evolution of `psi0` under `H(t)` from `params`.
pub fn integrate(
    params: &ModelParams,
    psi0: &StateVector,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    let run = integrate_partial(params, psi0, config)?;
    match run.error {
        Some(e) => Err(e),
        None => Ok(run.trajectory),
    }
}

/// Like [`integrate`] but keeps the steps completed before a divergence.
pub fn integrate_partial(
    params: &ModelParams,
    psi0: &StateVector,
    config: &IntegratorConfig,
) -> Result<PartialRun> {
    if psi0.space().dim() != params.space.dim() {
        return Err(Error::DimensionMismatch {
            left: params.space.dim(),
            right: psi0.space().dim(),
        });
    }
    let rho = dyson_map(params.space, params.gamma)?;
    let eta_norm = |psi: &DVector<Complex>| rho.apply(psi).norm_squared();
    let theta = |t: f64| params.phase_integral(t);
    propagate(&ModelGenerator::new(params)?, psi0, config, eta_norm, theta)
}

/// Generic RK4 driver recording `norm` and `phase` at each step.
pub fn propagate(
    generator: &dyn Generator,
    psi0: &StateVector,
    config: &IntegratorConfig,
    norm: impl Fn(&DVector<Complex>) -> f64,
    phase: impl Fn(f64) -> Result<f64>,
) -> Result<PartialRun> {
    config.validate()?;
    let space = psi0.space();
    let steps = config.steps();
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        eta_norms: Vec::with_capacity(steps + 1),
        theta: Vec::with_capacity(steps + 1),
    };
    let mut psi = psi0.amplitudes().clone();
    let mut t = config.t_start;
    traj.times.push(t);
    traj.eta_norms.push(norm(&psi));
    traj.theta.push(phase(t)?);
    traj.states.push(psi0.clone());

    let minus_i = -I;
    for step in 1..=steps {
        let t_next = config.time(step);
        let h = t_next - t;
        let half = 0.5 * h;
        let k1 = generator.apply(t, &psi)? * minus_i;
        let k2 = generator.apply(t + half, &(&psi + &k1 * Complex::from(half)))? * minus_i;
        let k3 = generator.apply(t + half, &(&psi + &k2 * Complex::from(half)))? * minus_i;
        let k4 = generator.apply(t_next, &(&psi + &k3 * Complex::from(h)))? * minus_i;
        psi +=
            (k1 + k2 * Complex::from(2.0) + k3 * Complex::from(2.0) + k4) * Complex::from(h / 6.0);
        t = t_next;

        let n = psi.norm();
        if !n.is_finite() || n > DIVERGENCE_NORM {
            return Ok(PartialRun {
                trajectory: traj,
                error: Some(Error::Diverged { t, step }),
            });
        }
        traj.times.push(t);
        traj.eta_norms.push(norm(&psi));
        traj.theta.push(phase(t)?);
        traj.states.push(StateVector::new(space, psi.clone())?);
    }
    Ok(PartialRun {
        trajectory: traj,
        error: None,
    })
}

/// Integrates `ψ′ = ρψ` under `H′ = ρHρ⁻¹` and maps every state back with `ρ⁻¹`.
///
/// In derived mode `H(t) = Ω(t)·H₁` with a fixed `H₁`, so `H′` is `Ω(t)` times
/// one conjugated operator.
pub fn integrate_dyson_frame(
    params: &ModelParams,
    psi0: &StateVector,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    if !params.is_derived() {
        return Err(Error::InvalidParams(
            "the Dyson frame needs derived coupling".into(),
        ));
    }
    if psi0.space().dim() != params.space.dim() {
        return Err(Error::DimensionMismatch {
            left: params.space.dim(),
            right: psi0.space().dim(),
        });
    }
    let space = params.space;
    let g1 = params.gamma.tan() / 2.0;
    let unit = conjugate_by_metric(space, params.gamma / 2.0, |s| hamiltonian_on(s, 1.0, g1))?;
    let rho = dyson_map(space, params.gamma)?;
    let rho_inv = dyson_map_inverse(space, params.gamma)?;
    let generator = ScaledGenerator {
        profile: &params.omega,
        operator: unit,
    };
    let start = StateVector::new(space, rho.apply(psi0.amplitudes()))?;
    let run = propagate(
        &generator,
        &start,
        config,
        |v| rho.apply(&rho_inv.apply(v)).norm_squared(),
        |t| params.phase_integral(t),
    )?;
    if let Some(e) = run.error {
        return Err(e);
    }
    let mut traj = run.trajectory;
    for state in traj.states.iter_mut() {
        *state = StateVector::new(space, rho_inv.apply(state.amplitudes()))?;
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::state::fidelity;
    use crate::fock::FockSpace;
    use crate::su11::eigenvalue;

    fn space() -> FockSpace {
        FockSpace::new(32, 4).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::new(1e-3, 1.0).is_ok());
        assert!(IntegratorConfig::new(0.0, 1.0).is_err());
        assert!(IntegratorConfig::new(0.2, 1.0).is_err());
        assert!(IntegratorConfig::new(1e-3, -1.0).is_err());
        assert!(IntegratorConfig::new(1e-3, 0.0).is_ok());
        assert!(matches!(
            IntegratorConfig::new(1e-14, 1.0),
            Err(Error::StepUnderflow { .. })
        ));
        let c = IntegratorConfig::new(1e-3, 5.0).unwrap();
        assert_eq!(c.steps(), 5000);
        assert_eq!(c.time(5000), 5.0);
        let c = IntegratorConfig::new(0.03, 1.0).unwrap();
        assert_eq!(c.steps(), 34);
        assert_eq!(c.time(34), 1.0);
    }

    #[test]
    fn hermitian_number_state() {
        let s = space();
        let p = ModelParams::derived(s, TimeProfile::constant(2.0), 0.0).unwrap();
        let psi0 = StateVector::basis(s, 1).unwrap();
        let cfg = IntegratorConfig::new(1e-3, 1.0).unwrap();
        let traj = integrate(&p, &psi0, &cfg).unwrap();
        assert_eq!(traj.len(), 1001);
        let exact = psi0.scale(Complex::from_polar(1.0, -2.0 * eigenvalue(1)));
        assert!(fidelity(traj.last().unwrap(), &exact, 4).unwrap() >= 1.0 - 1e-8);
        let phase = traj.last().unwrap().amplitudes()[1];
        assert!((phase - exact.amplitudes()[1]).norm() < 1e-10);
        assert!(traj.euclid_norm_drift() < 1e-10);
    }

    #[test]
    fn zero_length_run() {
        let s = space();
        let p = ModelParams::derived(s, TimeProfile::constant(1.0), 0.3).unwrap();
        let psi0 = StateVector::basis(s, 0).unwrap();
        let cfg = IntegratorConfig::new(1e-3, 0.0).unwrap();
        let traj = integrate(&p, &psi0, &cfg).unwrap();
        assert_eq!(traj.states, vec![psi0]);
        assert_eq!(traj.times, vec![0.0]);
    }

    #[test]
    fn wrong_space_rejected() {
        let p = ModelParams::derived(space(), TimeProfile::constant(1.0), 0.3).unwrap();
        let psi0 = StateVector::basis(FockSpace::new(16, 2).unwrap(), 0).unwrap();
        let cfg = IntegratorConfig::new(1e-3, 1.0).unwrap();
        assert!(integrate(&p, &psi0, &cfg).is_err());
    }

    #[test]
    fn divergence_is_reported() {
        // Far outside the unbroken regime the truncated H has large complex eigenvalues.
        let s = space();
        let g = TimeProfile::constant(1e4);
        let p = ModelParams::explicit(s, TimeProfile::constant(0.0), g, 0.0).unwrap();
        let mut v = DVector::from_element(32, Complex::from(1.0));
        v[0] = Complex::from(1.0);
        let psi0 = StateVector::new(s, v).unwrap();
        let cfg = IntegratorConfig::new(1e-2, 10.0).unwrap();
        let run = integrate_partial(&p, &psi0, &cfg).unwrap();
        assert!(matches!(run.error, Some(Error::Diverged { .. })));
        assert!(!run.trajectory.is_empty());
        assert!(integrate(&p, &psi0, &cfg).is_err());
    }

    #[test]
    fn derived_mode_matches_closed_form() {
        let s = FockSpace::new(64, 8).unwrap();
        let omega = TimeProfile::sinusoidal(1.0, 0.3, 2.0, 0.0);
        let p = ModelParams::derived(s, omega, std::f64::consts::FRAC_PI_6).unwrap();
        let a = crate::dynamics::AnalyticSolution::new(&p, 0).unwrap();
        let cfg = IntegratorConfig::new(1e-3, 2.0).unwrap();
        let traj = integrate(&p, &a.initial_state().unwrap(), &cfg).unwrap();
        for (t, state) in traj.times.iter().zip(&traj.states).step_by(100) {
            let f = fidelity(state, &a.state_at(*t).unwrap(), 8).unwrap();
            assert!(f >= 1.0 - 1e-6, "t = {t}: {f}");
        }
        assert!(traj.eta_norm_drift() < 1e-8);
        assert!((traj.eta_norms[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn plain_truncation_blows_up() {
        let s = FockSpace::new(64, 8).unwrap();
        let p = ModelParams::derived(s, TimeProfile::constant(1.0), std::f64::consts::FRAC_PI_6)
            .unwrap();
        let a = crate::dynamics::AnalyticSolution::new(&p, 0).unwrap();
        let cfg = IntegratorConfig::new(1e-3, 5.0).unwrap();
        let g = ModelGenerator::truncated(&p);
        let run = propagate(
            &g,
            &a.initial_state().unwrap(),
            &cfg,
            |v| v.norm(),
            |_| Ok(0.0),
        )
        .unwrap();
        assert!(run.trajectory.states.last().unwrap().norm() > 1e3);
    }

    #[test]
    fn dyson_frame_agrees_with_direct() {
        let s = FockSpace::new(64, 8).unwrap();
        let omega = TimeProfile::sinusoidal(1.0, 0.3, 2.0, 0.0);
        let p = ModelParams::derived(s, omega, 0.4).unwrap();
        let a = crate::dynamics::AnalyticSolution::new(&p, 1).unwrap();
        let cfg = IntegratorConfig::new(1e-3, 1.0).unwrap();
        let direct = integrate(&p, &a.initial_state().unwrap(), &cfg).unwrap();
        let framed = integrate_dyson_frame(&p, &a.initial_state().unwrap(), &cfg).unwrap();
        let f = fidelity(direct.last().unwrap(), framed.last().unwrap(), 8).unwrap();
        assert!(f >= 1.0 - 1e-7, "{f}");
    }
}
