//! The `evolve` subcommand: RK4 trajectory against the closed-form eigenmode.

use std::io::Write;

use ptsym_core::dynamics::{fidelity, integrate_partial, AnalyticSolution, Trajectory};
use ptsym_core::model::ModelParams;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::num;
use crate::verify::DYNAMICS_LIMIT;

pub const HEADER: [&str; 5] = [
    "t",
    "fidelity_vs_analytic",
    "eta_norm",
    "euclid_norm",
    "theta",
];

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveRow {
    pub t: f64,
    pub fidelity: f64,
    pub eta_norm: f64,
    pub euclid_norm: f64,
    pub theta: f64,
}

#[derive(Debug, Clone)]
pub struct EvolveOutput {
    pub rows: Vec<EvolveRow>,
    /// Set when the run stopped early.
    pub diverged: Option<String>,
    /// Set when γ is past the range where the metric is resolvable in f64.
    pub warning: Option<String>,
}

impl EvolveOutput {
    pub fn min_fidelity(&self) -> f64 {
        self.rows.iter().map(|r| r.fidelity).fold(1.0, f64::min)
    }

    pub fn eta_drift(&self) -> f64 {
        let first = self.rows.first().map_or(0.0, |r| r.eta_norm);
        self.rows
            .iter()
            .map(|r| (r.eta_norm - first).abs())
            .fold(0.0, f64::max)
    }

    pub fn euclid_drift(&self) -> f64 {
        let first = self.rows.first().map_or(0.0, |r| r.euclid_norm);
        self.rows
            .iter()
            .map(|r| (r.euclid_norm - first).abs())
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(HEADER)?;
        for r in &self.rows {
            w.write_record([
                num(r.t),
                num(r.fidelity),
                num(r.eta_norm),
                num(r.euclid_norm),
                num(r.theta),
            ])?;
        }
        let mut inner = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        if let Some(msg) = &self.diverged {
            writeln!(inner, "# diverged: {msg}")?;
        }
        inner.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> String {
        format!(
            "rows={} min_fidelity={} max_eta_drift={} max_euclid_drift={}{}",
            self.rows.len(),
            num(self.min_fidelity()),
            num(self.eta_drift()),
            num(self.euclid_drift()),
            self.diverged
                .as_deref()
                .map(|m| format!(" diverged: {m}"))
                .unwrap_or_default()
        ) + &self
            .warning
            .as_deref()
            .map(|w| format!(" warning: {w}"))
            .unwrap_or_default()
    }
}

fn rows(
    params: &ModelParams,
    exact: &AnalyticSolution,
    traj: &Trajectory,
) -> Result<Vec<EvolveRow>, CliError> {
    let buffer = params.space.buffer();
    let mut out = Vec::with_capacity(traj.len());
    for i in 0..traj.len() {
        let state = &traj.states[i];
        out.push(EvolveRow {
            t: traj.times[i],
            fidelity: fidelity(state, &exact.state_at(traj.times[i])?, buffer)?,
            eta_norm: traj.eta_norms[i],
            euclid_norm: state.norm(),
            theta: traj.theta[i],
        });
    }
    Ok(out)
}

/// Integrates from `ρ⁻¹|initial_n⟩`. Divergence is reported in the output,
/// not as an error, so the partial trajectory can still be written.
pub fn run_evolve(config: &RunConfig) -> Result<EvolveOutput, CliError> {
    config.validate()?;
    let params = config.params()?;
    if !params.is_derived() {
        return Err(CliError::Config(
            "evolve needs coupling_mode = derived".into(),
        ));
    }
    let exact = AnalyticSolution::new(&params, config.initial_n)?;
    let psi0 = exact.initial_state()?;
    let run = integrate_partial(&params, &psi0, &config.integrator()?)?;
    Ok(EvolveOutput {
        rows: rows(&params, &exact, &run.trajectory)?,
        diverged: run.error.map(|e| e.to_string()),
        warning: (params.gamma.abs() > DYNAMICS_LIMIT).then(|| {
            format!("|gamma| > {DYNAMICS_LIMIT}: fidelity and norms are dominated by rounding")
        }),
    })
}
