//! The `scan` subcommand: residuals and spectral reality over an (Ω₀, G₀) grid.

use std::io::Write;

use ptsym_core::dynamics::{max_imaginary, spectrum};
use ptsym_core::model::checks::{heisenberg_residual, pseudo_hermiticity_residual};
use ptsym_core::model::{gamma_from_coupling, hamiltonian_at, ModelParams, TimeProfile};
use ptsym_core::FockSpace;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::num;

pub const HEADER: [&str; 7] = [
    "omega0",
    "g0",
    "gamma",
    "ph_residual",
    "heis_residual",
    "max_im_eig",
    "error",
];

const HEISENBERG_DT: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub omega0: f64,
    pub g0: f64,
    pub gamma: Option<f64>,
    pub ph_residual: Option<f64>,
    pub heis_residual: Option<f64>,
    pub max_im_eig: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy)]
struct Measured {
    ph: f64,
    heis: f64,
    max_im: f64,
}

fn measure(space: FockSpace, omega0: f64, g0: f64, gamma: f64) -> Result<Measured, CliError> {
    let params = ModelParams::explicit(
        space,
        TimeProfile::constant(omega0),
        TimeProfile::constant(g0),
        gamma,
    )?;
    let h = hamiltonian_at(&params, 0.0)?;
    Ok(Measured {
        ph: pseudo_hermiticity_residual(&params, 0.0)?.value,
        heis: heisenberg_residual(&params, 0.0, HEISENBERG_DT)?.value,
        max_im: max_imaginary(&spectrum(&h, space.dim() / 4)?),
    })
}

fn point(space: FockSpace, omega0: f64, g0: f64) -> ScanRow {
    let mut row = ScanRow {
        omega0,
        g0,
        gamma: None,
        ph_residual: None,
        heis_residual: None,
        max_im_eig: None,
        error: None,
    };
    let solution = match gamma_from_coupling(omega0, g0) {
        Ok(s) => s,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.gamma = Some(solution.gamma);
    if solution.boundary {
        row.error = Some("Omega0 = 0 puts gamma on the metric singularity".into());
        return row;
    }
    match measure(space, omega0, g0, solution.gamma) {
        Ok(m) => {
            row.ph_residual = Some(m.ph);
            row.heis_residual = Some(m.heis);
            row.max_im_eig = Some(m.max_im);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Evaluates the grid on the current rayon pool; rows come back row-major
/// (Ω₀ outer, G₀ inner) regardless of scheduling.
pub fn run_scan(config: &RunConfig) -> Result<Vec<ScanRow>, CliError> {
    config.validate()?;
    let space = config.space()?;
    let omegas = config.scan.omega0.values();
    let gs = config.scan.g0.values();
    let grid: Vec<(f64, f64)> = omegas
        .iter()
        .flat_map(|&o| gs.iter().map(move |&g| (o, g)))
        .collect();
    Ok(grid.par_iter().map(|&(o, g)| point(space, o, g)).collect())
}

fn cell(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[ScanRow], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            num(r.omega0),
            num(r.g0),
            cell(r.gamma),
            cell(r.ph_residual),
            cell(r.heis_residual),
            cell(r.max_im_eig),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
