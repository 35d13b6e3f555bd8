//! The `spectrum` subcommand: lowest eigenvalues of H(0) next to the ladder formula.

use std::io::Write;

use ptsym_core::dynamics::spectrum;
use ptsym_core::model::hamiltonian_at;
use ptsym_core::su11::eigenvalue;
use ptsym_core::Complex;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::num;

pub const HEADER: [&str; 4] = ["n", "re", "im", "predicted"];

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumOutput {
    pub eigenvalues: Vec<Complex>,
    /// `√(Ω²+4G²)·kₙ`; absent when Ω(0) ≤ 0.
    pub predicted: Option<Vec<f64>>,
}

pub fn run_spectrum(config: &RunConfig) -> Result<SpectrumOutput, CliError> {
    config.validate()?;
    let params = config.params()?;
    let h = hamiltonian_at(&params, 0.0)?;
    let eigenvalues = spectrum(&h, config.spectrum_count())?;
    let omega = params.omega_at(0.0)?;
    let g = params.coupling_at(0.0)?;
    let predicted = (omega > 0.0).then(|| {
        let scale = (omega * omega + 4.0 * g * g).sqrt();
        (0..eigenvalues.len())
            .map(|n| scale * eigenvalue(n))
            .collect()
    });
    Ok(SpectrumOutput {
        eigenvalues,
        predicted,
    })
}

impl SpectrumOutput {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(HEADER)?;
        for (n, z) in self.eigenvalues.iter().enumerate() {
            let p = self
                .predicted
                .as_ref()
                .map(|p| num(p[n]))
                .unwrap_or_default();
            w.write_record([n.to_string(), num(z.re), num(z.im), p])?;
        }
        w.flush()?;
        Ok(())
    }
}
