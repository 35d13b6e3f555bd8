use nalgebra::Schur;

use crate::error::{Error, Result};
use crate::operator::{Complex, LinearOperator};

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 100_000;

/// The `count` eigenvalues with lowest real part, sorted by real then imaginary part.
///
/// `count` is limited to `dim/4`; higher eigenvalues are dominated by truncation.
pub fn spectrum(h: &LinearOperator, count: usize) -> Result<Vec<Complex>> {
    let limit = h.dim() / 4;
    if count > limit {
        return Err(Error::SpectrumCount { count, limit });
    }
    let mut eig = all_eigenvalues(h)?;
    eig.truncate(count);
    Ok(eig)
}

/// Every eigenvalue of `h`, sorted by real then imaginary part.
pub fn all_eigenvalues(h: &LinearOperator) -> Result<Vec<Complex>> {
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let schur = Schur::try_new(h.entries().clone(), SCHUR_EPS, SCHUR_MAX_ITER)
        .ok_or(Error::EigenFailure)?;
    let (_, t) = schur.unpack();
    let mut eig: Vec<Complex> = (0..t.nrows()).map(|i| t[(i, i)]).collect();
    eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(eig)
}

/// Largest `|Im λ|` over the given eigenvalues.
pub fn max_imaginary(eigenvalues: &[Complex]) -> f64 {
    eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

/// Smallest eigenvalue of a Hermitian operator.
pub fn min_hermitian_eigenvalue(h: &LinearOperator) -> f64 {
    h.entries()
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
