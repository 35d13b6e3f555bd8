use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::operator::{Complex, ONE, ZERO};

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: FockSpace,
    amplitudes: DVector<Complex>,
}

impl StateVector {
    pub fn new(space: FockSpace, amplitudes: DVector<Complex>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                left: space.dim(),
                right: amplitudes.len(),
            });
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        Ok(Self { space, amplitudes })
    }

    /// Number state `|n⟩`.
    pub fn basis(space: FockSpace, n: usize) -> Result<Self> {
        if n >= space.dim() {
            return Err(Error::StateOutOfRange {
                n,
                limit: space.dim(),
            });
        }
        let v = DVector::from_fn(space.dim(), |i, _| if i == n { ONE } else { ZERO });
        Ok(Self {
            space,
            amplitudes: v,
        })
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &DVector<Complex> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<Complex> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn scale(&self, c: Complex) -> Self {
        Self {
            space: self.space,
            amplitudes: &self.amplitudes * c,
        }
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self.space.dim() != other.space.dim() {
            return Err(Error::DimensionMismatch {
                left: self.space.dim(),
                right: other.space.dim(),
            });
        }
        Ok(())
    }
}

/// `|⟨u, v⟩| / (‖u‖·‖v‖)` after discarding the top `buffer` amplitudes of both.
pub fn fidelity(u: &StateVector, v: &StateVector, buffer: usize) -> Result<f64> {
    u.check_same(v)?;
    let k = u.space.dim().saturating_sub(buffer);
    let a = u.amplitudes.rows(0, k);
    let b = v.amplitudes.rows(0, k);
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(a.dotc(&b).norm() / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_and_fidelity() {
        let s = FockSpace::new(8, 2).unwrap();
        let a = StateVector::basis(s, 1).unwrap();
        let b = a.scale(Complex::new(0.0, 3.0));
        assert!((fidelity(&a, &b, 2).unwrap() - 1.0).abs() < 1e-15);
        let c = StateVector::basis(s, 2).unwrap();
        assert_eq!(fidelity(&a, &c, 2).unwrap(), 0.0);
        // Amplitude in the buffer is ignored.
        let d = StateVector::basis(s, 7).unwrap();
        assert_eq!(fidelity(&a, &d, 2).unwrap(), 0.0);
        assert!(StateVector::basis(s, 8).is_err());
    }

    #[test]
    fn rejects_bad_vectors() {
        let s = FockSpace::new(8, 2).unwrap();
        assert!(StateVector::new(s, DVector::zeros(7)).is_err());
        let mut v = DVector::zeros(8);
        v[0] = Complex::new(f64::INFINITY, 0.0);
        assert_eq!(StateVector::new(s, v), Err(Error::NonFinite));
    }
}
