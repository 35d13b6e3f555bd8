//! Bosonic realization of su(1,1) and the discrete symmetries P and T.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::operator::{AntilinearOperator, Complex, LinearOperator, ZERO};

/// Annihilation and creation matrices `(a, a†)` truncated to `dim` states.
pub fn ladder_operators(dim: usize) -> Result<(DMatrix<Complex>, DMatrix<Complex>)> {
    if dim < 4 {
        return Err(Error::InvalidSpace(format!(
            "su(1,1) generators need at least 4 states, got {dim}"
        )));
    }
    let a = DMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            Complex::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    });
    let adag = a.adjoint();
    Ok((a, adag))
}

/// `K₀ = ½(a†a + ½)`, `K₊ = ½(a†)²`, `K₋ = ½a²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Su11Generators {
    pub k0: LinearOperator,
    pub kplus: LinearOperator,
    pub kminus: LinearOperator,
}

impl Su11Generators {
    pub fn new(space: FockSpace) -> Self {
        let n = space.dim();
        // Entries are filled in closed form so K₊ and K₋ are exact transposes.
        let k0 = LinearOperator::from_diagonal(space, |i| Complex::new(eigenvalue(i), 0.0));
        let kplus = DMatrix::from_fn(n, n, |i, j| {
            if i == j + 2 {
                Complex::new(0.5 * ((j as f64 + 1.0) * (j as f64 + 2.0)).sqrt(), 0.0)
            } else {
                ZERO
            }
        });
        let kminus = kplus.transpose();
        Self {
            k0,
            kplus: LinearOperator::from_parts(space, kplus),
            kminus: LinearOperator::from_parts(space, kminus),
        }
    }

    /// `K₊ + K₋`.
    pub fn sum(&self) -> LinearOperator {
        &self.kplus + &self.kminus
    }

    /// `K₊ − K₋`.
    pub fn difference(&self) -> LinearOperator {
        &self.kplus - &self.kminus
    }
}

/// Builds the generators through the ladder-operator products.
pub fn su11_generators(space: FockSpace) -> Result<Su11Generators> {
    let (a, adag) = ladder_operators(space.dim())?;
    let half = Complex::new(0.5, 0.0);
    let id = DMatrix::<Complex>::identity(space.dim(), space.dim());
    let k0 = (&adag * &a + &id * half) * half;
    let kplus = &adag * &adag * half;
    let kminus = &a * &a * half;
    Ok(Su11Generators {
        k0: LinearOperator::new(space, k0)?,
        kplus: LinearOperator::new(space, kplus)?,
        kminus: LinearOperator::new(space, kminus)?,
    })
}

/// Eigenvalue `kₙ = n/2 + 1/4` of `K₀` on `|n⟩`.
pub fn eigenvalue(n: usize) -> f64 {
    0.5 * n as f64 + 0.25
}

/// Parity `P` (diagonal `(−1)ⁿ`) and time reversal `T` (conjugation in the Fock basis).
pub fn discrete_symmetries(space: FockSpace) -> (LinearOperator, AntilinearOperator) {
    (parity(space), AntilinearOperator::conjugation(space))
}

pub fn parity(space: FockSpace) -> LinearOperator {
    LinearOperator::from_diagonal(space, |i| {
        Complex::new(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
    })
}

/// `PT`, antilinear with matrix part `P`.
pub fn pt(space: FockSpace) -> AntilinearOperator {
    AntilinearOperator::from_linear(&parity(space))
}
