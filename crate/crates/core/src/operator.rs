//! Dense linear and antilinear operators on a truncated Fock space.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::FockSpace;

pub type Complex = Complex64;

pub(crate) const ZERO: Complex = Complex::new(0.0, 0.0);
pub(crate) const ONE: Complex = Complex::new(1.0, 0.0);
pub(crate) const I: Complex = Complex::new(0.0, 1.0);

/// Dense complex matrix acting linearly on a [`FockSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    space: FockSpace,
    entries: DMatrix<Complex>,
}

impl LinearOperator {
    pub fn new(space: FockSpace, entries: DMatrix<Complex>) -> Result<Self> {
        let n = space.dim();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch {
                left: n,
                right: entries.nrows().max(entries.ncols()),
            });
        }
        Ok(Self { space, entries })
    }

    pub(crate) fn from_parts(space: FockSpace, entries: DMatrix<Complex>) -> Self {
        debug_assert_eq!(entries.shape(), (space.dim(), space.dim()));
        Self { space, entries }
    }

    pub fn zeros(space: FockSpace) -> Self {
        let n = space.dim();
        Self::from_parts(space, DMatrix::zeros(n, n))
    }

    pub fn identity(space: FockSpace) -> Self {
        let n = space.dim();
        Self::from_parts(space, DMatrix::identity(n, n))
    }

    pub fn from_diagonal(space: FockSpace, diag: impl Fn(usize) -> Complex) -> Self {
        let n = space.dim();
        Self::from_parts(
            space,
            DMatrix::from_fn(n, n, |i, j| if i == j { diag(i) } else { ZERO }),
        )
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn entries(&self) -> &DMatrix<Complex> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex> {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.entries[(row, col)]
    }

    /// Hermitian conjugate.
    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.space, self.entries.adjoint())
    }

    /// Entrywise complex conjugate in the Fock basis.
    pub fn conj(&self) -> Self {
        Self::from_parts(self.space, self.entries.map(|z| z.conj()))
    }

    pub fn transpose(&self) -> Self {
        Self::from_parts(self.space, self.entries.transpose())
    }

    pub fn scale(&self, factor: Complex) -> Self {
        Self::from_parts(self.space, &self.entries * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex::new(factor, 0.0))
    }

    pub fn apply(&self, v: &DVector<Complex>) -> DVector<Complex> {
        &self.entries * v
    }

    pub fn is_finite(&self) -> bool {
        self.entries
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entrywise modulus of `self − self†`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Frobenius norm of the whole matrix.
    pub fn norm(&self) -> f64 {
        self.entries.norm()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        self.entries
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Top-left block on a smaller space.
    pub fn restrict(&self, space: FockSpace) -> Result<Self> {
        let n = space.dim();
        if n > self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: n,
            });
        }
        Ok(Self::from_parts(
            space,
            self.entries.view((0, 0), (n, n)).into_owned(),
        ))
    }

    /// Copy with every diagonal entry set to zero.
    pub fn off_diagonal(&self) -> Self {
        let mut m = self.entries.clone();
        m.fill_diagonal(ZERO);
        Self::from_parts(self.space, m)
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_same(self, other)?;
        Ok(Self::from_parts(self.space, &self.entries * &other.entries))
    }
}

fn check_same(a: &LinearOperator, b: &LinearOperator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&LinearOperator> for &LinearOperator {
            type Output = LinearOperator;
            fn $method(self, rhs: &LinearOperator) -> LinearOperator {
                assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
                LinearOperator::from_parts(self.space, &self.entries $op &rhs.entries)
            }
        }
        impl $trait<LinearOperator> for LinearOperator {
            type Output = LinearOperator;
            fn $method(self, rhs: LinearOperator) -> LinearOperator {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Mul<Complex> for &LinearOperator {
    type Output = LinearOperator;
    fn mul(self, rhs: Complex) -> LinearOperator {
        self.scale(rhs)
    }
}

impl Mul<f64> for &LinearOperator {
    type Output = LinearOperator;
    fn mul(self, rhs: f64) -> LinearOperator {
        self.scale_real(rhs)
    }
}

impl Neg for &LinearOperator {
    type Output = LinearOperator;
    fn neg(self) -> LinearOperator {
        LinearOperator::from_parts(self.space, -&self.entries)
    }
}

/// Antilinear operator `v ↦ M·conj(v)` where conjugation is taken in the Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AntilinearOperator {
    space: FockSpace,
    matrix: DMatrix<Complex>,
}

impl AntilinearOperator {
    pub fn new(space: FockSpace, matrix: DMatrix<Complex>) -> Result<Self> {
        // Reuse the shape check of the linear constructor.
        let lin = LinearOperator::new(space, matrix)?;
        Ok(Self {
            space,
            matrix: lin.entries,
        })
    }

    /// Pure complex conjugation.
    pub fn conjugation(space: FockSpace) -> Self {
        let n = space.dim();
        Self {
            space,
            matrix: DMatrix::identity(n, n),
        }
    }

    /// `L ∘ K` for a linear `L` and the conjugation `K`.
    pub fn from_linear(op: &LinearOperator) -> Self {
        Self {
            space: op.space,
            matrix: op.entries.clone(),
        }
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Linear part `M`.
    pub fn matrix_part(&self) -> &DMatrix<Complex> {
        &self.matrix
    }

    pub fn matrix_operator(&self) -> LinearOperator {
        LinearOperator::from_parts(self.space, self.matrix.clone())
    }

    pub fn apply(&self, v: &DVector<Complex>) -> DVector<Complex> {
        &self.matrix * v.map(|z| z.conj())
    }

    /// `self ∘ other` for two antilinear maps: linear with matrix `M₁·conj(M₂)`.
    pub fn then_antilinear(&self, other: &Self) -> Result<LinearOperator> {
        self.check(other.dim())?;
        Ok(LinearOperator::from_parts(
            self.space,
            &self.matrix * other.matrix.map(|z| z.conj()),
        ))
    }

    /// `self ∘ op` for a linear `op`: antilinear with matrix `M·conj(L)`.
    pub fn then_linear(&self, op: &LinearOperator) -> Result<Self> {
        self.check(op.dim())?;
        Ok(Self {
            space: self.space,
            matrix: &self.matrix * op.entries.map(|z| z.conj()),
        })
    }

    /// `op ∘ self` for a linear `op`: antilinear with matrix `L·M`.
    pub fn after_linear(&self, op: &LinearOperator) -> Result<Self> {
        self.check(op.dim())?;
        Ok(Self {
            space: self.space,
            matrix: &op.entries * &self.matrix,
        })
    }

    /// `c·A`, i.e. `v ↦ c·M·conj(v)`.
    pub fn scale(&self, c: Complex) -> Self {
        Self {
            space: self.space,
            matrix: &self.matrix * c,
        }
    }

    /// Adjoint defined by `⟨φ, Aψ⟩ = conj⟨A†φ, ψ⟩`; its matrix part is `Mᵀ`.
    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space,
            matrix: self.matrix.transpose(),
        }
    }

    /// `[H, A] = H∘A − A∘H`, antilinear with matrix part `H·M − M·conj(H)`.
    pub fn commutator_with(&self, h: &LinearOperator) -> Result<Self> {
        self.check(h.dim())?;
        let conj_h = h.entries.map(|z| z.conj());
        Ok(Self {
            space: self.space,
            matrix: &h.entries * &self.matrix - &self.matrix * conj_h,
        })
    }

    pub fn restrict(&self, space: FockSpace) -> Result<Self> {
        let lin = self.matrix_operator().restrict(space)?;
        Ok(Self::from_linear(&lin))
    }

    fn check(&self, other: usize) -> Result<()> {
        if self.dim() != other {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other,
            });
        }
        Ok(())
    }
}

/// `AB − BA`.
pub fn commutator(a: &LinearOperator, b: &LinearOperator) -> Result<LinearOperator> {
    check_same(a, b)?;
    Ok(LinearOperator::from_parts(
        a.space,
        &a.entries * &b.entries - &b.entries * &a.entries,
    ))
}

/// Frobenius norm of the leading `(dim − buffer)` block of `m`, divided by the block size.
pub fn interior_norm(m: &DMatrix<Complex>, buffer: usize) -> Result<f64> {
    let dim = m.nrows();
    if 2 * buffer >= dim {
        return Err(Error::BufferTooLarge { buffer, dim });
    }
    let k = dim - buffer;
    Ok(m.view((0, 0), (k, k)).norm() / k as f64)
}

/// Truncation-aware distance between two operators on the same space.
pub fn interior_distance(a: &LinearOperator, b: &LinearOperator, buffer: usize) -> Result<f64> {
    check_same(a, b)?;
    interior_norm(&(&a.entries - &b.entries), buffer)
}
