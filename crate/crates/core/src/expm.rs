//! Operator exponentials.
//!
//! [`matrix_exponential`] is the dense exponential of a finite matrix.
//! [`exponential_block`] and [`similarity_series`] work on a padded ladder
//! space instead: they reproduce the retained block of the untruncated
//! operator, which the dense exponential of a truncated generator does not.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operator::{Complex, LinearOperator, ZERO};

pub const DEFAULT_NORM_CAP: f64 = 50.0;
const HERMITIAN_TOL: f64 = 1e-13;

// Padé(13) numerator coefficients and the matching scaling threshold.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// `exp(A)` with the default norm cap.
pub fn matrix_exponential(a: &LinearOperator) -> Result<LinearOperator> {
    matrix_exponential_with_cap(a, DEFAULT_NORM_CAP)
}

/// `exp(A)`: spectral decomposition when `A` is Hermitian, otherwise
/// scaling and squaring with a degree-13 Padé approximant.
pub fn matrix_exponential_with_cap(a: &LinearOperator, cap: f64) -> Result<LinearOperator> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let norm = a.norm_one();
    if norm > cap {
        return Err(Error::NormOverflow { norm, cap });
    }
    let m = a.entries();
    let out = if a.is_hermitian(HERMITIAN_TOL) {
        hermitian_exp(m)
    } else {
        pade_exp(m, norm)?
    };
    LinearOperator::new(a.space(), out)
}

fn hermitian_exp(m: &DMatrix<Complex>) -> DMatrix<Complex> {
    let eig = m.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let scaled = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| {
        v[(i, j)] * eig.eigenvalues[j].exp()
    });
    scaled * v.adjoint()
}

fn pade_exp(m: &DMatrix<Complex>, norm: f64) -> Result<DMatrix<Complex>> {
    let n = m.nrows();
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = m * Complex::new(2f64.powi(-squarings), 0.0);
    let b = |k: usize| Complex::new(PADE13[k], 0.0);

    let id = DMatrix::<Complex>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u = &a * (&a6 * u_inner + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1));
    let v_inner = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = &a6 * v_inner + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);

    let numer = &v + &u;
    let denom = &v - &u;
    let mut r = denom.lu().solve(&numer).ok_or(Error::NonFinite)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

/// Row-compressed copy of a sparse generator, used for repeated products.
#[derive(Debug, Clone)]
pub(crate) struct SparseRows {
    rows: Vec<Vec<(usize, Complex)>>,
    cols: Vec<Vec<(usize, Complex)>>,
    bandwidth: usize,
}

impl SparseRows {
    pub(crate) fn from_dense(m: &DMatrix<Complex>) -> Self {
        let n = m.nrows();
        let mut rows = vec![Vec::new(); n];
        let mut cols = vec![Vec::new(); n];
        let mut bandwidth = 0;
        for i in 0..n {
            for j in 0..n {
                let z = m[(i, j)];
                if z != ZERO {
                    rows[i].push((j, z));
                    cols[j].push((i, z));
                    bandwidth = bandwidth.max(i.abs_diff(j));
                }
            }
        }
        Self {
            rows,
            cols,
            bandwidth,
        }
    }

    pub(crate) fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// `G·X` for dense `X` with as many rows as `G`.
    pub(crate) fn left_mul(&self, x: &DMatrix<Complex>) -> DMatrix<Complex> {
        let mut out = DMatrix::zeros(self.rows.len(), x.ncols());
        for (i, row) in self.rows.iter().enumerate() {
            for &(k, g) in row {
                for c in 0..x.ncols() {
                    out[(i, c)] += g * x[(k, c)];
                }
            }
        }
        out
    }

    /// `X·G` for dense square `X`.
    pub(crate) fn right_mul(&self, x: &DMatrix<Complex>) -> DMatrix<Complex> {
        let mut out = DMatrix::zeros(x.nrows(), self.cols.len());
        for (j, col) in self.cols.iter().enumerate() {
            for &(k, g) in col {
                for r in 0..x.nrows() {
                    out[(r, j)] += x[(r, k)] * g;
                }
            }
        }
        out
    }
}

/// Leading `cols` columns of `exp(G)` by a Taylor series applied column by column.
///
/// `generator` must live on a space large enough that no term reaches the
/// last rows: with bandwidth `b` and `max_terms` terms the first `cols`
/// columns stay exact when `dim ≥ cols + b·max_terms + b`. The returned matrix
/// is the leading `cols × cols` block.
pub fn exponential_block(
    generator: &LinearOperator,
    cols: usize,
    max_terms: usize,
) -> Result<(DMatrix<Complex>, usize)> {
    let g = SparseRows::from_dense(generator.entries());
    let dim = generator.dim();
    let needed = cols + g.bandwidth() * (max_terms + 1);
    if dim < needed {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: needed,
        });
    }
    let mut term = DMatrix::<Complex>::identity(dim, cols);
    let mut sum = term.clone();
    for k in 1..=max_terms {
        term = g.left_mul(&term) * Complex::new(1.0 / k as f64, 0.0);
        sum += &term;
        if k >= 4 && term.norm() <= f64::EPSILON * 1e-2 * sum.norm() {
            return Ok((sum.view((0, 0), (cols, cols)).into_owned(), k));
        }
    }
    Err(Error::SeriesDiverged { terms: max_terms })
}

/// `exp(G)·T·exp(−G)` as the nested-commutator series `Σₖ ad_G^k(T)/k!`.
///
/// Each commutator spreads boundary corruption by one bandwidth of `G`, so
/// only the leading `watch × watch` block is meaningful once the padding
/// exceeds `bandwidth·terms`; convergence is judged on that block alone.
/// Returns the full sum and the number of terms used.
///
/// Only suitable for small `‖G‖` on the watched block: components outside a
/// closed subalgebra grow like `exp(ad_G)` of a generic matrix, which turns
/// roundoff into O(1) errors once `‖G‖` is large.
pub fn similarity_series(
    generator: &LinearOperator,
    target: &LinearOperator,
    watch: usize,
    max_terms: usize,
) -> Result<(LinearOperator, usize)> {
    if generator.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            left: generator.dim(),
            right: target.dim(),
        });
    }
    let watch = watch.min(target.dim());
    let block_norm = |m: &DMatrix<Complex>| m.view((0, 0), (watch, watch)).norm();
    let g = SparseRows::from_dense(generator.entries());
    let mut term = target.entries().clone();
    let mut sum = term.clone();
    let scale = block_norm(&sum).max(1.0);
    for k in 1..=max_terms {
        term = (g.left_mul(&term) - g.right_mul(&term)) * Complex::new(1.0 / k as f64, 0.0);
        sum += &term;
        if k >= 2 && block_norm(&term) <= f64::EPSILON * 1e-2 * scale {
            return Ok((LinearOperator::new(target.space(), sum)?, k));
        }
    }
    Err(Error::SeriesDiverged { terms: max_terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockSpace;
    use crate::operator::{I, ONE};
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn space(n: usize) -> FockSpace {
        FockSpace::new(n, 0).unwrap()
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let s = space(8);
        let e = matrix_exponential(&LinearOperator::zeros(s)).unwrap();
        assert_eq!(e, LinearOperator::identity(s));
    }

    #[test]
    fn exp_of_diagonal() {
        let s = space(8);
        let a = LinearOperator::from_diagonal(s, |i| {
            if i == 0 {
                Complex::new(2f64.ln(), 0.0)
            } else {
                ZERO
            }
        });
        let e = matrix_exponential(&a).unwrap();
        let expected =
            LinearOperator::from_diagonal(s, |i| Complex::new(if i == 0 { 2.0 } else { 1.0 }, 0.0));
        assert!((e.entries() - expected.entries()).norm() < 1e-14);
    }

    #[test]
    fn pade_matches_spectral_path() {
        // A Hermitian matrix perturbed just past the detection threshold takes the Padé path.
        let mut rng = StdRng::seed_from_u64(21);
        let n = 12;
        let raw = DMatrix::from_fn(n, n, |_, _| {
            Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let herm = (&raw + raw.adjoint()) * Complex::new(0.5, 0.0);
        let h = LinearOperator::new(space(n), herm.clone()).unwrap();
        let mut bumped = herm;
        bumped[(0, 1)] += Complex::new(1e-11, 0.0);
        let p = LinearOperator::new(space(n), bumped).unwrap();
        assert!(p.hermiticity_defect() > HERMITIAN_TOL);
        let eh = matrix_exponential(&h).unwrap();
        let ep = matrix_exponential(&p).unwrap();
        let rel = (eh.entries() - ep.entries()).norm() / eh.norm();
        assert!(rel < 1e-9, "rel = {rel:e}");
    }

    #[test]
    fn pade_handles_rotation_generator() {
        // exp(θ·[[0,-1],[1,0]]) is a rotation, embedded in an 8-dim space.
        let s = space(8);
        let theta = 7.3;
        let a = LinearOperator::new(
            s,
            DMatrix::from_fn(8, 8, |i, j| match (i, j) {
                (0, 1) => Complex::new(-theta, 0.0),
                (1, 0) => Complex::new(theta, 0.0),
                _ => ZERO,
            }),
        )
        .unwrap();
        let e = matrix_exponential(&a).unwrap();
        assert!((e.get(0, 0) - Complex::new(theta.cos(), 0.0)).norm() < 1e-12);
        assert!((e.get(1, 0) - Complex::new(theta.sin(), 0.0)).norm() < 1e-12);
        assert!((e.get(5, 5) - ONE).norm() < 1e-12);
    }

    #[test]
    fn inverse_pair_for_skew_hermitian_generators() {
        // exp(A)·exp(−A) = I for anti-Hermitian A up to the norm cap of the guarantee.
        let mut rng = StdRng::seed_from_u64(2);
        let n = 16;
        for target in [0.5, 3.0, 10.0] {
            let raw = DMatrix::from_fn(n, n, |_, _| {
                Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let herm = (&raw + raw.adjoint()) * Complex::new(0.5, 0.0);
            let a = LinearOperator::new(space(n), &herm * I).unwrap();
            let a = a.scale_real(target / a.norm_one());
            let e = matrix_exponential(&a).unwrap();
            let f = matrix_exponential(&(-&a)).unwrap();
            let err = ((e.entries() * f.entries()) - DMatrix::identity(n, n)).norm();
            assert!(err < 1e-10, "norm {target}: {err:e}");
        }
    }

    #[test]
    fn rejects_non_finite_and_large_norm() {
        let s = space(8);
        let mut m = DMatrix::zeros(8, 8);
        m[(2, 3)] = Complex::new(f64::NAN, 0.0);
        assert_eq!(
            matrix_exponential(&LinearOperator::new(s, m).unwrap()),
            Err(Error::NonFinite)
        );
        let big = LinearOperator::identity(s).scale_real(60.0);
        assert!(matches!(
            matrix_exponential(&big),
            Err(Error::NormOverflow { .. })
        ));
    }

    #[test]
    fn exponential_block_rejects_short_padding() {
        let s = space(10);
        let g = LinearOperator::new(
            s,
            DMatrix::from_fn(10, 10, |i, j| if i == j + 1 { ONE } else { ZERO }),
        )
        .unwrap();
        assert!(exponential_block(&g, 8, 5).is_err());
    }

    #[test]
    fn exponential_block_of_nilpotent_shift() {
        // exp of the lower shift S has entries 1/(i−j)! below the diagonal.
        let n = 40;
        let s = space(n);
        let g = LinearOperator::new(
            s,
            DMatrix::from_fn(n, n, |i, j| if i == j + 1 { ONE } else { ZERO }),
        )
        .unwrap();
        let (block, _) = exponential_block(&g, 6, 30).unwrap();
        let fact = |k: usize| (1..=k).product::<usize>() as f64;
        for i in 0..6 {
            for j in 0..6 {
                let want = if i >= j { 1.0 / fact(i - j) } else { 0.0 };
                assert!((block[(i, j)].re - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn similarity_series_matches_dense_conjugation() {
        // For a small Hermitian generator the dense route is well conditioned.
        let mut rng = StdRng::seed_from_u64(4);
        let n = 10;
        let raw = DMatrix::from_fn(n, n, |_, _| {
            Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let g =
            LinearOperator::new(space(n), (&raw + raw.adjoint()) * Complex::new(0.2, 0.0)).unwrap();
        let t = LinearOperator::new(
            space(n),
            DMatrix::from_fn(n, n, |_, _| Complex::new(rng.random_range(-1.0..1.0), 0.0)),
        )
        .unwrap();
        let (conj, _) = similarity_series(&g, &t, n, 200).unwrap();
        let e = matrix_exponential(&g).unwrap();
        let einv = matrix_exponential(&(-&g)).unwrap();
        let dense = &(&e * &t) * &einv;
        assert!((conj.entries() - dense.entries()).norm() < 1e-11);
    }
}
