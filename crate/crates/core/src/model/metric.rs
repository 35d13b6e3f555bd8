//! Metric `η = exp(iγ(K₊ − K₋))`, Dyson map `ρ = η^{1/2}` and the antilinear symmetry `η̃ = PT·η`.
//!
//! The exponent is Hermitian but unbounded, so exponentiating its truncated
//! matrix is dominated by spurious boundary eigenvalues. The functions here
//! return the leading block of the untruncated operator instead.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::expm::{exponential_block, SparseRows};
use crate::fock::FockSpace;
use crate::model::params::check_angle;
use crate::operator::{AntilinearOperator, Complex, LinearOperator, I, ZERO};
use crate::su11::{eigenvalue, parity, Su11Generators};

/// Largest |angle| for which [`metric`] sums the exponential series directly.
///
/// Beyond it the series cancels too strongly in double precision and the
/// factorized closed form is used instead.
pub const DIRECT_SERIES_LIMIT: f64 = 0.35;

/// `i·angle·(K₊ − K₋)`, a Hermitian matrix with purely imaginary entries.
pub fn metric_generator(space: FockSpace, angle: f64) -> LinearOperator {
    Su11Generators::new(space)
        .difference()
        .scale(Complex::new(0.0, angle))
}

/// `exp(i·scale·γ·(K₊ − K₋))`: `scale = 1` gives η, `−1` gives η⁻¹, `½` gives ρ.
pub fn metric(space: FockSpace, gamma: f64, scale: f64) -> Result<LinearOperator> {
    let angle = scale * gamma;
    check_angle(angle)?;
    if angle == 0.0 {
        return Ok(LinearOperator::identity(space));
    }
    if angle.abs() <= DIRECT_SERIES_LIMIT {
        series_metric(space, angle)
    } else {
        disentangled_metric(space, angle)
    }
}

/// Exponential series of the generator, summed on a ladder long enough that
/// no term reaches the truncation edge.
pub fn series_metric(space: FockSpace, angle: f64) -> Result<LinearOperator> {
    check_angle(angle)?;
    let ratio = (2.0 * angle.abs() / std::f64::consts::PI).max(1e-3);
    let mut terms = (-46.0 / ratio.ln()).ceil() as usize + space.dim();
    loop {
        let work = space.padded(2 * (terms + 1));
        let g = metric_generator(work, angle);
        match exponential_block(&g, space.dim(), terms) {
            Ok((block, _)) => return LinearOperator::new(space, block),
            Err(Error::SeriesDiverged { .. }) if terms < 4096 => terms *= 2,
            Err(e) => return Err(e),
        }
    }
}

/// Which coefficients to use in the product `exp(v K₊)·exp(ln v₀ K₀)·exp(c K₋)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disentangling {
    /// `v = i tan γ`, `v₀ = sec² γ`, `c = v*`: reproduces the metric exactly.
    Corrected,
    /// `ν = i tanh γ`, `v₀ = 1 + ln|ν|²`, `c = −ν*`, kept to document the mismatch.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisentangledCoefficients {
    pub raising: Complex,
    pub log_middle: Complex,
    pub lowering: Complex,
}

impl Disentangling {
    pub fn coefficients(self, gamma: f64) -> Result<DisentangledCoefficients> {
        let c = match self {
            Self::Corrected => {
                let v = I * gamma.tan();
                DisentangledCoefficients {
                    raising: v,
                    log_middle: Complex::new(-2.0 * gamma.cos().ln(), 0.0),
                    lowering: v.conj(),
                }
            }
            Self::Literal => {
                let nu = I * gamma.tanh();
                let v0 = Complex::new(1.0 + nu.norm_sqr().ln(), 0.0);
                DisentangledCoefficients {
                    raising: nu,
                    log_middle: v0.ln(),
                    lowering: -nu.conj(),
                }
            }
        };
        let finite = |z: Complex| z.re.is_finite() && z.im.is_finite();
        if finite(c.raising) && finite(c.log_middle) && finite(c.lowering) {
            Ok(c)
        } else {
            Err(Error::NonFinite)
        }
    }
}

/// Leading block of `exp(v K₊)`; lower triangular, so exact under truncation.
fn raising_exponential(dim: usize, v: Complex) -> DMatrix<Complex> {
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut x = Complex::new(1.0, 0.0);
        let mut row = col;
        let mut k = 0usize;
        loop {
            m[(row, col)] = x;
            if row + 2 >= dim {
                break;
            }
            k += 1;
            x *= v * (0.5 * ((row as f64 + 1.0) * (row as f64 + 2.0)).sqrt() / k as f64);
            row += 2;
        }
    }
    m
}

/// Disentangled product with the corrected coefficients.
pub fn disentangled_metric(space: FockSpace, gamma: f64) -> Result<LinearOperator> {
    disentangled_metric_with(space, gamma, Disentangling::Corrected)
}

pub fn disentangled_metric_with(
    space: FockSpace,
    gamma: f64,
    kind: Disentangling,
) -> Result<LinearOperator> {
    check_angle(gamma)?;
    let n = space.dim();
    let c = kind.coefficients(gamma)?;
    let lower = raising_exponential(n, c.raising);
    let middle: Vec<Complex> = (0..n)
        .map(|k| (c.log_middle * eigenvalue(k)).exp())
        .collect();
    let out = match kind {
        Disentangling::Corrected => {
            // Third factor is the adjoint of the first: fill one triangle of L·D·L†.
            let mut m = DMatrix::zeros(n, n);
            for row in 0..n {
                for col in 0..=row {
                    let mut acc = ZERO;
                    for k in (col % 2..=col).step_by(2) {
                        acc += lower[(row, k)] * middle[k] * lower[(col, k)].conj();
                    }
                    m[(row, col)] = acc;
                    m[(col, row)] = acc.conj();
                }
            }
            m
        }
        Disentangling::Literal => {
            let upper = raising_exponential(n, c.lowering).transpose();
            let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(middle));
            lower * d * upper
        }
    };
    let op = LinearOperator::new(space, out)?;
    if op.is_finite() {
        Ok(op)
    } else {
        Err(Error::NonFinite)
    }
}

/// η-orthogonal projections of `|dim⟩` and `|dim+1⟩` onto the retained space.
///
/// Each solves `η_N·x = η[0..N, k]` with `η_N` the leading block. With
/// `η = L·D·L†` and `L` lower triangular this reduces to `x = (L_N†)⁻¹·ℓ`,
/// where `ℓ` is the conjugated row `k` of `L`, so no ill-conditioned solve is
/// needed.
pub fn boundary_projections(space: FockSpace, gamma: f64) -> Result<[DVector<Complex>; 2]> {
    check_angle(gamma)?;
    let n = space.dim();
    let c = Disentangling::Corrected.coefficients(gamma)?;
    let lower = raising_exponential(n + 2, c.raising);
    let lower_inv = raising_exponential(n, -c.raising);
    let project = |k: usize| {
        DVector::from_fn(n, |i, _| {
            let mut acc = ZERO;
            for m in (i..n).step_by(2) {
                acc += lower_inv[(m, i)].conj() * lower[(k, m)].conj();
            }
            acc
        })
    };
    let out = [project(n), project(n + 1)];
    if out
        .iter()
        .all(|v| v.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    {
        Ok(out)
    } else {
        Err(Error::NonFinite)
    }
}

/// Dyson map `ρ = exp(i(γ/2)(K₊ − K₋))`.
pub fn dyson_map(space: FockSpace, gamma: f64) -> Result<LinearOperator> {
    metric(space, gamma, 0.5)
}

pub fn dyson_map_inverse(space: FockSpace, gamma: f64) -> Result<LinearOperator> {
    metric(space, gamma, -0.5)
}

/// `η̃ = PT ∘ η`, antilinear with matrix part `P·conj(η)`.
pub fn eta_tilde(space: FockSpace, gamma: f64) -> Result<AntilinearOperator> {
    let eta = metric(space, gamma, 1.0)?;
    let p = parity(space);
    Ok(AntilinearOperator::from_linear(&(&p * &eta.conj())))
}

/// `exp(G)·T·exp(−G)` with `G = i·angle·(K₊ − K₋)`, restricted to `space`.
///
/// `build` constructs the target on a padded working space; it must lie in
/// the complexified su(1,1) span. The conjugation is applied one Gauss factor
/// at a time, `exp(i t K₊)·exp(c K₀)·exp(−i t K₋)` with `t = tan(angle)` and
/// `c = −2 ln cos(angle)`. The ladder factors act through commutator series
/// that terminate after the second order on the algebra; the diagonal factor
/// is an exact entrywise rescaling. Summing `Σ ad_G^k(T)/k!` directly is not
/// usable: roundoff outside the algebra is amplified like `exp(ad_G)` on a
/// generic matrix, i.e. by the condition number of `η`.
pub fn conjugate_by_metric(
    space: FockSpace,
    angle: f64,
    build: impl Fn(FockSpace) -> LinearOperator,
) -> Result<LinearOperator> {
    if angle == 0.0 {
        return Ok(build(space));
    }
    check_angle(angle)?;
    let work = space.padded(CONJUGATION_PADDING);
    let k = Su11Generators::new(work);
    let t = angle.tan();
    let c = -2.0 * angle.cos().ln();
    let target = build(work);
    let scale = target
        .entries()
        .view((0, 0), (space.dim(), space.dim()))
        .norm()
        .max(1.0);

    let lowering = SparseRows::from_dense(k.kminus.scale(-I * t).entries());
    let mut x = ladder_conjugation(&lowering, target.into_entries(), space.dim(), scale)?;
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            x[(i, j)] *= (0.5 * c * (i as f64 - j as f64)).exp();
        }
    }
    let raising = SparseRows::from_dense(k.kplus.scale(I * t).entries());
    let x = ladder_conjugation(&raising, x, space.dim(), scale)?;
    LinearOperator::new(work, x)?.restrict(space)
}

/// Extra levels kept below the requested space during [`conjugate_by_metric`].
const CONJUGATION_PADDING: usize = 16;

/// `exp(X)·T·exp(−X)` for `X ∝ K±`, truncated after `ad_X²`.
///
/// The third-order term is evaluated as a check: it vanishes on the algebra,
/// so a non-negligible value means the target was outside it.
fn ladder_conjugation(
    x: &SparseRows,
    target: DMatrix<Complex>,
    watch: usize,
    scale: f64,
) -> Result<DMatrix<Complex>> {
    let ad = |m: &DMatrix<Complex>| x.left_mul(m) - x.right_mul(m);
    let first = ad(&target);
    let second = ad(&first) * Complex::from(0.5);
    let third = ad(&second);
    let leak = third.view((0, 0), (watch, watch)).norm();
    if leak > 1e-8 * scale * (1.0 + first.view((0, 0), (watch, watch)).norm()) {
        return Err(Error::InvalidParams(
            "conjugation target is not in the su(1,1) span".into(),
        ));
    }
    Ok(target + first + second)
}

/// Which su(1,1) generator an adjoint action is taken on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    K0,
    Kplus,
    Kminus,
}

impl Generator {
    pub fn build(self, space: FockSpace) -> LinearOperator {
        let k = Su11Generators::new(space);
        match self {
            Self::K0 => k.k0,
            Self::Kplus => k.kplus,
            Self::Kminus => k.kminus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::K0 => "K0",
            Self::Kplus => "Kplus",
            Self::Kminus => "Kminus",
        }
    }
}

/// Closed-form `η K η⁻¹` in terms of the bare generators.
pub fn adjoint_action_rhs(space: FockSpace, gamma: f64, which: Generator) -> LinearOperator {
    let k = Su11Generators::new(space);
    let (c2, s2) = ((2.0 * gamma).cos(), (2.0 * gamma).sin());
    let cos_sq = gamma.cos().powi(2);
    let sin_sq = gamma.sin().powi(2);
    let i_sin2 = Complex::new(0.0, s2);
    match which {
        Generator::K0 => &k.k0.scale_real(c2) - &k.sum().scale(i_sin2 * 0.5),
        Generator::Kplus => {
            &(&k.kplus.scale_real(cos_sq) - &k.kminus.scale_real(sin_sq)) - &k.k0.scale(i_sin2)
        }
        Generator::Kminus => {
            &(&k.kminus.scale_real(cos_sq) - &k.kplus.scale_real(sin_sq)) - &k.k0.scale(i_sin2)
        }
    }
}

/// `η K η⁻¹` evaluated numerically through the commutator series.
pub fn adjoint_action(space: FockSpace, gamma: f64, which: Generator) -> Result<LinearOperator> {
    conjugate_by_metric(space, gamma, |s| which.build(s))
}
