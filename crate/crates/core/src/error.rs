use thiserror::Error;

/// Errors raised by the operator algebra, the model, and the integrator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Fock space: {0}")]
    InvalidSpace(String),

    #[error("dimension mismatch: left is {left}, right is {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("buffer {buffer} too large for dimension {dim} (need buffer < dim/2)")]
    BufferTooLarge { buffer: usize, dim: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix norm {norm} exceeds exponential cap {cap}")]
    NormOverflow { norm: f64, cap: f64 },

    #[error("metric angle {angle} violates the conditioning guard |angle| < pi/2 - 1e-6")]
    Conditioning { angle: f64 },

    #[error("invalid time profile: {0}")]
    InvalidProfile(String),

    #[error("profile evaluated to a non-finite value at t = {t}")]
    NonFiniteProfile { t: f64 },

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("constraint G = Omega tan(gamma)/2 violated by {violation:e} at t = {t}")]
    ConstraintViolated { t: f64, violation: f64 },

    #[error("both Omega and G are zero; gamma is undefined")]
    DegenerateCoupling,

    #[error("invalid integrator configuration: {0}")]
    InvalidIntegrator(String),

    #[error("time step {dt} underflows the run length")]
    StepUnderflow { dt: f64 },

    #[error("state diverged at t = {t} (step {step})")]
    Diverged { t: f64, step: usize },

    #[error("number state {n} outside the safe range (< {limit})")]
    StateOutOfRange { n: usize, limit: usize },

    #[error("requested {count} eigenvalues but only {limit} are truncation-safe")]
    SpectrumCount { count: usize, limit: usize },

    #[error("eigensolver failed to converge")]
    EigenFailure,

    #[error("series did not converge within {terms} terms")]
    SeriesDiverged { terms: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
