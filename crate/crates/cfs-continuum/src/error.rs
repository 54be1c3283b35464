//! Error type shared by all modules of the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("index {index} out of range for {what}")]
    IndexOutOfRange { what: &'static str, index: usize },

    #[error("kernel order {0} is not supported")]
    UnsupportedOrder(i32),

    #[error("requested accuracy not attainable: {0}")]
    AccuracyNotAttainable(String),

    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("tail bound violated: doubling the box changed the result by {rel_change:e} (> {rel_tol:e})")]
    TailBoundViolated { rel_change: f64, rel_tol: f64 },

    #[error("closed chain is degenerate: |tr[(A-b)^2]| = {discriminant:e} below threshold {threshold:e}")]
    DegenerateDiscriminant { discriminant: f64, threshold: f64 },

    #[error("operation requires spatial radius r > 0")]
    RadiusZero,

    #[error("input violates spin symmetry: residual {residual:e} exceeds {tolerance:e}")]
    SymmetryViolation { residual: f64, tolerance: f64 },

    #[error("series truncation order {requested} is below the exact truncation order {required}")]
    TruncationTooLow { requested: usize, required: usize },

    #[error("finite-difference step {0:e} too large for the regularization scale")]
    StepTooLarge(f64),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("coefficient {0} is numerically indistinguishable from zero")]
    VanishingCoefficient(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
