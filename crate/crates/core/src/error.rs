use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("mode count must be at least 1")]
    ZeroModes,

    #[error("{what} is not symmetric (residual {residual:.3e})")]
    NotSymmetric { what: &'static str, residual: f64 },

    #[error("{what} is not antisymmetric (residual {residual:.3e})")]
    NotAntisymmetric { what: &'static str, residual: f64 },

    #[error("{what} is not positive definite (smallest eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { what: &'static str, min_eig: f64 },

    #[error("{what} is not positive semidefinite (smallest eigenvalue {min_eig:.3e})")]
    NotPositiveSemidefinite { what: &'static str, min_eig: f64 },

    #[error("{what} is singular")]
    Singular { what: &'static str },

    #[error("{what} is not symplectic (residual {residual:.3e})")]
    NotSymplectic { what: &'static str, residual: f64 },

    #[error("rows do not form an incomplete symplectic basis (residual {residual:.3e})")]
    IncompleteBasis { residual: f64 },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("occupation number {0} is negative")]
    NegativeOccupation(f64),

    #[error("two-mode standard form violates {inequality} (value {value:.6e})")]
    StandardForm { inequality: &'static str, value: f64 },

    #[error("channel is not completely positive (smallest eigenvalue of Y - i Sigma is {min_eig:.3e})")]
    NotCompletelyPositive { min_eig: f64 },

    #[error("channel is not of class (i): rank Y = {noise_rank}, rank Sigma = {defect_rank}, both must equal {full}")]
    NotClassOne {
        noise_rank: usize,
        defect_rank: usize,
        full: usize,
    },

    #[error("additive-noise channel expected (X must be the identity)")]
    NotAdditive,

    #[error("J has an eigenvalue equal to 1")]
    UnitEigenvalue,

    #[error("parameter {name} = {value} outside the domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid two-mode class: {0}")]
    InvalidClass(&'static str),

    #[error("format error in field `{field}`: {message}")]
    Format { field: String, message: String },
}
