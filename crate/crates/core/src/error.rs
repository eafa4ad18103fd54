use thiserror::Error;

/// Errors produced by the analysis routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BergError {
    #[error("not a toral automorphism: determinant is {0}, expected +1 or -1")]
    NotAutomorphism(i128),

    #[error("not hyperbolic: {0}")]
    NotHyperbolic(String),

    #[error("quadratic field mismatch: discriminant {left} vs {right}")]
    ContextMismatch { left: i128, right: i128 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid discriminant {0}: must be a positive non-square")]
    BadDiscriminant(i128),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid connectivity matrix: {0}")]
    InvalidConnectivity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("placement infeasible: {0}")]
    Infeasible(String),

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, BergError>;
