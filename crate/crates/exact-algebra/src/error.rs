use thiserror::Error;

/// Failures of the exact algebra layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("malformed scalar literal {0:?}")]
    MalformedScalar(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("interpolation abscissae are not pairwise distinct")]
    DegenerateInterpolation,
    #[error("malformed interpolation constraints: {0}")]
    MalformedConstraint(String),
    #[error("transition matrix is not invertible over the Laurent ring")]
    NotABundle,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("expected a polynomial, found a proper rational function")]
    NotPolynomial,
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}
