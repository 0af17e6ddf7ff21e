//! Error type shared by every module of the crate.

use exact_algebra::{AlgebraError, Scalar};
use thiserror::Error;

use crate::stability::DestabilizerCertificate;

#[derive(Debug, Clone, Error)]
pub enum PhiError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("poles must be pairwise distinct")]
    DuplicatePoles,
    #[error("at most one pole may sit at infinity")]
    TooManyInfinitePoles,
    #[error("Fuchs relation violated: exponent total plus degree is {0}")]
    FuchsViolation(Scalar),
    #[error("exponent sum at pole {pole} is {found}, expected {expected}")]
    RowSumViolation { pole: usize, found: Scalar, expected: Scalar },
    #[error("pole index {0} out of range")]
    BadPoleIndex(usize),
    #[error("operation needs a finite pole but the pole sits at infinity")]
    WrongChart,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("apparent singularity at a pole with inadmissible fiber value {0}")]
    InadmissibleApparentSingularity(Scalar),
    #[error("the matrices do not define a regular phi-connection: {0}")]
    NotRegular(String),
    #[error("no parabolic structure satisfies the compatibility conditions at pole {0}")]
    InconsistentFlags(usize),
    #[error("parabolic structure at pole {0} is not determined by the residue data")]
    AmbiguousFlags(usize),
    #[error("invalid flag at pole {0}: {1}")]
    InvalidFlag(usize, String),
    #[error("the object is unstable")]
    Unstable(Option<Box<DestabilizerCertificate>>),
    #[error("stability violation: {0}")]
    StabilityViolation(String, Option<Box<DestabilizerCertificate>>),
    #[error("stability could not be decided by the candidate catalog")]
    Undecided,
    #[error("rank of F1 plus rank of F2 is zero")]
    InvalidSubobject,
    #[error("weight {0} outside the open interval (0, 1/2)")]
    InvalidWeight(Scalar),
    #[error("point is a base point; an exceptional coordinate is required")]
    NeedExceptionalCoord,
    #[error("selection does not have the required shape: {0}")]
    MalformedSelection(String),
    #[error("both cubics vanish at this pencil point")]
    DegeneratePencilPoint,
    #[error("the fiber cubic vanishes identically")]
    NonFiniteFiber,
    #[error("apparent singularity is not defined on the Higgs boundary")]
    NotDefined,
    #[error("internal error: {0}")]
    Internal(String),
}

impl PhiError {
    /// Short machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            PhiError::Algebra(e) => match e {
                AlgebraError::MalformedScalar(_) => "MalformedScalar",
                AlgebraError::DivisionByZero => "DivisionByZero",
                AlgebraError::DegenerateInterpolation => "DegenerateInterpolation",
                AlgebraError::MalformedConstraint(_) => "MalformedConstraint",
                AlgebraError::NotABundle => "NotABundle",
                AlgebraError::ZeroPolynomial => "ZeroPolynomial",
                AlgebraError::DimensionMismatch(_) => "DimensionMismatch",
                AlgebraError::Singular => "Singular",
                AlgebraError::NotPolynomial => "NotPolynomial",
                AlgebraError::Internal(_) => "InternalError",
            },
            PhiError::DuplicatePoles => "DuplicatePoles",
            PhiError::TooManyInfinitePoles => "TooManyInfinitePoles",
            PhiError::FuchsViolation(_) => "FuchsViolation",
            PhiError::RowSumViolation { .. } => "RowSumViolation",
            PhiError::BadPoleIndex(_) => "BadPoleIndex",
            PhiError::WrongChart => "WrongChart",
            PhiError::InvalidParameter(_) => "InvalidParameter",
            PhiError::InadmissibleApparentSingularity(_) => "InadmissibleApparentSingularity",
            PhiError::NotRegular(_) => "NotRegular",
            PhiError::InconsistentFlags(_) => "InconsistentFlags",
            PhiError::AmbiguousFlags(_) => "AmbiguousFlags",
            PhiError::InvalidFlag(..) => "InvalidFlag",
            PhiError::Unstable(_) => "Unstable",
            PhiError::StabilityViolation(..) => "StabilityViolation",
            PhiError::Undecided => "Undecided",
            PhiError::InvalidSubobject => "InvalidSubobject",
            PhiError::InvalidWeight(_) => "InvalidWeight",
            PhiError::NeedExceptionalCoord => "NeedExceptionalCoord",
            PhiError::MalformedSelection(_) => "MalformedSelection",
            PhiError::DegeneratePencilPoint => "DegeneratePencilPoint",
            PhiError::NonFiniteFiber => "NonFiniteFiber",
            PhiError::NotDefined => "NotDefined",
            PhiError::Internal(_) => "InternalError",
        }
    }
}

pub type Result<T> = std::result::Result<T, PhiError>;
