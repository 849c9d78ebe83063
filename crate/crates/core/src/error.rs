use thiserror::Error;

/// Errors raised by constructors, validators and evaluators in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: String, got: String },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is {trace:.12} but must be 1")]
    TraceNotOne { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("non-finite entry in matrix")]
    NonFinite,

    #[error("state vector norm is {norm:.12} but must be 1")]
    NotNormalized { norm: f64 },

    #[error("quaternion norm is {norm:.12} but must be 1")]
    NonUnitQuaternion { norm: f64 },

    #[error("axes do not form an orthonormal triad (deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    #[error("triad determinant {det:.9} is not within 1e-6 of +1 or -1")]
    BadOrientation { det: f64 },

    #[error("setting orientations differ (mu_A = {mu_a}, mu_B = {mu_b}) but the evaluator requires the same orientation")]
    OrientationMismatch { mu_a: i8, mu_b: i8 },

    #[error(
        "setting orientations agree (mu = {mu}) but the evaluator requires opposite orientations"
    )]
    OrientationAgree { mu: i8 },

    #[error("measurement vector norm {norm:.12} exceeds 1")]
    VectorTooLong { norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("probability mass {total:.12} deviates from 1")]
    ProbabilityMass { total: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension { .. } => "dimension",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::TraceNotOne { .. } => "trace_not_one",
            Error::NotPositive { .. } => "not_positive",
            Error::NonFinite => "non_finite",
            Error::NotNormalized { .. } => "not_normalized",
            Error::NonUnitQuaternion { .. } => "non_unit_quaternion",
            Error::NotOrthonormal { .. } => "not_orthonormal",
            Error::BadOrientation { .. } => "bad_orientation",
            Error::OrientationMismatch { .. } => "orientation_mismatch",
            Error::OrientationAgree { .. } => "orientation_agree",
            Error::VectorTooLong { .. } => "vector_too_long",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::ProbabilityMass { .. } => "probability_mass",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
