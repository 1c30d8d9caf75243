use thiserror::Error;

/// Coarse classification used by front-ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed input, bad arguments, I/O.
    Input,
    /// Physically or mathematically invalid state or parameters.
    Domain,
    /// A numerical routine failed to converge or hit a singularity.
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("covariance matrix is not symmetric (|v[{i}][{j}] - v[{j}][{i}]| = {diff:e})")]
    NotSymmetric { i: usize, j: usize, diff: f64 },

    #[error("unphysical covariance: {0}")]
    Unphysical(String),

    #[error("covariance matrix is not in normal form: {0}")]
    NotNormalForm(String),

    #[error("singular covariance matrix (det = {0:e})")]
    SingularCovariance(f64),

    #[error("numerically ill-conditioned: {0}")]
    NumericallyIllConditioned(String),

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("scattering denominator vanishes at omega = {omega:e} rad/s")]
    DenominatorSingular { omega: f64 },

    #[error("system is unstable: {0}")]
    Unstable(String),

    #[error("integration failed: {0}")]
    IntegrationFailure(String),

    #[error("Cholesky factorisation failed: detected covariance is not positive definite")]
    CholeskyFailure,

    #[error("batch mismatch: {0}")]
    BatchMismatch(String),

    #[error("insufficient samples: need at least {need}, got {got}")]
    InsufficientSamples { need: usize, got: usize },

    #[error("insufficient calibration points: need at least {need}, got {got}")]
    InsufficientPoints { need: usize, got: usize },

    #[error("degenerate calibration design: all thermal noise terms are equal")]
    DegenerateDesign,

    #[error("empty histogram range: {0}")]
    EmptyRange(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported vacuum-noise convention {0:?} (expected \"half\")")]
    UnsupportedConvention(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            NotSymmetric { .. }
            | UnsupportedConvention(_)
            | Parse(_)
            | Io(_)
            | Json(_)
            | Csv(_)
            | InvalidParameter(_)
            | InsufficientSamples { .. }
            | InsufficientPoints { .. }
            | BatchMismatch(_)
            | EmptyRange(_) => ErrorClass::Input,
            Unphysical(_) | NotNormalForm(_) | DegenerateState(_) | Unstable(_) | DegenerateDesign => {
                ErrorClass::Domain
            }
            SingularCovariance(_)
            | NumericallyIllConditioned(_)
            | DenominatorSingular { .. }
            | IntegrationFailure(_)
            | CholeskyFailure => ErrorClass::Numeric,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
