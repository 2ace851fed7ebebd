use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the tomography library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Hilbert-space dimension {0} (must be at least 2)")]
    InvalidDimension(usize),

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("shape mismatch in {context}: {lhs:?} vs {rhs:?}")]
    ShapeMismatch {
        context: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },

    #[error("operator is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not unitary (max deviation from identity {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid ket pair: {0}")]
    InvalidKets(String),

    #[error("parameter {name} = {value} out of range {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("imaginary residue {residue:.3e} exceeds tolerance {tolerance:.1e} in {context}")]
    ImaginaryResidue {
        context: &'static str,
        residue: f64,
        tolerance: f64,
    },

    #[error("requested rank {rank} is invalid for a {rows}x{cols} matrix")]
    InvalidRank {
        rank: usize,
        rows: usize,
        cols: usize,
    },

    #[error("{what} is rank deficient: rank {rank}, need {required}")]
    RankDeficient {
        what: &'static str,
        rank: usize,
        required: usize,
    },

    #[error(
        "{what} is singular or ill-conditioned (condition number {condition:.3e} >= {limit:.1e})"
    )]
    IllConditioned {
        what: &'static str,
        condition: f64,
        limit: f64,
    },

    #[error("{what} must be square, got {rows}x{cols}")]
    NotSquare {
        what: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error(
        "eigenvector matrix is ill-conditioned (condition number {condition:.3e}); \
         matrix is near-defective at eigenvalue {eigenvalue}"
    )]
    NearDefective {
        condition: f64,
        eigenvalue: Complex64,
    },

    #[error("eigenvalue {eigenvalue} lies on the branch cut (closed negative real axis)")]
    BranchCut { eigenvalue: Complex64 },

    #[error("eigenvalue {eigenvalue} is too close to zero for a non-integer power")]
    ZeroEigenvalue { eigenvalue: Complex64 },

    #[error(
        "SPAM error superoperator cannot be split by gauge power: {source}. \
         The SPAM error is too large for gauge regularization"
    )]
    SpamTooLarge {
        #[source]
        source: Box<Error>,
    },

    #[error("probability {value} at ({row}, {col}) is outside [0, 1] beyond tolerance")]
    ProbabilityOutOfRange { row: usize, col: usize, value: f64 },

    #[error("frequency table has no shot counts")]
    MissingShots,

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("factorization check failed: residual {residual:.3e}")]
    FactorizationInvalid { residual: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
