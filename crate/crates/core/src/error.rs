//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimension {0} is not a power of two (>= 2)")]
    DimNotPowerOfTwo(usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("site index {index} out of range 1..={total}")]
    SiteOutOfRange { index: usize, total: usize },

    #[error("site index must be >= 1")]
    ZeroSiteIndex,

    #[error("kron_chain requires at least one factor")]
    EmptyKron,

    #[error("matrix is not Hermitian: max |A - A^dag| = {0:.3e}")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite: eigenvalue {0:.3e}")]
    NotPositiveSemidefinite(f64),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("time {t} is outside the coverage of profile \"{name}\"")]
    ProfileCoverage { name: String, t: f64 },

    #[error("invalid initial state: {0}")]
    InvalidState(String),

    #[error("rk4 step {h} exceeds the stability bound {bound:.6e}")]
    StepSizeViolation { h: f64, bound: f64 },

    #[error("steady state is not unique: null space dimension {0}")]
    DegenerateSteadyState(usize),

    #[error("two-qubit subspace leakage {0:.3e} exceeds threshold {1:.1e}")]
    SubspaceLeakage(f64, f64),

    #[error("linear algebra backend: {0}")]
    Lapack(String),

    #[error("{0}")]
    Numerical(String),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Lapack(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
