use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dimension overflow: {rows} x {cols} entries do not fit in memory")]
    DimensionOverflow { rows: usize, cols: usize },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("{0} did not converge")]
    NonConvergence(&'static str),

    #[error("not Hermitian: max |m - m^dagger| = {violation:e}")]
    NotHermitian { violation: f64 },

    #[error("not positive semidefinite: minimum eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("bad trace: trace = {trace}, expected 1")]
    BadTrace { trace: f64 },

    #[error("state is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },

    #[error("parameter `{name}` = {value} outside [0, 1]")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("basis columns are not orthonormal: max |B^dagger B - I| = {violation:e}")]
    NotOrthonormal { violation: f64 },

    #[error("operation has no Kraus operators")]
    EmptyOperation,

    #[error("N = sum F^dagger F has eigenvalue {max_eigenvalue} above 1")]
    NotSubNormalized { max_eigenvalue: f64 },

    #[error("operation is not trace preserving: max |N - I| = {violation:e}")]
    NotTracePreserving { violation: f64 },

    #[error("initial state of A is coherent: l1 coherence {coherence:e} (max off-diagonal {max_off_diagonal:e})")]
    PremiseViolated {
        coherence: f64,
        max_off_diagonal: f64,
    },

    #[error("outcome probability {probability:e} is zero; no conditional state exists")]
    ZeroProbability { probability: f64 },

    #[error("factorization law needs a 2x2 system, got {dim_a}x{dim_b}")]
    WrongDimension { dim_a: usize, dim_b: usize },

    #[error("no coherence-creating projector found in {attempts} attempts (best coherence {best:e})")]
    SearchExhausted { attempts: usize, best: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
