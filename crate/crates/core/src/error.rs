use thiserror::Error;

/// Errors surfaced by validation and I/O. Numerical routines themselves are
/// total functions; anything that would panic is caught at type construction.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("not Hermitian: max |A[i][j] - conj(A[j][i])| = {deviation:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("trace {trace:.15} deviates from 1 beyond {tolerance:.1e}")]
    TraceNotOne { trace: f64, tolerance: f64 },

    #[error("not positive semidefinite: eigenvalue {eigenvalue:.3e} below -{tolerance:.1e}")]
    NotPositive { eigenvalue: f64, tolerance: f64 },

    #[error("not unitary: ||U^dag U - I||_F = {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("rank-deficient input: {0}")]
    RankDeficient(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
