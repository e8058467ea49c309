use std::path::PathBuf;

/// Errors raised while building scenarios or evaluating distributions.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("ill-conditioned matrix: condition number {condition:e} exceeds {limit:e}")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error(
        "Gaussian approximation is degenerate: normalized fluctuation {value:e} below {tolerance:e}"
    )]
    DegenerateFluctuation { value: f64, tolerance: f64 },

    #[error("too few samples: got {got}, need at least {min}")]
    TooFewSamples { got: usize, min: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
