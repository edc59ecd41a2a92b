use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not hermitian: symmetry residual {residual:e} exceeds {tolerance:e}")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("trace power has imaginary residue {0:e}")]
    ImaginaryTrace(f64),

    #[error("eigenvalue iteration failed to converge at index {index}")]
    NoConvergence { index: usize },

    #[error("power {k} exceeds the configured cap {cap}")]
    PowerCap { k: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("outside hypothesis: {0}")]
    Hypothesis(String),

    #[error("trial {trial}: {source}")]
    Trial {
        trial: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn in_trial(self, trial: u64) -> Self {
        Error::Trial {
            trial,
            source: Box::new(self),
        }
    }
}
