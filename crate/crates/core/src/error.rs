use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series windows differ: {0:?} vs {1:?}")]
    WindowMismatch((usize, usize), (usize, usize)),

    #[error("series constant term is not invertible")]
    SingularSeries,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index ({m}, {n}) outside window ({max_u}, {max_v})")]
    OutOfRange {
        m: usize,
        n: usize,
        max_u: usize,
        max_v: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular evaluation: {0}")]
    SingularEvaluation(String),

    #[error("contour extraction did not converge: imaginary residue {residue:e} exceeds {tol:e}")]
    OracleFailure { residue: f64, tol: f64 },

    #[error("tail not controllable: achieved bound {achieved:e}, requested {requested:e}")]
    Precision { achieved: f64, requested: f64 },

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("profile: {0}")]
    Profile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
