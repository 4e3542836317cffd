use thiserror::Error;

#[derive(Debug, Error)]
pub enum HedgehogError {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// The profile Newton solve did not reach the requested residual.
    #[error("profile solver failed at t = {t}: residual {residual:e} after {iterations} iterations ({reason})")]
    Solver {
        t: f64,
        residual: f64,
        iterations: usize,
        reason: String,
        /// Last Newton iterate (nodal h values including the Dirichlet ends).
        last_iterate: Vec<f64>,
    },

    #[error("eigenvalue computation failed: {0}")]
    Eigen(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HedgehogError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(HedgehogError::Domain(msg.into()))
}
