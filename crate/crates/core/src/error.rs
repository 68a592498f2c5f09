use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not bistochastic: {0}")]
    NotBistochastic(String),

    #[error("b-vector is outside the Birkhoff polytope: {0}")]
    InvalidBVector(String),

    #[error("matrix is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("matrix is not unistochastic (Q = {q_value:e})")]
    NotUnistochastic { q_value: f64 },

    #[error("argument `{name}` out of domain: {reason}")]
    Domain { name: &'static str, reason: String },

    #[error("quadrature did not converge (achieved error {achieved:e}, requested {requested:e})")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("invalid matrix JSON: {0}")]
    Json(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            reason: reason.into(),
        }
    }
}
