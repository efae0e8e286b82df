//! Error taxonomy shared by every module.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A caller-supplied argument violates a precondition.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// An integrand or sampler produced a non-finite value.
    #[error("evaluation error: {0}")]
    Evaluation(String),
    /// A requested computation exceeds the guarded size limits.
    #[error("resource error: {0}")]
    Resource(String),
    /// The LP solver stalled or could not certify its result.
    #[error("solver error: {0}")]
    Solver(String),
    /// Structurally degenerate input (rank deficiency, zero tail, coincident nodes).
    #[error("degenerate input: {0}")]
    Degenerate(String),
    /// A fit or estimate is ill-posed on the supplied data.
    #[error("analysis error: {0}")]
    Analysis(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
    pub fn evaluation(msg: impl Into<String>) -> Self {
        Error::Evaluation(msg.into())
    }
    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
    pub fn solver(msg: impl Into<String>) -> Self {
        Error::Solver(msg.into())
    }
    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
    pub fn analysis(msg: impl Into<String>) -> Self {
        Error::Analysis(msg.into())
    }
}
