use thiserror::Error;

use crate::rng::StreamKey;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter {name} = {value} outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("energy E = {e} is outside the bulk (|E| < 2J with J = {j})")]
    OutOfBulk { e: f64, j: f64 },

    #[error("spectral parameter coincides with an eigenvalue (lambda = {eigenvalue})")]
    PoleCollision { eigenvalue: f64 },

    #[error("branch ambiguity: {0}")]
    BranchAmbiguity(String),

    #[error("{what} did not converge{}", .key.map(|k| format!(" (stream {}:{})", k.seed, k.index)).unwrap_or_default())]
    NoConvergence {
        what: &'static str,
        key: Option<StreamKey>,
    },

    #[error("estimation failed: {0}")]
    EstimationFailure(String),

    #[error("not implemented: {0}")]
    NotImplemented(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require(ok: bool, name: &'static str, value: f64, expected: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected,
        })
    }
}
