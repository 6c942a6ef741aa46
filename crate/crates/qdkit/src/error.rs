//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("root finder did not converge for degree {degree} (worst residual {worst:.3e})")]
    NoConvergence { degree: usize, worst: f64 },
    #[error("degree {degree} exceeds slot {slot}")]
    InvalidSlot { degree: usize, slot: usize },
    #[error("r* o r is the identity: the fixed-point set is a continuum")]
    Continuum,
    #[error("nonhyperbolic fixed point at {0}")]
    Nonhyperbolic(String),
    #[error("singular evaluation: {0}")]
    Singular(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("not in catalog: {0}")]
    NotInCatalog(String),
}

pub type Result<T> = std::result::Result<T, Error>;
