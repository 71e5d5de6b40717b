use thiserror::Error;

use crate::minimizer::OptimizationResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request exceeds what the implementation supports (e.g. Fock order above the cutoff).
    #[error("capability error: {0}")]
    Capability(String),

    /// The grid does not hold enough of the probability mass.
    #[error("grid truncates {deficit:.3e} of the probability mass (limit {limit:.1e})")]
    Truncation { deficit: f64, limit: f64 },

    /// A density failed its normalization or positivity contract.
    #[error("invalid density: {0}")]
    InvalidDensity(String),

    /// Quadrature results violated an invariant they must satisfy.
    #[error("numerical consistency error: {0}")]
    NumericalConsistency(String),

    /// The objective became non-finite during a simplex search.
    #[error("search error: objective was non-finite; best value so far {best_value}")]
    Search {
        best_point: Vec<f64>,
        best_value: f64,
    },

    #[error("no restart converged; best entropy {:.9}", .best.entropy)]
    NonConvergence { best: Box<OptimizationResult> },

    /// A measured entropy fell below one of its lower bounds.
    #[error("bound violation: {name} = {bound:.9} exceeds collective entropy {collective:.9}")]
    BoundViolation {
        name: &'static str,
        bound: f64,
        collective: f64,
    },
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
