use thiserror::Error;

/// Errors raised by the calculators and the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature did not meet its tolerance within the evaluation budget.
    #[error("quadrature did not converge: estimated error {error:.3e} > tolerance {tolerance:.3e} after {evals} evaluations")]
    Quadrature {
        error: f64,
        tolerance: f64,
        evals: usize,
    },

    /// An inner alpha-mutual-information integral failed, which signals an
    /// information density whose moment generating function is not finite at this order.
    #[error("alpha-mutual information diverges at alpha = {alpha}: {reason}")]
    Divergence { alpha: f64, reason: String },

    /// A requested enumeration exceeds the configured size cap.
    #[error("size cap exceeded: {0}")]
    Size(String),

    /// A point was queried outside the support of the distribution.
    #[error("support violation: {0}")]
    Support(String),

    /// The requested rate does not exceed the mutual information.
    #[error("rate {rate} nats does not exceed I(X;Y) = {mutual_information} nats")]
    Rate { rate: f64, mutual_information: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of a numerical routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Quadrature { .. } | Error::Divergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
