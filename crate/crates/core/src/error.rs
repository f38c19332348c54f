use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("requested order {0} exceeds the supported maximum of 3")]
    OrderTooHigh(usize),
    #[error("forward map is not strictly monotone on side {side}")]
    NonMonotone { side: usize },
    #[error("root finder did not converge after {0} iterations")]
    RootNotConverged(usize),
    #[error("quadrature did not reach tolerance {tol:e} within {panels} panels (estimate {estimate:e})")]
    QuadratureNotConverged { tol: f64, panels: usize, estimate: f64 },
    #[error("point (t={t}, x={x}) is not in the required region: {expected}")]
    RegionViolation { t: f64, x: f64, expected: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// Validation-type failures (bad input) as opposed to numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::OrderTooHigh(_)
                | Error::RegionViolation { .. }
                | Error::Precondition(_)
                | Error::NonMonotone { .. }
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::OrderTooHigh(_) => "order_too_high",
            Error::NonMonotone { .. } => "non_monotone",
            Error::RootNotConverged(_) => "root_not_converged",
            Error::QuadratureNotConverged { .. } => "quadrature_not_converged",
            Error::RegionViolation { .. } => "region_violation",
            Error::Precondition(_) => "precondition",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
