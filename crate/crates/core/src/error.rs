use thiserror::Error;

/// Errors raised by evaluators, quadrature and samplers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument {arg} outside the series trust radius {radius}")]
    OutOfTrustRadius { arg: f64, radius: f64 },

    #[error("exponent s = {s} outside the Mellin strip ({lo}, {hi})")]
    StripViolation { s: f64, lo: f64, hi: f64 },

    #[error("quadrature did not converge (estimate {estimate:e}, error {error:e})")]
    NonConvergence { estimate: f64, error: f64 },

    #[error("no completely monotone function for (alpha, beta) = ({alpha}, {beta})")]
    Region { alpha: f64, beta: f64 },

    #[error("series cancellation: value {value:e} has error bound {bound:e}")]
    PrecisionLoss { value: f64, bound: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("{0} has no pointwise density")]
    NotEvaluable(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
