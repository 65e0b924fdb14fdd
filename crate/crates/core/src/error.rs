use thiserror::Error;

/// Errors raised by the model, solvers and verifiers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} lies outside [0, 1]")]
    Domain { name: &'static str, value: f64 },

    #[error("income {income} cannot cover the fast-track price {price}")]
    Affordability { income: f64, price: f64 },

    #[error("capacity rho = {0} must lie strictly inside (0, 1)")]
    Capacity(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate priority system: c2 = {c2} must be strictly below c1 = {c1}")]
    DegenerateSystem { c1: f64, c2: f64 },

    #[error("unsupported distribution: {0}")]
    UnsupportedDistribution(String),

    #[error(
        "capacity rho = {rho} is not attainable by varying {variable}: achievable mass range is [{min_mass}, {max_mass}]"
    )]
    Infeasible {
        variable: &'static str,
        rho: f64,
        min_mass: f64,
        max_mass: f64,
    },

    #[error(
        "quadrature did not converge: achieved error estimate {achieved:e} above tolerance {tolerance:e}"
    )]
    Quadrature { achieved: f64, tolerance: f64 },

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("empty population")]
    EmptyPopulation,
}

impl Error {
    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Infeasible { .. }
                | Error::Quadrature { .. }
                | Error::NonConvergence { .. }
                | Error::UnsupportedDistribution(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain { name, value })
    }
}
