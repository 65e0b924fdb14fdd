//! Agents, income utility and the utility of each way of using the service.
//!
//! An agent is a point `(y, theta)` of the unit square. Staying out yields
//! `v(y) + t`; queueing for free at waiting cost `c` yields
//! `v(y) + theta + t - c`; the fast-track line at waiting cost `c2` and price
//! `p` yields `v(y - p) + theta + t - c2`.

mod distribution;
mod value;

pub use distribution::{BetaShape, JointDistribution};
pub(crate) use value::theta_star_unchecked;
pub use value::{theta_star, ValueFunction, SHAPE_GRID_POINTS};

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Agent {
    pub y: f64,
    pub theta: f64,
}

impl Agent {
    pub fn new(y: f64, theta: f64) -> Result<Self> {
        check_unit("income", y)?;
        check_unit("valuation", theta)?;
        Ok(Agent { y, theta })
    }
}

/// Additive time endowment shared by every utility expression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityParams {
    t: f64,
}

impl Default for UtilityParams {
    fn default() -> Self {
        UtilityParams { t: 1.0 }
    }
}

impl UtilityParams {
    /// Endowment other than one unit of time. Only useful for checking that
    /// no comparison depends on it.
    pub fn with_endowment(t: f64) -> Result<Self> {
        if t.is_finite() {
            Ok(UtilityParams { t })
        } else {
            Err(Error::InvalidParameter(format!(
                "time endowment {t} is not finite"
            )))
        }
    }

    pub fn endowment(&self) -> f64 {
        self.t
    }
}

/// `U_0 = v(y) + t`.
pub fn utility_outside(v: &ValueFunction, y: f64, params: &UtilityParams) -> Result<f64> {
    Ok(v.value(y)? + params.t)
}

/// `U_Q = v(y) + theta + t - c`.
pub fn utility_free_queue(v: &ValueFunction, agent: &Agent, params: &UtilityParams, c: f64) -> Result<f64> {
    check_unit("waiting cost", c)?;
    check_unit("valuation", agent.theta)?;
    Ok(v.value(agent.y)? + agent.theta + params.t - c)
}

/// `U_Q2 = v(y - p) + theta + t - c2`.
pub fn utility_paid_queue(
    v: &ValueFunction,
    agent: &Agent,
    params: &UtilityParams,
    c2: f64,
    p: f64,
) -> Result<f64> {
    check_unit("waiting cost", c2)?;
    check_unit("valuation", agent.theta)?;
    check_unit("income", agent.y)?;
    check_unit("price", p)?;
    if p > agent.y {
        return Err(Error::Affordability {
            income: agent.y,
            price: p,
        });
    }
    Ok(v.eval(agent.y - p) + agent.theta + params.t - c2)
}
