use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};

/// Income utility `v` on `[0, 1]`: strictly increasing, strictly concave and
/// finite at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ValueFunction {
    /// `v(y) = sqrt(y)`
    Sqrt,
    /// `v(y) = ln(1 + y)`
    ShiftedLog,
    /// `v(y) = y^(1-gamma) / (1-gamma)` with `gamma` in `(0, 1)`.
    Crra { gamma: f64 },
}

/// Grid used for the numerical shape checks.
pub const SHAPE_GRID_POINTS: usize = 1001;

impl ValueFunction {
    pub fn crra(gamma: f64) -> Result<Self> {
        let v = ValueFunction::Crra { gamma };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ValueFunction::Crra { gamma } if !(gamma > 0.0 && gamma < 1.0) => Err(Error::InvalidParameter(
                format!("CRRA gamma = {gamma} must lie in (0, 1)"),
            )),
            _ => Ok(()),
        }
    }

    /// Evaluates `v(y)` without range checks.
    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        match *self {
            ValueFunction::Sqrt => y.sqrt(),
            ValueFunction::ShiftedLog => y.ln_1p(),
            ValueFunction::Crra { gamma } => y.powf(1.0 - gamma) / (1.0 - gamma),
        }
    }

    pub fn value(&self, y: f64) -> Result<f64> {
        Ok(self.eval(check_unit("income", y)?))
    }

    pub fn name(&self) -> String {
        match *self {
            ValueFunction::Sqrt => "sqrt".to_string(),
            ValueFunction::ShiftedLog => "shifted-log".to_string(),
            ValueFunction::Crra { gamma } => format!("crra({gamma})"),
        }
    }

    /// Checks strict monotonicity and strict midpoint concavity on the
    /// 1001-point grid, returning the first offending income.
    pub fn check_shape(&self) -> std::result::Result<(), f64> {
        let n = SHAPE_GRID_POINTS - 1;
        let ys: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        for w in ys.windows(2) {
            if self.eval(w[1]) <= self.eval(w[0]) {
                return Err(w[1]);
            }
        }
        for w in ys.windows(3) {
            let chord = 0.5 * (self.eval(w[0]) + self.eval(w[2]));
            if self.eval(w[1]) <= chord {
                return Err(w[1]);
            }
        }
        Ok(())
    }
}

/// Income cost `theta*(y, p) = v(y) - v(y - p)` of paying `p` at income `y`.
pub fn theta_star(v: &ValueFunction, y: f64, p: f64) -> Result<f64> {
    check_unit("income", y)?;
    check_unit("price", p)?;
    if p > y {
        return Err(Error::Affordability { income: y, price: p });
    }
    Ok(theta_star_unchecked(v, y, p))
}

#[inline]
pub(crate) fn theta_star_unchecked(v: &ValueFunction, y: f64, p: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        v.eval(y) - v.eval(y - p)
    }
}
