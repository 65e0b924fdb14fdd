//! The paid-line participation boundary and the income thresholds it cuts.

use serde::Serialize;

use crate::model::{theta_star_unchecked, ValueFunction};
use crate::roots::{solve_nonincreasing, Bisection};

/// A nonincreasing curve `theta = g(y)`: agents of income `y` with valuation
/// at least `g(y)` weakly prefer the paid line to staying out.
pub trait PaidBoundary: Sync {
    /// Lowest income that can use the paid line.
    fn min_income(&self) -> f64;

    /// Unclipped boundary value, for `y >= min_income()`.
    fn theta_at(&self, y: f64) -> f64;

    /// `Some(level)` when the boundary is flat.
    fn constant_level(&self) -> Option<f64> {
        None
    }

    /// Boundary clipped to the valuation range, infinite below the minimum income.
    fn clipped(&self, y: f64) -> f64 {
        if y < self.min_income() {
            f64::INFINITY
        } else {
            self.theta_at(y).clamp(0.0, 1.0)
        }
    }
}

/// `g(y) = theta*(y, p) + c2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastTrackBoundary {
    pub v: ValueFunction,
    pub c2: f64,
    pub p: f64,
}

impl PaidBoundary for FastTrackBoundary {
    fn min_income(&self) -> f64 {
        self.p
    }

    fn theta_at(&self, y: f64) -> f64 {
        theta_star_unchecked(&self.v, y, self.p) + self.c2
    }

    fn constant_level(&self) -> Option<f64> {
        (self.p == 0.0).then_some(self.c2)
    }
}

/// The curve `y = scale / theta^2`, i.e. `g(y) = sqrt(scale / y)`, defined for
/// incomes from `scale` (where it reaches `theta = 1`) upwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawBoundary {
    pub scale: f64,
}

impl PaidBoundary for PowerLawBoundary {
    fn min_income(&self) -> f64 {
        self.scale
    }

    fn theta_at(&self, y: f64) -> f64 {
        (self.scale / y).sqrt()
    }
}

/// Income at which a paid boundary crosses a valuation level.
///
/// Incomes at or above the threshold satisfy `g(y) <= level`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "income", rename_all = "kebab-case")]
pub enum Threshold {
    /// Root of `g(y) = level` inside the affordable income range.
    Interior(f64),
    /// `g` is already at or below the level at the lowest affordable income,
    /// which is carried as the effective threshold.
    BelowRange(f64),
    /// `g` stays above the level at every income up to one.
    AboveRange,
}

impl Threshold {
    /// Threshold income used to split the population.
    pub fn income(&self) -> f64 {
        match *self {
            Threshold::Interior(y) | Threshold::BelowRange(y) => y,
            Threshold::AboveRange => 1.0,
        }
    }

    pub fn is_interior(&self) -> bool {
        matches!(self, Threshold::Interior(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Threshold::Interior(_) => "interior",
            Threshold::BelowRange(_) => "below-range",
            Threshold::AboveRange => "above-range",
        }
    }
}

/// Solves `g(y) = level` on `[min_income, 1]` to machine precision.
pub fn income_threshold(boundary: &dyn PaidBoundary, level: f64) -> Threshold {
    let lo = boundary.min_income();
    if boundary.theta_at(lo) <= level {
        return Threshold::BelowRange(lo);
    }
    if boundary.theta_at(1.0) > level {
        return Threshold::AboveRange;
    }
    let root = solve_nonincreasing(
        |y| Ok(boundary.theta_at(y)),
        lo,
        1.0,
        level,
        Bisection::exhaustive(),
    )
    .expect("exhaustive bisection always returns");
    Threshold::Interior(root.x)
}

/// Lowest income at which the unclipped boundary is at or below one, if any.
pub(crate) fn valuation_range_start(boundary: &dyn PaidBoundary) -> Option<f64> {
    match income_threshold(boundary, 1.0) {
        Threshold::AboveRange => None,
        t => Some(t.income()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_fixture_thresholds() {
        let b = PowerLawBoundary { scale: 0.35 };
        let lower = income_threshold(&b, 0.8);
        let upper = income_threshold(&b, 0.65);
        assert!((lower.income() - 0.546_875).abs() < 1e-15);
        assert!((upper.income() - 0.35 / (0.65 * 0.65)).abs() < 1e-15);
        assert!((upper.income() - 0.8284).abs() < 1e-3);
    }

    #[test]
    fn flags_outside_range() {
        let b = FastTrackBoundary {
            v: ValueFunction::Sqrt,
            c2: 0.1,
            p: 0.0,
        };
        assert_eq!(income_threshold(&b, 0.8), Threshold::BelowRange(0.0));
        let b = FastTrackBoundary {
            v: ValueFunction::Sqrt,
            c2: 0.5,
            p: 0.5,
        };
        // g(1) = 1 - sqrt(0.5) + 0.5 > 0.7
        assert_eq!(income_threshold(&b, 0.7), Threshold::AboveRange);
        assert_eq!(Threshold::AboveRange.income(), 1.0);
    }

    #[test]
    fn clipping() {
        let b = PowerLawBoundary { scale: 0.35 };
        assert_eq!(b.clipped(0.2), f64::INFINITY);
        assert_eq!(b.clipped(0.35), 1.0);
        assert_eq!(valuation_range_start(&b), Some(0.35));
    }
}
