//! Market clearing for the single queue and for the priority system.
//!
//! The single queue clears when `P(theta >= c) = rho`. In the priority
//! system an agent is served iff `theta >= min(c1, g(y))` where
//! `g(y) = theta*(y, p) + c2` is the paid-line boundary (infinite below
//! `y = p`). Served mass is nonincreasing in each of `c1`, `c2` and `p`, so
//! every one-dimensional slice of the clearing family is solved by bisection.

mod boundary;

pub use boundary::{income_threshold, FastTrackBoundary, PaidBoundary, PowerLawBoundary, Threshold};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_unit, Error, Result};
use crate::model::{JointDistribution, ValueFunction};
use crate::roots::{solve_nonincreasing, Bisection, Root};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingleQueueEquilibrium {
    pub c: f64,
    pub rho: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Transfer vector `(c1, c2, p)` of the priority regime, with `c2 < c1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrioritySystem {
    c1: f64,
    c2: f64,
    p: f64,
}

impl PrioritySystem {
    pub fn new(c1: f64, c2: f64, p: f64) -> Result<Self> {
        check_unit("c1", c1)?;
        check_unit("c2", c2)?;
        check_unit("price", p)?;
        if c2 >= c1 {
            return Err(Error::DegenerateSystem { c1, c2 });
        }
        Ok(PrioritySystem { c1, c2, p })
    }

    /// The single queue written as a priority system: `c1 = c2 = c`, `p = 0`.
    /// Such a system offers one line only.
    pub fn collapsed(c: f64) -> Result<Self> {
        check_unit("waiting cost", c)?;
        Ok(PrioritySystem { c1: c, c2: c, p: 0.0 })
    }

    /// `c1 = 1`, `c2 = 0`: access is sold for money only.
    pub fn pure_price(p: f64) -> Result<Self> {
        PrioritySystem::new(1.0, 0.0, p)
    }

    // Unchecked triple used while bracketing; may have c1 == c2.
    fn raw(c1: f64, c2: f64, p: f64) -> Self {
        PrioritySystem { c1, c2, p }
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn is_collapsed(&self) -> bool {
        self.c1 == self.c2
    }

    pub fn boundary(&self, v: &ValueFunction) -> FastTrackBoundary {
        FastTrackBoundary {
            v: *v,
            c2: self.c2,
            p: self.p,
        }
    }
}

/// Income thresholds `y_lower` (paid vs free line) and `y_upper` (priority
/// regime vs single queue).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub y_lower: Threshold,
    pub y_upper: Threshold,
}

impl Thresholds {
    pub fn compute(v: &ValueFunction, system: &PrioritySystem, c: f64) -> Result<Self> {
        Ok(Thresholds {
            y_lower: y_lower_threshold(v, system),
            y_upper: y_upper_threshold(v, system, c)?,
        })
    }

    /// Thresholds of an arbitrary paid boundary against the two vertical lines.
    pub fn for_boundary(boundary: &dyn PaidBoundary, c1: f64, c: f64) -> Self {
        Thresholds {
            y_lower: income_threshold(boundary, c1),
            y_upper: income_threshold(boundary, c),
        }
    }
}

/// Served mass split by line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClearingMass {
    pub paid: f64,
    pub free: f64,
}

impl ClearingMass {
    pub fn total(&self) -> f64 {
        self.paid + self.free
    }
}

/// `M(c) = P(theta >= c)`.
pub fn tail_mass(dist: &JointDistribution, c: f64) -> Result<f64> {
    check_unit("waiting cost", c)?;
    Ok(dist.valuation_tail(c))
}

fn check_capacity(rho: f64) -> Result<()> {
    if rho > 0.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::Capacity(rho))
    }
}

/// Waiting cost `c` with `P(theta >= c) = rho`.
pub fn solve_single_queue(
    dist: &JointDistribution,
    rho: f64,
    opts: &Bisection,
) -> Result<SingleQueueEquilibrium> {
    check_capacity(rho)?;
    dist.validate()?;
    let root = solve_nonincreasing(|c| tail_mass(dist, c), 0.0, 1.0, rho, *opts).map_err(|e| match e {
        Error::NonConvergence { residual, .. } => Error::UnsupportedDistribution(format!(
            "tail mass jumps across rho = {rho} (closest residual {residual:e})"
        )),
        other => other,
    })?;
    Ok(SingleQueueEquilibrium {
        c: root.x,
        rho,
        residual: root.residual,
        iterations: root.iterations,
    })
}

/// Paid-line boundary `theta*(y, p) + c2` clipped to `[0, 1]`.
pub fn priority_boundary(v: &ValueFunction, system: &PrioritySystem, y: f64) -> Result<f64> {
    check_unit("income", y)?;
    if y < system.p {
        return Err(Error::Affordability {
            income: y,
            price: system.p,
        });
    }
    Ok(system.boundary(v).clipped(y))
}

/// Income `y_lower` solving `theta*(y, p) = c1 - c2`.
pub fn y_lower_threshold(v: &ValueFunction, system: &PrioritySystem) -> Threshold {
    income_threshold(&system.boundary(v), system.c1)
}

/// Income `y_upper` solving `theta*(y, p) = c - c2`, for single-queue cost `c >= c2`.
pub fn y_upper_threshold(v: &ValueFunction, system: &PrioritySystem, c: f64) -> Result<Threshold> {
    check_unit("single-queue cost", c)?;
    if c < system.c2 {
        return Err(Error::InvalidParameter(format!(
            "single-queue cost c = {c} lies below the fast-track cost c2 = {}",
            system.c2
        )));
    }
    Ok(income_threshold(&system.boundary(v), c))
}

/// Mass served when the free line costs `c1` and the paid line is entered
/// above `boundary`.
pub fn served_mass(dist: &JointDistribution, boundary: &dyn PaidBoundary, c1: f64) -> Result<ClearingMass> {
    check_unit("c1", c1)?;
    let y_lower = income_threshold(boundary, c1).income();
    let free = dist.rectangle_mass(0.0, y_lower, c1, 1.0)?;
    let paid = if y_lower >= 1.0 {
        0.0
    } else if let Some(level) = boundary.constant_level() {
        if level > 1.0 {
            0.0
        } else {
            dist.rectangle_mass(y_lower, 1.0, level.max(0.0), 1.0)?
        }
    } else {
        match boundary::valuation_range_start(boundary) {
            None => 0.0,
            Some(start) => {
                let start = start.max(y_lower);
                dist.mass_above_boundary(start, 1.0, |y| boundary.theta_at(y))?
            }
        }
    };
    Ok(ClearingMass { paid, free })
}

/// Served mass of the priority system, split into paid and free lines.
pub fn clearing_split(
    dist: &JointDistribution,
    v: &ValueFunction,
    system: &PrioritySystem,
) -> Result<ClearingMass> {
    served_mass(dist, &system.boundary(v), system.c1)
}

/// Total served mass of the priority system.
pub fn priority_clearing_mass(
    dist: &JointDistribution,
    v: &ValueFunction,
    system: &PrioritySystem,
) -> Result<f64> {
    Ok(clearing_split(dist, v, system)?.total())
}

/// Which coordinate of `(c1, c2, p)` to solve for, with the other two fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "solve", rename_all = "kebab-case")]
pub enum Unknown {
    C1 { c2: f64, p: f64 },
    C2 { c1: f64, p: f64 },
    Price { c1: f64, c2: f64 },
}

impl Unknown {
    pub fn name(&self) -> &'static str {
        match self {
            Unknown::C1 { .. } => "c1",
            Unknown::C2 { .. } => "c2",
            Unknown::Price { .. } => "p",
        }
    }

    fn bracket(&self) -> (f64, f64) {
        match *self {
            Unknown::C1 { c2, .. } => (c2, 1.0),
            Unknown::C2 { c1, .. } => (0.0, c1),
            Unknown::Price { .. } => (0.0, 1.0),
        }
    }

    fn system_at(&self, x: f64) -> PrioritySystem {
        match *self {
            Unknown::C1 { c2, p } => PrioritySystem::raw(x, c2, p),
            Unknown::C2 { c1, p } => PrioritySystem::raw(c1, x, p),
            Unknown::Price { c1, c2 } => PrioritySystem::raw(c1, c2, x),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Unknown::C1 { c2, p } => {
                check_unit("c2", c2)?;
                check_unit("price", p)?;
                if c2 >= 1.0 {
                    return Err(Error::DegenerateSystem { c1: 1.0, c2 });
                }
            }
            Unknown::C2 { c1, p } => {
                check_unit("c1", c1)?;
                check_unit("price", p)?;
                if c1 <= 0.0 {
                    return Err(Error::DegenerateSystem { c1, c2: 0.0 });
                }
            }
            Unknown::Price { c1, c2 } => {
                PrioritySystem::new(c1, c2, 0.0)?;
            }
        }
        Ok(())
    }
}

/// A solved member of the clearing family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriorityEquilibrium {
    pub system: PrioritySystem,
    pub rho: f64,
    pub residual: f64,
    pub iterations: usize,
    pub mass: ClearingMass,
    pub y_lower: Threshold,
}

/// Solves for the free coordinate so that the priority system serves `rho`.
pub fn solve_priority(
    dist: &JointDistribution,
    v: &ValueFunction,
    rho: f64,
    unknown: Unknown,
    opts: &Bisection,
) -> Result<PriorityEquilibrium> {
    check_capacity(rho)?;
    dist.validate()?;
    v.validate()?;
    unknown.validate()?;

    let mass_at = |x: f64| priority_clearing_mass(dist, v, &unknown.system_at(x));
    let (lo, hi) = unknown.bracket();
    let (max_mass, min_mass) = (mass_at(lo)?, mass_at(hi)?);
    if !(max_mass >= rho && rho >= min_mass) {
        return Err(Error::Infeasible {
            variable: unknown.name(),
            rho,
            min_mass,
            max_mass,
        });
    }
    let Root {
        x,
        residual,
        iterations,
    } = solve_nonincreasing(mass_at, lo, hi, rho, *opts)?;
    let candidate = unknown.system_at(x);
    let system = PrioritySystem::new(candidate.c1, candidate.c2, candidate.p)?;
    let mass = clearing_split(dist, v, &system)?;
    Ok(PriorityEquilibrium {
        system,
        rho,
        residual,
        iterations,
        mass,
        y_lower: y_lower_threshold(v, &system),
    })
}

/// One grid point of [`manifold_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub c2: f64,
    pub p: f64,
    pub outcome: Result<PriorityEquilibrium>,
}

/// Solves `c1` at every `(c2, p)` grid point. Infeasible points are kept with
/// their error. Points are evaluated in parallel and returned in grid order.
pub fn manifold_sweep(
    dist: &JointDistribution,
    v: &ValueFunction,
    rho: f64,
    grid: &[(f64, f64)],
    opts: &Bisection,
) -> Result<Vec<SweepPoint>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("sweep grid is empty".into()));
    }
    Ok(grid
        .par_iter()
        .map(|&(c2, p)| SweepPoint {
            c2,
            p,
            outcome: solve_priority(dist, v, rho, Unknown::C1 { c2, p }, opts),
        })
        .collect())
}

/// Population mass of the three income bands `[0, y_lower)`,
/// `[y_lower, y_upper)` and `[y_upper, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IncomeBands {
    pub low: f64,
    pub middle: f64,
    pub high: f64,
}

pub fn income_band_masses(dist: &JointDistribution, thresholds: &Thresholds) -> IncomeBands {
    let f = dist.income_marginal();
    let yl = thresholds.y_lower.income();
    let yu = thresholds.y_upper.income().max(yl);
    IncomeBands {
        low: f.cdf(yl),
        middle: f.cdf(yu) - f.cdf(yl),
        high: 1.0 - f.cdf(yu),
    }
}
