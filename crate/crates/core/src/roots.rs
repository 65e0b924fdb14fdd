//! Bracketing bisection for monotone scalar equations.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    /// Width of the bracket below which the search may stop.
    pub x_tol: f64,
    /// Required `|f(x) - target|` at the returned point.
    pub residual_tol: f64,
    pub max_iter: usize,
}

impl Default for Bisection {
    fn default() -> Self {
        Bisection {
            x_tol: 1e-9,
            residual_tol: 1e-8,
            max_iter: 200,
        }
    }
}

impl Bisection {
    /// Bisection run to machine precision, used where the root itself feeds
    /// exact indifference comparisons.
    pub fn exhaustive() -> Self {
        Bisection {
            x_tol: 0.0,
            residual_tol: f64::INFINITY,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Solves `f(x) = target` on `[lo, hi]` for a nonincreasing `f`.
///
/// The caller is responsible for the bracket `f(lo) >= target >= f(hi)`.
pub fn solve_nonincreasing<F>(mut f: F, lo: f64, hi: f64, target: f64, opts: Bisection) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut best: Option<Root> = None;
    for iteration in 1..=opts.max_iter {
        let mid = 0.5 * (lo + hi);
        let value = f(mid)?;
        let residual = (value - target).abs();
        let root = Root {
            x: mid,
            residual,
            iterations: iteration,
        };
        if best.is_none_or(|b| residual <= b.residual) {
            best = Some(root);
        }
        if hi - lo <= opts.x_tol && residual <= opts.residual_tol {
            return Ok(root);
        }
        if value > target {
            lo = mid;
        } else if value < target {
            hi = mid;
        } else {
            return Ok(root);
        }
        let next = 0.5 * (lo + hi);
        if next <= lo || next >= hi {
            // Bracket exhausted at floating-point resolution.
            let b = best.expect("at least one evaluation");
            if b.residual <= opts.residual_tol {
                return Ok(Root {
                    iterations: iteration,
                    ..b
                });
            }
            return Err(Error::NonConvergence {
                iterations: iteration,
                residual: b.residual,
            });
        }
    }
    let b = best.expect("max_iter >= 1");
    if b.residual <= opts.residual_tol {
        Ok(b)
    } else {
        Err(Error::NonConvergence {
            iterations: opts.max_iter,
            residual: b.residual,
        })
    }
}
