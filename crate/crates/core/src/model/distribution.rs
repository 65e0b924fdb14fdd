//! Population laws on the unit square.

use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::beta::{beta_reg, ln_beta};
use statrs::function::erf::erfc_inv;

use crate::error::{check_unit, Error, Result};
use crate::model::Agent;
use crate::quadrature::{integrate, DEFAULT_ABS_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaShape {
    pub alpha: f64,
    pub beta: f64,
}

impl BetaShape {
    pub const UNIFORM: BetaShape = BetaShape {
        alpha: 1.0,
        beta: 1.0,
    };

    pub fn new(alpha: f64, beta: f64) -> Self {
        BetaShape { alpha, beta }
    }

    fn is_uniform(&self) -> bool {
        self.alpha == 1.0 && self.beta == 1.0
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else if self.is_uniform() {
            x
        } else {
            beta_reg(self.alpha, self.beta, x)
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        if self.is_uniform() {
            return 1.0;
        }
        let log_norm = ln_beta(self.alpha, self.beta);
        (x.powf(self.alpha - 1.0) * (1.0 - x).powf(self.beta - 1.0)) / log_norm.exp()
    }

    /// Inverse CDF by safeguarded Newton iteration.
    pub fn quantile(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return 1.0;
        }
        if self.is_uniform() {
            return u;
        }
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let mut x = self.alpha / (self.alpha + self.beta);
        for _ in 0..200 {
            let f = self.cdf(x) - u;
            if f == 0.0 {
                return x;
            }
            if f < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let d = self.pdf(x);
            let mut next = x - f / d;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 4.0 * f64::EPSILON * x.max(f64::MIN_POSITIVE)
                || hi - lo <= f64::EPSILON * hi
            {
                return next;
            }
            x = next;
        }
        x
    }

    fn validate(&self, what: &str, min: f64) -> Result<()> {
        let ok = |s: f64| s.is_finite() && s >= min && s > 0.0;
        if ok(self.alpha) && ok(self.beta) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "{what} beta shape ({}, {}) must have both parameters {} {min}",
                self.alpha,
                self.beta,
                if min > 0.0 { ">=" } else { ">" },
            )))
        }
    }
}

pub(crate) fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub(crate) fn normal_quantile(u: f64) -> f64 {
    if u <= 0.0 {
        f64::NEG_INFINITY
    } else if u >= 1.0 {
        f64::INFINITY
    } else {
        let x = -std::f64::consts::SQRT_2 * erfc_inv(2.0 * u);
        // One Newton step against the accurate CDF.
        let d = normal_pdf(x);
        if d > 0.0 {
            x - (normal_cdf(x) - u) / d
        } else {
            x
        }
    }
}

// Beyond this the standard normal tail is below the smallest double.
const Z_CLAMP: f64 = 40.0;

/// Joint law of income and valuation. All members have continuous marginals
/// with full support on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum JointDistribution {
    IndependentUniform,
    IndependentBeta {
        income: BetaShape,
        valuation: BetaShape,
    },
    /// Gaussian copula with correlation `r` between the latent normals.
    GaussianCopula {
        r: f64,
        income: BetaShape,
        valuation: BetaShape,
    },
}

impl JointDistribution {
    /// Checks parameter ranges. Income shapes must be at least one so that the
    /// income density stays bounded for quadrature.
    pub fn validate(&self) -> Result<()> {
        match self {
            JointDistribution::IndependentUniform => Ok(()),
            JointDistribution::IndependentBeta { income, valuation } => {
                income.validate("income", 1.0)?;
                valuation.validate("valuation", 0.0)
            }
            JointDistribution::GaussianCopula { r, income, valuation } => {
                if r.is_nan() || r.abs() >= 1.0 {
                    return Err(Error::InvalidParameter(format!(
                        "copula correlation r = {r} must lie in (-1, 1)"
                    )));
                }
                income.validate("income", 1.0)?;
                valuation.validate("valuation", 0.0)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            JointDistribution::IndependentUniform => "independent-uniform".into(),
            JointDistribution::IndependentBeta { income, valuation } => format!(
                "independent-beta(y: {}, {}; theta: {}, {})",
                income.alpha, income.beta, valuation.alpha, valuation.beta
            ),
            JointDistribution::GaussianCopula { r, income, valuation } => format!(
                "gaussian-copula(r: {r}; y: {}, {}; theta: {}, {})",
                income.alpha, income.beta, valuation.alpha, valuation.beta
            ),
        }
    }

    pub fn income_marginal(&self) -> BetaShape {
        match self {
            JointDistribution::IndependentUniform => BetaShape::UNIFORM,
            JointDistribution::IndependentBeta { income, .. }
            | JointDistribution::GaussianCopula { income, .. } => *income,
        }
    }

    pub fn valuation_marginal(&self) -> BetaShape {
        match self {
            JointDistribution::IndependentUniform => BetaShape::UNIFORM,
            JointDistribution::IndependentBeta { valuation, .. }
            | JointDistribution::GaussianCopula { valuation, .. } => *valuation,
        }
    }

    pub fn is_independent(&self) -> bool {
        !matches!(self, JointDistribution::GaussianCopula { r, .. } if *r != 0.0)
    }

    /// `M(c) = P(theta >= c)`.
    pub fn valuation_tail(&self, c: f64) -> f64 {
        1.0 - self.valuation_marginal().cdf(c)
    }

    /// `P(theta >= t | y)`. Thresholds above one give zero.
    pub fn conditional_tail(&self, y: f64, t: f64) -> f64 {
        if t > 1.0 {
            return 0.0;
        }
        match self {
            JointDistribution::GaussianCopula { r, income, valuation } if *r != 0.0 => {
                let ft = valuation.cdf(t);
                if ft <= 0.0 {
                    return 1.0;
                }
                if ft >= 1.0 {
                    return 0.0;
                }
                let zt = normal_quantile(ft);
                let zy = normal_quantile(income.cdf(y)).clamp(-Z_CLAMP, Z_CLAMP);
                let s = (1.0 - r * r).sqrt();
                // P(Z_t >= zt | Z_y = zy) with Z_t | Z_y ~ N(r zy, 1 - r^2)
                normal_cdf(-(zt - r * zy) / s)
            }
            _ => self.valuation_tail(t),
        }
    }

    /// Probability of `[a, b] x [c, d]`.
    pub fn rectangle_mass(&self, a: f64, b: f64, c: f64, d: f64) -> Result<f64> {
        for (name, x) in [("income", a), ("income", b), ("valuation", c), ("valuation", d)] {
            check_unit(name, x)?;
        }
        if b <= a || d <= c {
            return Ok(0.0);
        }
        let (fy, ft) = (self.income_marginal(), self.valuation_marginal());
        let income_mass = || fy.cdf(b) - fy.cdf(a);
        let valuation_mass = || ft.cdf(d) - ft.cdf(c);
        if self.is_independent() || (c == 0.0 && d == 1.0) {
            return Ok((income_mass() * valuation_mass()).max(0.0));
        }
        if a == 0.0 && b == 1.0 {
            return Ok(valuation_mass().max(0.0));
        }
        let r = integrate(
            |y| fy.pdf(y) * (self.conditional_tail(y, c) - self.conditional_tail(y, d)),
            a,
            b,
            DEFAULT_ABS_TOL,
        )?;
        Ok(r.value.max(0.0))
    }

    /// Probability of `{a <= y <= b, theta >= g(y)}` for a boundary `g`,
    /// by quadrature over income with the valuation tail in closed form.
    /// `g` is expected to be smooth on `[a, b]`.
    pub fn mass_above_boundary<G>(&self, a: f64, b: f64, g: G) -> Result<f64>
    where
        G: Fn(f64) -> f64,
    {
        check_unit("income", a)?;
        check_unit("income", b)?;
        if b <= a {
            return Ok(0.0);
        }
        let fy = self.income_marginal();
        let r = integrate(
            |y| fy.pdf(y) * self.conditional_tail(y, g(y)),
            a,
            b,
            DEFAULT_ABS_TOL,
        )?;
        Ok(r.value.clamp(0.0, 1.0))
    }

    pub fn sampler(&self) -> Result<Sampler> {
        self.validate()?;
        let beta = |s: BetaShape| {
            Beta::new(s.alpha, s.beta).map_err(|e| Error::UnsupportedDistribution(e.to_string()))
        };
        Ok(match *self {
            JointDistribution::IndependentUniform => Sampler::Uniform,
            JointDistribution::IndependentBeta { income, valuation } => Sampler::Beta {
                income: beta(income)?,
                valuation: beta(valuation)?,
            },
            JointDistribution::GaussianCopula { r, income, valuation } => Sampler::Copula {
                r,
                s: (1.0 - r * r).sqrt(),
                income,
                valuation,
            },
        })
    }
}

/// Draws agents from a [`JointDistribution`].
#[derive(Debug, Clone, Copy)]
pub enum Sampler {
    Uniform,
    Beta {
        income: Beta<f64>,
        valuation: Beta<f64>,
    },
    Copula {
        r: f64,
        s: f64,
        income: BetaShape,
        valuation: BetaShape,
    },
}

impl Distribution<Agent> for Sampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Agent {
        match self {
            Sampler::Uniform => Agent {
                y: rng.random::<f64>(),
                theta: rng.random::<f64>(),
            },
            Sampler::Beta { income, valuation } => Agent {
                y: income.sample(rng),
                theta: valuation.sample(rng),
            },
            Sampler::Copula {
                r,
                s,
                income,
                valuation,
            } => {
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                let w = r * z1 + s * z2;
                Agent {
                    y: income.quantile(normal_cdf(z1)),
                    theta: valuation.quantile(normal_cdf(w)),
                }
            }
        }
    }
}
