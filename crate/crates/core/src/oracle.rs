//! Finite-population Monte Carlo checks that share no code path with the
//! quadrature solvers.
//!
//! Populations are drawn with ChaCha20 seeded by `seed_from_u64(seed)`. The
//! draw is split into chunks of [`CHUNK_SIZE`] agents; chunk `k` uses stream
//! `k` of that generator, so a population depends only on
//! `(distribution, seed, n)` and not on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::Distribution;
use rayon::prelude::*;
use serde::Serialize;

use crate::equilibrium::{PaidBoundary, PrioritySystem, Thresholds};
use crate::error::{check_unit, Error, Result};
use crate::model::{Agent, JointDistribution, UtilityParams, ValueFunction};
use crate::welfare::{choose_priority, choose_single, BandCheck, Choice, Violation};

pub const CHUNK_SIZE: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub agents: Vec<Agent>,
    pub seed: u64,
    pub distribution: JointDistribution,
}

impl Population {
    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }
}

pub fn sample_population(dist: &JointDistribution, n: usize, seed: u64) -> Result<Population> {
    if n == 0 {
        return Err(Error::EmptyPopulation);
    }
    let sampler = dist.sampler()?;
    let chunks = n.div_ceil(CHUNK_SIZE);
    let agents = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|k| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let len = CHUNK_SIZE.min(n - k * CHUNK_SIZE);
            sampler.sample_iter(rng).take(len).collect::<Vec<_>>()
        })
        .collect();
    Ok(Population {
        agents,
        seed,
        distribution: *dist,
    })
}

/// Allocation regime applied to a population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Regime {
    Single { c: f64 },
    Priority(PrioritySystem),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ChoiceCounts {
    pub abstain: u64,
    pub free_queue: u64,
    pub paid_queue: u64,
}

impl ChoiceCounts {
    fn add(&mut self, choice: Choice) {
        match choice {
            Choice::Abstain => self.abstain += 1,
            Choice::FreeQueue => self.free_queue += 1,
            Choice::PaidQueue => self.paid_queue += 1,
        }
    }

    fn merge(mut self, other: ChoiceCounts) -> ChoiceCounts {
        self.abstain += other.abstain;
        self.free_queue += other.free_queue;
        self.paid_queue += other.paid_queue;
        self
    }

    pub fn total(&self) -> u64 {
        self.abstain + self.free_queue + self.paid_queue
    }

    pub fn served(&self) -> u64 {
        self.free_queue + self.paid_queue
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationResult {
    pub counts: ChoiceCounts,
    pub served_fraction: f64,
    /// Binomial standard error of the served fraction.
    pub standard_error: f64,
    /// Choice counts by income decile `floor(10 y)` (top decile includes `y = 1`).
    pub deciles: [ChoiceCounts; 10],
}

fn decile(y: f64) -> usize {
    ((y * 10.0) as usize).min(9)
}

/// Classifies every agent under `regime` and aggregates.
pub fn simulate_regime(
    pop: &Population,
    v: &ValueFunction,
    params: &UtilityParams,
    regime: &Regime,
) -> SimulationResult {
    let classify = |a: &Agent| match regime {
        Regime::Single { c } => choose_single(a, *c),
        Regime::Priority(system) => choose_priority(a, v, system, params),
    };
    let empty = || (ChoiceCounts::default(), [ChoiceCounts::default(); 10]);
    let (counts, deciles) = pop
        .agents
        .par_chunks(CHUNK_SIZE)
        .map(|chunk| {
            let mut acc = empty();
            for a in chunk {
                let choice = classify(a);
                acc.0.add(choice);
                acc.1[decile(a.y)].add(choice);
            }
            acc
        })
        .reduce(empty, |(c1, d1), (c2, d2)| {
            let mut d = d1;
            for (x, y) in d.iter_mut().zip(d2) {
                *x = x.merge(y);
            }
            (c1.merge(c2), d)
        });
    let n = counts.total().max(1) as f64;
    let served_fraction = counts.served() as f64 / n;
    SimulationResult {
        counts,
        served_fraction,
        standard_error: (served_fraction * (1.0 - served_fraction) / n).sqrt(),
        deciles,
    }
}

/// Sample `(1 - rho)` quantile of valuations: the smallest order statistic
/// with at most `ceil(rho n)` agents at or above it.
pub fn empirical_single_cost(pop: &Population, rho: f64) -> Result<f64> {
    if pop.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Capacity(rho));
    }
    let mut thetas: Vec<f64> = pop.agents.iter().map(|a| a.theta).collect();
    thetas.sort_by(f64::total_cmp);
    let n = thetas.len();
    let served = ((rho * n as f64 - 1e-9).ceil() as usize).clamp(1, n);
    Ok(thetas[n - served])
}

/// Asymptotic standard error of the sample `(1 - rho)` quantile,
/// `sqrt(rho (1 - rho) / n) / f(c)` with `f` the valuation density at `c`.
pub fn quantile_standard_error(dist: &JointDistribution, c: f64, rho: f64, n: usize) -> f64 {
    (rho * (1.0 - rho) / n as f64).sqrt() / dist.valuation_marginal().pdf(c)
}

/// Agents of a sampled population that contradict the band predictions.
pub fn empirical_proposition1(
    pop: &Population,
    v: &ValueFunction,
    params: &UtilityParams,
    c: f64,
    system: &PrioritySystem,
    thresholds: &Thresholds,
) -> Vec<Violation> {
    empirical_band_violations(&pop.agents, v, params, c, system, thresholds)
}

/// Band check over an arbitrary agent list.
pub fn empirical_band_violations(
    agents: &[Agent],
    v: &ValueFunction,
    params: &UtilityParams,
    c: f64,
    system: &PrioritySystem,
    thresholds: &Thresholds,
) -> Vec<Violation> {
    BandCheck {
        v,
        params,
        c,
        system,
        y_lower: thresholds.y_lower.income(),
        y_upper: thresholds.y_upper.income(),
        enforce: !system.is_collapsed(),
    }
    .violations(agents)
}

/// Served fraction and its standard error when agents join iff
/// `theta >= min(c1, g(y))`, for an arbitrary paid boundary `g`.
pub fn empirical_boundary_mass(pop: &Population, boundary: &dyn PaidBoundary, c1: f64) -> Result<(f64, f64)> {
    check_unit("c1", c1)?;
    if pop.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let served = pop
        .agents
        .par_iter()
        .filter(|a| {
            let cutoff = if a.y >= boundary.min_income() {
                boundary.theta_at(a.y)
            } else {
                f64::INFINITY
            };
            a.theta >= c1.min(cutoff)
        })
        .count();
    let n = pop.len() as f64;
    let m = served as f64 / n;
    Ok((m, (m * (1.0 - m) / n).sqrt()))
}

/// Spearman rank correlation between income and valuation.
pub fn spearman(pop: &Population) -> f64 {
    fn ranks(values: Vec<f64>) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..values.len()).collect();
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let mut r = vec![0.0; values.len()];
        for (rank, i) in idx.into_iter().enumerate() {
            r[i] = rank as f64;
        }
        r
    }
    let ry = ranks(pop.agents.iter().map(|a| a.y).collect());
    let rt = ranks(pop.agents.iter().map(|a| a.theta).collect());
    let n = ry.len() as f64;
    let mean = (n - 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in ry.iter().zip(&rt) {
        let (da, db) = (a - mean, b - mean);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    sxy / (sxx * syy).sqrt()
}

/// Spearman correlation of a Gaussian copula with latent correlation `r`.
pub fn copula_spearman(r: f64) -> f64 {
    6.0 / std::f64::consts::PI * (r / 2.0).asin()
}
