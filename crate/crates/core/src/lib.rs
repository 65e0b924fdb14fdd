//! Market-clearing equilibria for a free single queue versus a paid
//! fast-track queue, with a welfare comparison of the two regimes.
//!
//! Agents differ in income `y` and service valuation `theta`, both in
//! `[0, 1]`. The single queue rations capacity `rho` by a waiting cost `c`;
//! the priority regime adds a shorter line with waiting cost `c2 < c1` sold at
//! price `p`. The crate solves both clearing problems, locates the income
//! thresholds that split the population, and checks the resulting
//! three-band pattern of winners and losers on grids and sampled populations.
//!
//! - [`model`]: agents, value functions, utilities, population laws.
//! - [`equilibrium`]: clearing masses, solvers and income thresholds.
//! - [`welfare`]: choices, regime comparison and the band verification.
//! - [`oracle`]: Monte Carlo populations used as an independent check.

pub mod equilibrium;
pub mod error;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod roots;
pub mod welfare;

pub use error::{Error, Result};
