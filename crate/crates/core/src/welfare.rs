//! Who gains and who loses when a paid fast-track line is added to a free
//! single queue.
//!
//! Each agent picks the best of staying out, the free line and (if it can
//! afford `p`) the paid line. Comparing the best attainable utility in the two
//! regimes sorts incomes into three bands cut at `y_lower` and `y_upper`:
//!
//! - `y > y_upper`: weakly better off; participants use the paid line.
//! - `y_lower < y < y_upper`: weakly worse off, yet participants still pay.
//! - `y < y_lower`: weakly worse off; never use the paid line.

use rayon::prelude::*;
use serde::Serialize;

use crate::equilibrium::{income_threshold, PaidBoundary, PrioritySystem, Threshold, Thresholds};
use crate::error::{Error, Result};
use crate::model::{theta_star_unchecked, Agent, UtilityParams, ValueFunction};

/// Utilities closer than this are ties.
pub const COMPARISON_TOL: f64 = 1e-12;
/// Incomes this close to a threshold are left out of band checks.
pub const BAND_EXCLUSION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Choice {
    Abstain,
    FreeQueue,
    PaidQueue,
}

/// Priority-regime utility relative to the single queue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeComparison {
    StrictGain,
    Indifferent,
    StrictLoss,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeUtilities {
    pub single: f64,
    pub priority: f64,
}

impl RegimeUtilities {
    pub fn comparison(&self) -> RegimeComparison {
        let diff = self.priority - self.single;
        if diff > COMPARISON_TOL {
            RegimeComparison::StrictGain
        } else if diff < -COMPARISON_TOL {
            RegimeComparison::StrictLoss
        } else {
            RegimeComparison::Indifferent
        }
    }
}

/// Free line iff `theta >= c`.
pub fn choose_single(agent: &Agent, c: f64) -> Choice {
    if agent.theta >= c {
        Choice::FreeQueue
    } else {
        Choice::Abstain
    }
}

// Options in tie-break order. A collapsed system has a single line.
fn priority_options(
    agent: &Agent,
    v: &ValueFunction,
    system: &PrioritySystem,
    params: &UtilityParams,
) -> [(Choice, f64); 3] {
    let t = params.endowment();
    let base = v.eval(agent.y);
    let paid = if agent.y >= system.p() && !system.is_collapsed() {
        v.eval(agent.y - system.p()) + t - system.c2() + agent.theta
    } else {
        f64::NEG_INFINITY
    };
    [
        (Choice::PaidQueue, paid),
        (Choice::FreeQueue, base + t - system.c1() + agent.theta),
        (Choice::Abstain, base + t),
    ]
}

fn argmax(options: &[(Choice, f64)]) -> (Choice, f64) {
    let best = options.iter().map(|&(_, u)| u).fold(f64::NEG_INFINITY, f64::max);
    options
        .iter()
        .copied()
        .find(|&(_, u)| u >= best - COMPARISON_TOL)
        .expect("outside option is always finite")
}

/// Utility-maximising option under the priority regime; ties within
/// [`COMPARISON_TOL`] go to the paid line, then the free line.
pub fn choose_priority(
    agent: &Agent,
    v: &ValueFunction,
    system: &PrioritySystem,
    params: &UtilityParams,
) -> Choice {
    argmax(&priority_options(agent, v, system, params)).0
}

/// Best attainable utility under each regime.
pub fn regime_utilities(
    agent: &Agent,
    v: &ValueFunction,
    params: &UtilityParams,
    c: f64,
    system: &PrioritySystem,
) -> RegimeUtilities {
    let base = v.eval(agent.y) + params.endowment();
    let single = base.max(base - c + agent.theta);
    let priority = priority_options(agent, v, system, params)
        .iter()
        .map(|&(_, u)| u)
        .fold(f64::NEG_INFINITY, f64::max);
    RegimeUtilities { single, priority }
}

pub fn compare_regimes(
    agent: &Agent,
    v: &ValueFunction,
    params: &UtilityParams,
    c: f64,
    system: &PrioritySystem,
) -> RegimeComparison {
    regime_utilities(agent, v, params, c, system).comparison()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Band {
    Low,
    Middle,
    High,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::Low, Band::Middle, Band::High];

    pub fn name(&self) -> &'static str {
        match self {
            Band::Low => "low",
            Band::Middle => "middle",
            Band::High => "high",
        }
    }

    fn index(&self) -> usize {
        *self as usize
    }

    /// Whether a (comparison, choice) pair is what the band predicts.
    pub fn admits(&self, comparison: RegimeComparison, choice: Choice) -> bool {
        use Choice::*;
        use RegimeComparison::*;
        match self {
            Band::High => comparison != StrictLoss && choice != FreeQueue,
            Band::Middle => comparison != StrictGain && choice != FreeQueue,
            Band::Low => comparison != StrictGain && choice != PaidQueue,
        }
    }
}

/// Band of income `y`, or `None` within `eps` of either threshold.
pub fn income_band(y: f64, y_lower: f64, y_upper: f64, eps: f64) -> Option<Band> {
    if (y - y_lower).abs() < eps || (y - y_upper).abs() < eps {
        None
    } else if y < y_lower {
        Some(Band::Low)
    } else if y < y_upper {
        Some(Band::Middle)
    } else {
        Some(Band::High)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub agent: Agent,
    pub band: Band,
    pub comparison: RegimeComparison,
    pub choice: Choice,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BandTally {
    pub gain: usize,
    pub loss: usize,
    pub indifferent: usize,
    /// Agents that pay for the fast track although they lose from its introduction.
    pub paid_while_losing: usize,
}

impl BandTally {
    fn record(&mut self, comparison: RegimeComparison, choice: Choice) {
        match comparison {
            RegimeComparison::StrictGain => self.gain += 1,
            RegimeComparison::StrictLoss => self.loss += 1,
            RegimeComparison::Indifferent => self.indifferent += 1,
        }
        if comparison == RegimeComparison::StrictLoss && choice == Choice::PaidQueue {
            self.paid_while_losing += 1;
        }
    }

    fn merge(&mut self, other: &BandTally) {
        self.gain += other.gain;
        self.loss += other.loss;
        self.indifferent += other.indifferent;
        self.paid_while_losing += other.paid_while_losing;
    }

    pub fn total(&self) -> usize {
        self.gain + self.loss + self.indifferent
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Assessment {
    tallies: [BandTally; 3],
    excluded: usize,
    violations: Vec<Violation>,
}

impl Assessment {
    fn merge(mut self, other: Assessment) -> Assessment {
        for (a, b) in self.tallies.iter_mut().zip(other.tallies.iter()) {
            a.merge(b);
        }
        self.excluded += other.excluded;
        self.violations.extend(other.violations);
        self
    }
}

/// Context shared by the grid and the sampled-population checks.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BandCheck<'a> {
    pub v: &'a ValueFunction,
    pub params: &'a UtilityParams,
    pub c: f64,
    pub system: &'a PrioritySystem,
    pub y_lower: f64,
    pub y_upper: f64,
    pub enforce: bool,
}

impl BandCheck<'_> {
    fn assess<'b>(&self, agents: impl Iterator<Item = &'b Agent>) -> Assessment {
        let mut out = Assessment::default();
        for agent in agents {
            let Some(band) = income_band(agent.y, self.y_lower, self.y_upper, BAND_EXCLUSION) else {
                out.excluded += 1;
                continue;
            };
            let comparison = compare_regimes(agent, self.v, self.params, self.c, self.system);
            let choice = choose_priority(agent, self.v, self.system, self.params);
            out.tallies[band.index()].record(comparison, choice);
            if self.enforce && !band.admits(comparison, choice) {
                out.violations.push(Violation {
                    agent: *agent,
                    band,
                    comparison,
                    choice,
                });
            }
        }
        out
    }

    pub(crate) fn violations(&self, agents: &[Agent]) -> Vec<Violation> {
        agents
            .par_chunks(4096)
            .map(|chunk| self.assess(chunk.iter()))
            .reduce(Assessment::default, Assessment::merge)
            .violations
    }
}

/// Outcome of checking the three-band partition on an agent grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WelfareReport {
    pub thresholds: Thresholds,
    pub resolution: usize,
    pub bands: [BandTally; 3],
    /// Grid agents within the exclusion strip of a threshold.
    pub excluded: usize,
    pub violations: Vec<Violation>,
    pub notices: Vec<String>,
}

impl WelfareReport {
    pub fn band(&self, band: Band) -> &BandTally {
        &self.bands[band.index()]
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn threshold_notices(thresholds: &Thresholds) -> Vec<String> {
    let mut notices = Vec::new();
    for (name, t) in [("y_lower", thresholds.y_lower), ("y_upper", thresholds.y_upper)] {
        if !t.is_interior() {
            notices.push(format!(
                "{name} has no interior root ({}); bands use effective income {}",
                t.label(),
                t.income()
            ));
        }
    }
    notices
}

/// Checks every agent of the `n x n` grid on the unit square against the
/// band predictions, with thresholds derived from `(v, c, system)`.
pub fn verify_proposition1(
    n: usize,
    v: &ValueFunction,
    params: &UtilityParams,
    c: f64,
    system: &PrioritySystem,
) -> Result<WelfareReport> {
    let thresholds = Thresholds::compute(v, system, c)?;
    verify_with_thresholds(n, v, params, c, system, &thresholds)
}

/// As [`verify_proposition1`] with caller-supplied thresholds.
pub fn verify_with_thresholds(
    n: usize,
    v: &ValueFunction,
    params: &UtilityParams,
    c: f64,
    system: &PrioritySystem,
    thresholds: &Thresholds,
) -> Result<WelfareReport> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "grid resolution {n} must be at least 2"
        )));
    }
    let mut notices = threshold_notices(thresholds);
    if system.is_collapsed() {
        notices.push(
            "collapsed system offers a single line: degenerate partition, band predicates skipped"
                .to_string(),
        );
    }
    let check = BandCheck {
        v,
        params,
        c,
        system,
        y_lower: thresholds.y_lower.income(),
        y_upper: thresholds.y_upper.income(),
        enforce: !system.is_collapsed(),
    };
    let step = 1.0 / (n - 1) as f64;
    let assessment = (0..n)
        .into_par_iter()
        .map(|i| {
            let y = i as f64 * step;
            let row: Vec<Agent> = (0..n)
                .map(|j| Agent {
                    y,
                    theta: j as f64 * step,
                })
                .collect();
            check.assess(row.iter())
        })
        .reduce(Assessment::default, Assessment::merge);

    Ok(WelfareReport {
        thresholds: *thresholds,
        resolution: n,
        bands: assessment.tallies,
        excluded: assessment.excluded,
        violations: assessment.violations,
        notices,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub id: &'static str,
    /// `(y, theta)` samples.
    pub samples: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpecialPoint {
    pub label: &'static str,
    pub theta: f64,
    pub y: f64,
}

/// Boundaries of the allocation regions in the `(theta, y)` plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionGeometry {
    pub curves: Vec<Curve>,
    pub points: Vec<SpecialPoint>,
    pub notices: Vec<String>,
}

impl RegionGeometry {
    pub fn curve(&self, id: &str) -> Option<&Curve> {
        self.curves.iter().find(|c| c.id == id)
    }

    pub fn point(&self, label: &str) -> Option<&SpecialPoint> {
        self.points.iter().find(|p| p.label == label)
    }

    /// True when the paid boundary never enters the unit square.
    pub fn is_degenerate(&self) -> bool {
        self.curve(PAID_BOUNDARY).is_none_or(|c| c.samples.is_empty())
    }
}

pub const SINGLE_QUEUE_LINE: &str = "single_queue";
pub const FREE_QUEUE_LINE: &str = "free_queue";
pub const PAID_BOUNDARY: &str = "paid_boundary";

/// Samples the vertical lines `theta = c` and `theta = c1`, the paid boundary
/// over incomes where it lies inside the square, and the points
/// `P = (c1, y_lower)` and `P' = (c, y_upper)`.
pub fn region_geometry(
    boundary: &dyn PaidBoundary,
    c1: f64,
    c: f64,
    resolution: usize,
) -> Result<RegionGeometry> {
    if resolution < 2 {
        return Err(Error::InvalidParameter(format!(
            "geometry resolution {resolution} must be at least 2"
        )));
    }
    let vertical = |id, theta| Curve {
        id,
        samples: vec![(0.0, theta), (1.0, theta)],
    };
    let mut notices = Vec::new();
    let start = match income_threshold(boundary, 1.0) {
        Threshold::AboveRange => None,
        t => Some(t.income()),
    };
    let paid = Curve {
        id: PAID_BOUNDARY,
        samples: match start {
            None => {
                notices.push("paid boundary lies above theta = 1 at every income".to_string());
                Vec::new()
            }
            Some(y0) => (0..resolution)
                .map(|k| {
                    let y = if k + 1 == resolution {
                        1.0
                    } else {
                        y0 + (1.0 - y0) * k as f64 / (resolution - 1) as f64
                    };
                    (y, boundary.theta_at(y))
                })
                .collect(),
        },
    };

    let mut points = Vec::new();
    for (label, level) in [("P", c1), ("P'", c)] {
        match income_threshold(boundary, level) {
            Threshold::Interior(y) => points.push(SpecialPoint {
                label,
                theta: level,
                y,
            }),
            t => notices.push(format!(
                "point {label} omitted: boundary does not cross theta = {level} inside the income range ({})",
                t.label()
            )),
        }
    }

    Ok(RegionGeometry {
        curves: vec![
            vertical(SINGLE_QUEUE_LINE, c),
            vertical(FREE_QUEUE_LINE, c1),
            paid,
        ],
        points,
        notices,
    })
}

/// [`region_geometry`] for the fast-track boundary of `system`.
pub fn priority_region_geometry(
    v: &ValueFunction,
    system: &PrioritySystem,
    c: f64,
    resolution: usize,
) -> Result<RegionGeometry> {
    region_geometry(&system.boundary(v), system.c1(), c, resolution)
}

/// Region-logic classification used to cross-check [`choose_priority`] away
/// from indifference curves.
pub fn region_choice(agent: &Agent, v: &ValueFunction, system: &PrioritySystem) -> Choice {
    let affordable = agent.y >= system.p() && !system.is_collapsed();
    let paid_cutoff = if affordable {
        theta_star_unchecked(v, agent.y, system.p()) + system.c2()
    } else {
        f64::INFINITY
    };
    if agent.theta < system.c1().min(paid_cutoff) {
        Choice::Abstain
    } else if affordable && paid_cutoff <= system.c1() {
        Choice::PaidQueue
    } else {
        Choice::FreeQueue
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{solve_priority, solve_single_queue, PowerLawBoundary, Unknown};
    use crate::model::JointDistribution;
    use crate::roots::Bisection;

    fn params() -> UtilityParams {
        UtilityParams::default()
    }

    fn agent(y: f64, theta: f64) -> Agent {
        Agent { y, theta }
    }

    fn system(c1: f64, c2: f64, p: f64) -> PrioritySystem {
        PrioritySystem::new(c1, c2, p).unwrap()
    }

    #[test]
    fn single_queue_choice() {
        assert_eq!(choose_single(&agent(0.3, 0.7), 0.65), Choice::FreeQueue);
        assert_eq!(choose_single(&agent(0.3, 0.65), 0.65), Choice::FreeQueue);
        assert_eq!(choose_single(&agent(0.9, 0.1), 0.65), Choice::Abstain);
    }

    #[test]
    fn priority_choice_examples() {
        let v = ValueFunction::Sqrt;
        let s = system(0.8, 0.1, 0.09);
        assert_eq!(
            choose_priority(&agent(1.0, 1.0), &v, &s, &params()),
            Choice::PaidQueue
        );
        for y in [0.0, 0.3, 1.0] {
            assert_eq!(
                choose_priority(&agent(y, 0.0), &v, &s, &params()),
                Choice::Abstain
            );
        }
        // theta*(0.25, 0.09) = 0.1 = c1 - c2: paid and free lines tie.
        let s = system(0.8, 0.7, 0.09);
        assert_eq!(
            choose_priority(&agent(0.25, 0.9), &v, &s, &params()),
            Choice::PaidQueue
        );
        // Just below the tie income the free line wins.
        assert_eq!(
            choose_priority(&agent(0.24, 0.9), &v, &s, &params()),
            Choice::FreeQueue
        );
    }

    #[test]
    fn unaffordable_agents_never_pay() {
        let s = system(0.7, 0.0, 0.5);
        let c = choose_priority(&agent(0.4, 1.0), &ValueFunction::Sqrt, &s, &params());
        assert_eq!(c, Choice::FreeQueue);
    }

    #[test]
    fn collapsed_system_offers_one_line() {
        let s = PrioritySystem::collapsed(0.65).unwrap();
        let v = ValueFunction::ShiftedLog;
        assert_eq!(
            choose_priority(&agent(0.5, 0.7), &v, &s, &params()),
            Choice::FreeQueue
        );
        assert_eq!(
            choose_priority(&agent(0.5, 0.6), &v, &s, &params()),
            Choice::Abstain
        );
    }

    #[test]
    fn regime_utility_examples() {
        let v = ValueFunction::Sqrt;
        let s = system(0.8, 0.1, 0.09);
        let u0 = v.eval(0.4) + 1.0;
        let u = regime_utilities(&agent(0.4, 0.0), &v, &params(), 0.65, &s);
        assert_eq!((u.single, u.priority), (u0, u0));
        assert_eq!(u.comparison(), RegimeComparison::Indifferent);

        // Paid line unaffordable at y = 0.1; theta between c and c1 loses access.
        let s_expensive = system(0.8, 0.1, 0.2);
        let u = regime_utilities(&agent(0.1, 0.72), &v, &params(), 0.65, &s_expensive);
        assert!(u.single > u.priority);
        assert_eq!(u.comparison(), RegimeComparison::StrictLoss);

        // theta*(1, 0.09) ~ 0.0461 < c - c2 = 0.55
        let u = regime_utilities(&agent(1.0, 1.0), &v, &params(), 0.65, &s);
        assert_eq!(u.comparison(), RegimeComparison::StrictGain);
        let expected_gain = 0.55 - (1.0 - 0.91f64.sqrt());
        assert!((u.priority - u.single - expected_gain).abs() < 1e-14);
    }

    #[test]
    fn comparison_examples() {
        let v = ValueFunction::Sqrt;
        let (c, s) = (0.65, system(0.75, 0.3, 0.44));
        let t = Thresholds::compute(&v, &s, c).unwrap();
        assert!(t.y_lower.is_interior() && t.y_upper.is_interior());
        let y_upper = t.y_upper.income();
        assert_eq!(
            compare_regimes(&agent(y_upper, 1.0), &v, &params(), c, &s),
            RegimeComparison::Indifferent
        );
        assert_eq!(
            compare_regimes(&agent(t.y_lower.income() - 0.05, 1.0), &v, &params(), c, &s),
            RegimeComparison::StrictLoss
        );
        assert_eq!(
            compare_regimes(&agent(0.5, 0.3), &v, &params(), c, &s),
            RegimeComparison::Indifferent
        );
    }

    #[test]
    fn band_predicates() {
        use Choice::*;
        use RegimeComparison::*;
        assert!(Band::High.admits(StrictGain, PaidQueue));
        assert!(!Band::High.admits(StrictLoss, PaidQueue));
        assert!(!Band::High.admits(Indifferent, FreeQueue));
        assert!(Band::Middle.admits(StrictLoss, PaidQueue));
        assert!(!Band::Middle.admits(StrictGain, PaidQueue));
        assert!(Band::Low.admits(StrictLoss, FreeQueue));
        assert!(!Band::Low.admits(Indifferent, PaidQueue));
        assert_eq!(income_band(0.5, 0.3, 0.7, 1e-6), Some(Band::Middle));
        assert_eq!(income_band(0.3 + 1e-7, 0.3, 0.7, 1e-6), None);
        assert_eq!(income_band(0.1, 0.3, 0.7, 1e-6), Some(Band::Low));
        assert_eq!(income_band(1.0, 0.3, 0.7, 1e-6), Some(Band::High));
    }

    fn calibrated() -> (f64, PrioritySystem) {
        let dist = JointDistribution::IndependentUniform;
        let opts = Bisection::default();
        let c = solve_single_queue(&dist, 0.35, &opts).unwrap().c;
        let eq = solve_priority(
            &dist,
            &ValueFunction::Sqrt,
            0.35,
            Unknown::C1 { c2: 0.3, p: 0.44 },
            &opts,
        )
        .unwrap();
        (c, eq.system)
    }

    #[test]
    fn grid_verification_passes_on_calibrated_system() {
        let (c, s) = calibrated();
        let r = verify_proposition1(200, &ValueFunction::Sqrt, &params(), c, &s).unwrap();
        assert!(r.passed(), "{:?}", r.violations.first());
        assert!(r.notices.is_empty(), "{:?}", r.notices);
        assert!(r.band(Band::Middle).paid_while_losing > 0);
        for b in Band::ALL {
            assert!(r.band(b).indifferent > 0, "{}", b.name());
        }
        let counted: usize = r.bands.iter().map(BandTally::total).sum();
        assert_eq!(counted + r.excluded, 200 * 200);
    }

    #[test]
    fn shifted_thresholds_are_caught() {
        let (c, s) = calibrated();
        let v = ValueFunction::Sqrt;
        let mut t = Thresholds::compute(&v, &s, c).unwrap();
        t.y_upper = Threshold::Interior(t.y_upper.income() + 0.1);
        let r = verify_with_thresholds(200, &v, &params(), c, &s, &t).unwrap();
        assert!(!r.passed());
        assert!(r.violations.iter().all(|x| x.band == Band::Middle));
    }

    #[test]
    fn collapsed_system_is_indifferent_everywhere() {
        let s = PrioritySystem::collapsed(0.65).unwrap();
        let r = verify_proposition1(50, &ValueFunction::Sqrt, &params(), 0.65, &s).unwrap();
        assert!(r.passed());
        assert!(!r.notices.is_empty());
        for b in Band::ALL {
            assert_eq!(r.band(b).gain + r.band(b).loss, 0);
        }
    }

    #[test]
    fn pure_price_low_band_participants_lose() {
        let dist = JointDistribution::IndependentUniform;
        let opts = Bisection::default();
        let c = solve_single_queue(&dist, 0.35, &opts).unwrap().c;
        let v = ValueFunction::Sqrt;
        let eq = solve_priority(&dist, &v, 0.35, Unknown::Price { c1: 1.0, c2: 0.0 }, &opts).unwrap();
        let s = eq.system;
        let r = verify_proposition1(200, &v, &params(), c, &s).unwrap();
        assert!(r.passed());
        let y_lower = r.thresholds.y_lower.income();
        let mut checked = 0;
        for i in 0..200 {
            for j in 0..200 {
                let a = agent(i as f64 / 199.0, j as f64 / 199.0);
                if a.y < y_lower - BAND_EXCLUSION && a.theta > c && a.theta < 1.0 {
                    assert_eq!(
                        compare_regimes(&a, &v, &params(), c, &s),
                        RegimeComparison::StrictLoss
                    );
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn rejects_tiny_grid() {
        let s = system(0.8, 0.1, 0.09);
        assert!(verify_proposition1(1, &ValueFunction::Sqrt, &params(), 0.65, &s).is_err());
        assert!(verify_proposition1(2, &ValueFunction::Sqrt, &params(), 0.65, &s).is_ok());
    }

    #[test]
    fn figure_fixture_points() {
        let g = region_geometry(&PowerLawBoundary { scale: 0.35 }, 0.8, 0.65, 200).unwrap();
        let p = g.point("P").unwrap();
        assert_eq!(p.theta, 0.8);
        assert!((p.y - 0.546_875).abs() < 1e-12);
        assert!((p.y - 0.5469).abs() < 1e-3);
        let q = g.point("P'").unwrap();
        assert_eq!(q.theta, 0.65);
        assert!((q.y - 0.828_402_366).abs() < 1e-9);
        let curve = g.curve(PAID_BOUNDARY).unwrap();
        assert_eq!(curve.samples.len(), 200);
        for &(y, theta) in &curve.samples {
            assert!((y - 0.35 / (theta * theta)).abs() <= 1e-9);
        }
        assert_eq!(curve.samples[0], (0.35, 1.0));
    }

    #[test]
    fn fast_track_geometry_satisfies_definitions() {
        let v = ValueFunction::ShiftedLog;
        // theta*(y, 0.44) spans [0.248, 0.365] on the affordable range.
        let s = system(0.62, 0.3, 0.44);
        let g = priority_region_geometry(&v, &s, 0.65, 64).unwrap();
        for &(y, theta) in &g.curve(PAID_BOUNDARY).unwrap().samples {
            assert!((theta - (theta_star_unchecked(&v, y, 0.44) + 0.3)).abs() <= 1e-9);
        }
        let p = g.point("P").unwrap();
        assert!((theta_star_unchecked(&v, p.y, 0.44) + 0.3 - p.theta).abs() <= 1e-9);
        assert_eq!(p.theta, s.c1());
        assert!(!g.is_degenerate());
    }

    #[test]
    fn zero_price_geometry_is_flat() {
        let s = system(0.8, 0.3, 0.0);
        let g = priority_region_geometry(&ValueFunction::Sqrt, &s, 0.65, 2).unwrap();
        let curve = g.curve(PAID_BOUNDARY).unwrap();
        assert_eq!(curve.samples, vec![(0.0, 0.3), (1.0, 0.3)]);
        assert!(g.point("P").is_none());
        assert_eq!(g.notices.len(), 2);
    }

    #[test]
    fn boundary_outside_square_is_degenerate() {
        // theta*(1, 0.5) + 0.9 > 1 at every income.
        let s = system(0.95, 0.9, 0.5);
        let g = priority_region_geometry(&ValueFunction::Sqrt, &s, 0.65, 10).unwrap();
        assert!(g.is_degenerate());
    }
}
