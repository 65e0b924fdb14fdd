use fasttrack_core::equilibrium::{
    priority_clearing_mass, tail_mass, y_lower_threshold, PrioritySystem, Thresholds,
};
use fasttrack_core::model::{
    theta_star, utility_free_queue, utility_outside, utility_paid_queue, Agent, BetaShape, JointDistribution,
    UtilityParams, ValueFunction,
};
use fasttrack_core::welfare::{
    choose_priority, compare_regimes, income_band, regime_utilities, region_choice, Choice, BAND_EXCLUSION,
    COMPARISON_TOL,
};
use proptest::prelude::*;

fn value_function() -> impl Strategy<Value = ValueFunction> {
    prop_oneof![
        Just(ValueFunction::Sqrt),
        Just(ValueFunction::ShiftedLog),
        (0.05f64..0.95).prop_map(|gamma| ValueFunction::Crra { gamma }),
    ]
}

fn distribution() -> impl Strategy<Value = JointDistribution> {
    prop_oneof![
        Just(JointDistribution::IndependentUniform),
        (1.0f64..4.0, 1.0f64..4.0, 0.5f64..4.0, 0.5f64..4.0).prop_map(|(a, b, c, d)| {
            JointDistribution::IndependentBeta {
                income: BetaShape::new(a, b),
                valuation: BetaShape::new(c, d),
            }
        }),
        (-0.8f64..0.8, 1.0f64..3.0, 1.0f64..3.0).prop_map(|(r, a, b)| {
            JointDistribution::GaussianCopula {
                r,
                income: BetaShape::new(a, b),
                valuation: BetaShape::new(b, a),
            }
        }),
    ]
}

fn system() -> impl Strategy<Value = PrioritySystem> {
    (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0)
        .prop_filter("c2 < c1", |(a, b, _)| (a - b).abs() > 1e-6)
        .prop_map(|(a, b, p)| PrioritySystem::new(a.max(b), a.min(b), p).unwrap())
}

fn agent() -> impl Strategy<Value = Agent> {
    (0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(y, theta)| Agent { y, theta })
}

// Slack for comparing two quadrature results.
const QUAD_SLACK: f64 = 2e-9;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn theta_star_decreasing_in_income(v in value_function(), p in 0.01f64..0.9, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = (p + (1.0 - p) * a.min(b), p + (1.0 - p) * a.max(b));
        prop_assume!(hi - lo > 1e-6);
        let t_lo = theta_star(&v, lo, p).unwrap();
        let t_hi = theta_star(&v, hi, p).unwrap();
        prop_assert!(t_hi < t_lo, "{t_lo} {t_hi}");
    }

    #[test]
    fn theta_star_increasing_in_price(v in value_function(), y in 0.05f64..=1.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (p1, p2) = (y * a.min(b), y * a.max(b));
        prop_assume!(p2 - p1 > 1e-9);
        prop_assert!(theta_star(&v, y, p1).unwrap() < theta_star(&v, y, p2).unwrap());
        prop_assert!(theta_star(&v, y, p1).unwrap() >= 0.0);
    }

    #[test]
    fn endowment_cancels_in_comparisons(v in value_function(), a in agent(), s in system(), c in 0.0f64..1.0, t in -5.0f64..5.0) {
        let base = UtilityParams::default();
        let shifted = UtilityParams::with_endowment(t).unwrap();
        let sign = |x: f64| if x > COMPARISON_TOL { 1 } else if x < -COMPARISON_TOL { -1 } else { 0 };
        for params in [base, shifted] {
            let u0 = utility_outside(&v, a.y, &params).unwrap();
            let uq = utility_free_queue(&v, &a, &params, c).unwrap();
            prop_assert_eq!(sign(uq - u0), sign(a.theta - c));
        }
        prop_assert_eq!(
            compare_regimes(&a, &v, &base, c, &s),
            compare_regimes(&a, &v, &shifted, c, &s)
        );
        prop_assert_eq!(
            choose_priority(&a, &v, &s, &base),
            choose_priority(&a, &v, &s, &shifted)
        );
        if a.y >= s.p() {
            for params in [base, shifted] {
                let u2 = utility_paid_queue(&v, &a, &params, s.c2(), s.p()).unwrap();
                let u0 = utility_outside(&v, a.y, &params).unwrap();
                let cut = theta_star(&v, a.y, s.p()).unwrap() + s.c2();
                if (a.theta - cut).abs() > 1e-9 {
                    prop_assert_eq!(u2 >= u0, a.theta >= cut);
                }
            }
        }
    }

    #[test]
    fn choice_is_tolerant_argmax(v in value_function(), a in agent(), s in system()) {
        let params = UtilityParams::default();
        let u0 = utility_outside(&v, a.y, &params).unwrap();
        let u1 = utility_free_queue(&v, &a, &params, s.c1()).unwrap();
        let u2 = if a.y >= s.p() { utility_paid_queue(&v, &a, &params, s.c2(), s.p()).unwrap() } else { f64::NEG_INFINITY };
        let best = u0.max(u1).max(u2);
        let expected = if u2 >= best - COMPARISON_TOL {
            Choice::PaidQueue
        } else if u1 >= best - COMPARISON_TOL {
            Choice::FreeQueue
        } else {
            Choice::Abstain
        };
        prop_assert_eq!(choose_priority(&a, &v, &s, &params), expected);
        let u = regime_utilities(&a, &v, &params, s.c1(), &s);
        prop_assert!(u.priority >= u0 && u.single >= u0);
    }

    #[test]
    fn choice_matches_region_logic_off_the_curves(v in value_function(), a in agent(), s in system()) {
        let params = UtilityParams::default();
        if a.y >= s.p() {
            let t = theta_star(&v, a.y, s.p()).unwrap();
            // Keep away from the three indifference curves.
            prop_assume!((a.theta - s.c1()).abs() > 1e-9);
            prop_assume!((a.theta - t - s.c2()).abs() > 1e-9);
            prop_assume!((t - (s.c1() - s.c2())).abs() > 1e-9);
        }
        prop_assert_eq!(choose_priority(&a, &v, &s, &params), region_choice(&a, &v, &s));
    }

    #[test]
    fn paid_choice_persists_at_higher_income(v in value_function(), theta in 0.0f64..=1.0, s in system()) {
        let params = UtilityParams::default();
        let mut paying = false;
        for k in 0..=100 {
            let a = Agent { y: k as f64 / 100.0, theta };
            let paid = choose_priority(&a, &v, &s, &params) == Choice::PaidQueue;
            prop_assert!(paid || !paying, "agent {a:?} stops paying");
            paying |= paid;
        }
    }

    #[test]
    fn comparison_depends_only_on_income_for_participants(
        v in value_function(), s in system(), c in 0.0f64..1.0, y in 0.0f64..=1.0, u in 0.0f64..1.0, w in 0.0f64..1.0,
    ) {
        let params = UtilityParams::default();
        prop_assume!(c >= s.c2());
        let t = Thresholds::compute(&v, &s, c).unwrap();
        prop_assume!(income_band(y, t.y_lower.income(), t.y_upper.income(), BAND_EXCLUSION).is_some());
        let cutoff = if y >= s.p() { theta_star(&v, y, s.p()).unwrap() + s.c2() } else { f64::INFINITY };
        let floor = s.c1().max(cutoff).max(c);
        prop_assume!(floor <= 1.0);
        let a1 = Agent { y, theta: floor + (1.0 - floor) * u };
        let a2 = Agent { y, theta: floor + (1.0 - floor) * w };
        prop_assert_eq!(compare_regimes(&a1, &v, &params, c, &s), compare_regimes(&a2, &v, &params, c, &s));
    }

    #[test]
    fn rectangle_mass_monotone_in_inclusion(
        d in distribution(),
        a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0, e in 0.0f64..1.0, grow in 0.0f64..1.0,
    ) {
        let (y0, y1) = (a.min(b), a.max(b));
        let (t0, t1) = (c.min(e), c.max(e));
        let inner = d.rectangle_mass(y0, y1, t0, t1).unwrap();
        let outer = d.rectangle_mass(y0 * (1.0 - grow), y1 + (1.0 - y1) * grow, t0 * (1.0 - grow), t1).unwrap();
        prop_assert!(inner >= 0.0);
        prop_assert!(outer >= inner - QUAD_SLACK, "{outer} < {inner}");
    }

    #[test]
    fn uniform_rectangles_are_exact(a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0, e in 0.0f64..1.0) {
        let d = JointDistribution::IndependentUniform;
        let (y0, y1, t0, t1) = (a.min(b), a.max(b), c.min(e), c.max(e));
        prop_assert_eq!(d.rectangle_mass(y0, y1, t0, t1).unwrap(), (y1 - y0) * (t1 - t0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clearing_mass_nonincreasing_in_each_cost(
        d in distribution(), v in value_function(), s in system(), bump in 0.0f64..0.2,
    ) {
        let m = priority_clearing_mass(&d, &v, &s).unwrap();
        prop_assert!((0.0..=1.0).contains(&m));
        if let Ok(s1) = PrioritySystem::new((s.c1() + bump).min(1.0), s.c2(), s.p()) {
            prop_assert!(priority_clearing_mass(&d, &v, &s1).unwrap() <= m + QUAD_SLACK);
        }
        if let Ok(s2) = PrioritySystem::new(s.c1(), (s.c2() + bump).min(s.c1() - 1e-9).max(s.c2()), s.p()) {
            prop_assert!(priority_clearing_mass(&d, &v, &s2).unwrap() <= m + QUAD_SLACK);
        }
        let s3 = PrioritySystem::new(s.c1(), s.c2(), (s.p() + bump).min(1.0)).unwrap();
        prop_assert!(priority_clearing_mass(&d, &v, &s3).unwrap() <= m + QUAD_SLACK);
        let c = s.c1();
        prop_assert!(tail_mass(&d, (c + bump).min(1.0)).unwrap() <= tail_mass(&d, c).unwrap());
    }

    #[test]
    fn y_lower_solves_its_equation(v in value_function(), s in system()) {
        let t = y_lower_threshold(&v, &s);
        if t.is_interior() {
            let y = t.income();
            prop_assert!((theta_star(&v, y, s.p()).unwrap() - (s.c1() - s.c2())).abs() <= 1e-9);
        }
    }
}
