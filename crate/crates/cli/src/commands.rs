//! The six subcommands. Each writes its files under the output directory and
//! returns a one-line summary for the terminal.

use std::fs;
use std::path::PathBuf;

use fasttrack_core::equilibrium::{
    clearing_split, income_band_masses, manifold_sweep, served_mass, solve_priority, solve_single_queue,
    PowerLawBoundary, PriorityEquilibrium, PrioritySystem, SingleQueueEquilibrium, Threshold, Thresholds,
    Unknown,
};
use fasttrack_core::model::UtilityParams;
use fasttrack_core::oracle::{
    empirical_proposition1, sample_population, simulate_regime, Regime, SimulationResult,
};
use fasttrack_core::roots::Bisection;
use fasttrack_core::welfare::{priority_region_geometry, region_geometry, Band, RegionGeometry, Violation};
use serde_json::{json, Value};

use crate::config::{RegimeSpec, RunConfig};
use crate::error::CliError;
use crate::format::{num, sig9, write_csv, write_json};

/// Resolved settings of one invocation.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: RunConfig,
    pub out: PathBuf,
    pub seed: u64,
    pub bisection: Bisection,
    /// Test hook: shifts both income thresholds before verification.
    pub perturb_thresholds: Option<f64>,
}

impl Context {
    pub fn new(
        config: RunConfig,
        out: Option<PathBuf>,
        seed: Option<u64>,
        tol: Option<f64>,
    ) -> Result<Self, CliError> {
        let bisection = match tol {
            None => Bisection::default(),
            Some(t) if t > 0.0 && t < 1.0 => Bisection {
                x_tol: t,
                residual_tol: 10.0 * t,
                ..Bisection::default()
            },
            Some(t) => return Err(CliError::Config(format!("--tol {t} must lie in (0, 1)"))),
        };
        let out = out
            .or_else(|| config.out.clone())
            .unwrap_or_else(|| PathBuf::from("out"));
        Ok(Context {
            seed: seed.unwrap_or(config.verify.seed),
            config,
            out,
            bisection,
            perturb_thresholds: None,
        })
    }

    fn prepare_out(&self) -> Result<(), CliError> {
        fs::create_dir_all(&self.out)?;
        Ok(())
    }

    fn single(&self) -> Result<SingleQueueEquilibrium, CliError> {
        Ok(solve_single_queue(
            &self.config.distribution,
            self.config.rho,
            &self.bisection,
        )?)
    }

    /// System of a priority regime: solved when one coordinate is free,
    /// taken as given when all three are fixed.
    fn system(&self, command: &str) -> Result<(PrioritySystem, Option<PriorityEquilibrium>), CliError> {
        let RegimeSpec::Priority { c1, c2, p } = self.config.regime else {
            return Err(CliError::Config(format!("{command} needs a priority regime")));
        };
        let unknown = match (c1, c2, p) {
            (Some(c1), Some(c2), Some(p)) => return Ok((PrioritySystem::new(c1, c2, p)?, None)),
            (None, Some(c2), Some(p)) => Unknown::C1 { c2, p },
            (Some(c1), None, Some(p)) => Unknown::C2 { c1, p },
            (Some(c1), Some(c2), None) => Unknown::Price { c1, c2 },
            _ => {
                return Err(CliError::Config(
                    "priority regime needs at least two of c1, c2, p".into(),
                ))
            }
        };
        let cfg = &self.config;
        let eq = solve_priority(
            &cfg.distribution,
            &cfg.value_function,
            cfg.rho,
            unknown,
            &self.bisection,
        )?;
        Ok((eq.system, Some(eq)))
    }
}

fn threshold_json(t: &Threshold) -> Value {
    json!({ "kind": t.label(), "income": sig9(t.income()) })
}

fn system_json(s: &PrioritySystem) -> Value {
    json!({ "c1": sig9(s.c1()), "c2": sig9(s.c2()), "p": sig9(s.p()) })
}

pub fn solve_single(ctx: &Context) -> Result<String, CliError> {
    let eq = ctx.single()?;
    ctx.prepare_out()?;
    write_json(
        &ctx.out,
        "solve_single.json",
        &json!({
            "distribution": ctx.config.distribution.describe(),
            "rho": sig9(eq.rho),
            "c": sig9(eq.c),
            "residual": sig9(eq.residual),
            "iterations": eq.iterations,
        }),
    )?;
    Ok(format!(
        "c = {} (residual {}, {} iterations)",
        num(eq.c),
        num(eq.residual),
        eq.iterations
    ))
}

pub fn solve_priority_cmd(ctx: &Context) -> Result<String, CliError> {
    let (system, eq) = ctx.system("solve-priority")?;
    let Some(eq) = eq else {
        return Err(CliError::Config(
            "solve-priority needs exactly two of c1, c2, p fixed".into(),
        ));
    };
    let single = ctx.single()?;
    let cfg = &ctx.config;
    let thresholds = Thresholds::compute(&cfg.value_function, &system, single.c)?;
    let bands = income_band_masses(&cfg.distribution, &thresholds);
    ctx.prepare_out()?;
    write_json(
        &ctx.out,
        "solve_priority.json",
        &json!({
            "distribution": cfg.distribution.describe(),
            "value_function": cfg.value_function.name(),
            "rho": sig9(cfg.rho),
            "system": system_json(&system),
            "residual": sig9(eq.residual),
            "iterations": eq.iterations,
            "paid_mass": sig9(eq.mass.paid),
            "free_mass": sig9(eq.mass.free),
            "single_queue_c": sig9(single.c),
            "y_lower": threshold_json(&thresholds.y_lower),
            "y_upper": threshold_json(&thresholds.y_upper),
            "band_masses": {
                "low": sig9(bands.low),
                "middle": sig9(bands.middle),
                "high": sig9(bands.high),
            },
        }),
    )?;
    Ok(format!(
        "c1 = {}, c2 = {}, p = {} (paid mass {}, free mass {}); single queue c = {}",
        num(system.c1()),
        num(system.c2()),
        num(system.p()),
        num(eq.mass.paid),
        num(eq.mass.free),
        num(single.c)
    ))
}

pub fn sweep(ctx: &Context) -> Result<String, CliError> {
    let RegimeSpec::Sweep { c2, p } = &ctx.config.regime else {
        return Err(CliError::Config("sweep needs a sweep regime".into()));
    };
    let cfg = &ctx.config;
    let c = ctx.single()?.c;
    let grid: Vec<(f64, f64)> = c2.iter().flat_map(|&a| p.iter().map(move |&b| (a, b))).collect();
    let points = manifold_sweep(
        &cfg.distribution,
        &cfg.value_function,
        cfg.rho,
        &grid,
        &ctx.bisection,
    )?;

    let mut rows = Vec::with_capacity(points.len());
    let mut solved = 0;
    for pt in &points {
        let mut row = vec![num(pt.c2), num(pt.p)];
        match &pt.outcome {
            Ok(eq) => {
                solved += 1;
                let t = Thresholds::compute(&cfg.value_function, &eq.system, c)?;
                row.extend([
                    "solved".to_string(),
                    num(eq.system.c1()),
                    num(eq.residual),
                    num(eq.mass.paid),
                    num(eq.mass.free),
                    num(t.y_lower.income()),
                    num(t.y_upper.income()),
                    String::new(),
                    String::new(),
                ]);
            }
            Err(fasttrack_core::Error::Infeasible {
                min_mass, max_mass, ..
            }) => {
                row.push("infeasible".to_string());
                row.extend(std::iter::repeat_n(String::new(), 6));
                row.extend([num(*min_mass), num(*max_mass)]);
            }
            Err(e) => return Err(e.clone().into()),
        }
        rows.push(row);
    }
    ctx.prepare_out()?;
    write_csv(
        &ctx.out,
        "sweep.csv",
        &[
            "c2",
            "p",
            "status",
            "c1",
            "residual",
            "paid_mass",
            "free_mass",
            "y_lower",
            "y_upper",
            "min_mass",
            "max_mass",
        ],
        &rows,
    )?;
    if solved == 0 {
        return Err(CliError::Numerical(format!(
            "no sweep point clears rho = {}",
            cfg.rho
        )));
    }
    Ok(format!("{solved} of {} grid points solved", points.len()))
}

fn violation_rows(source: &str, violations: &[Violation]) -> Vec<Vec<String>> {
    violations
        .iter()
        .map(|v| {
            vec![
                source.to_string(),
                num(v.agent.y),
                num(v.agent.theta),
                v.band.name().to_string(),
                format!("{:?}", v.comparison),
                format!("{:?}", v.choice),
            ]
        })
        .collect()
}

pub fn verify(ctx: &Context) -> Result<String, CliError> {
    let cfg = &ctx.config;
    let (system, _) = ctx.system("verify")?;
    let c = ctx.single()?.c;
    let mut thresholds = Thresholds::compute(&cfg.value_function, &system, c)?;
    if let Some(d) = ctx.perturb_thresholds {
        let shift = |t: Threshold| Threshold::Interior((t.income() + d).clamp(0.0, 1.0));
        thresholds = Thresholds {
            y_lower: shift(thresholds.y_lower),
            y_upper: shift(thresholds.y_upper),
        };
    }
    let params = UtilityParams::default();
    let grid = fasttrack_core::welfare::verify_with_thresholds(
        cfg.verify.grid_n,
        &cfg.value_function,
        &params,
        c,
        &system,
        &thresholds,
    )?;
    let pop = sample_population(&cfg.distribution, cfg.verify.mc_n, ctx.seed)?;
    let mc = empirical_proposition1(&pop, &cfg.value_function, &params, c, &system, &thresholds);
    let sim = simulate_regime(&pop, &cfg.value_function, &params, &Regime::Priority(system));
    let analytic = clearing_split(&cfg.distribution, &cfg.value_function, &system)?.total();

    ctx.prepare_out()?;
    let rows: Vec<Vec<String>> = Band::ALL
        .iter()
        .map(|b| {
            let t = grid.band(*b);
            vec![
                b.name().to_string(),
                t.gain.to_string(),
                t.loss.to_string(),
                t.indifferent.to_string(),
            ]
        })
        .collect();
    write_csv(
        &ctx.out,
        "report.csv",
        &["band", "gain_count", "loss_count", "indiff_count"],
        &rows,
    )?;
    let mut vrows = violation_rows("grid", &grid.violations);
    vrows.extend(violation_rows("monte-carlo", &mc));
    write_csv(
        &ctx.out,
        "violations.csv",
        &["source", "y", "theta", "band", "comparison", "choice"],
        &vrows,
    )?;

    let passed = grid.passed() && mc.is_empty();
    let bands: serde_json::Map<String, Value> = Band::ALL
        .iter()
        .map(|b| {
            let t = grid.band(*b);
            (
                b.name().to_string(),
                json!({
                    "gain": t.gain,
                    "loss": t.loss,
                    "indifferent": t.indifferent,
                    "paid_while_losing": t.paid_while_losing,
                }),
            )
        })
        .collect();
    write_json(
        &ctx.out,
        "verify.json",
        &json!({
            "system": system_json(&system),
            "single_queue_c": sig9(c),
            "y_lower": threshold_json(&thresholds.y_lower),
            "y_upper": threshold_json(&thresholds.y_upper),
            "grid": {
                "resolution": grid.resolution,
                "excluded": grid.excluded,
                "bands": bands,
                "violations": grid.violations.len(),
            },
            "monte_carlo": {
                "n": pop.len(),
                "seed": ctx.seed,
                "violations": mc.len(),
                "served_fraction": sig9(sim.served_fraction),
                "standard_error": sig9(sim.standard_error),
                "analytic_mass": sig9(analytic),
            },
            "notices": grid.notices,
            "passed": passed,
        }),
    )?;
    let summary = format!(
        "{} grid and {} Monte Carlo violations",
        grid.violations.len(),
        mc.len()
    );
    if passed {
        Ok(summary)
    } else {
        Err(CliError::Verification(summary))
    }
}

fn simulation_json(name: &str, sim: &SimulationResult, expected: f64) -> Value {
    json!({
        "regime": name,
        "served_fraction": sig9(sim.served_fraction),
        "standard_error": sig9(sim.standard_error),
        "expected_mass": sig9(expected),
        "abstain": sim.counts.abstain,
        "free_queue": sim.counts.free_queue,
        "paid_queue": sim.counts.paid_queue,
    })
}

pub fn simulate(ctx: &Context) -> Result<String, CliError> {
    let cfg = &ctx.config;
    let params = UtilityParams::default();
    let single = ctx.single()?;
    let mut regimes = vec![("single", Regime::Single { c: single.c }, cfg.rho)];
    match cfg.regime {
        RegimeSpec::Single {} => {}
        RegimeSpec::Priority { .. } => {
            let (system, _) = ctx.system("simulate")?;
            let m = clearing_split(&cfg.distribution, &cfg.value_function, &system)?.total();
            regimes.push(("priority", Regime::Priority(system), m));
        }
        RegimeSpec::Sweep { .. } => {
            return Err(CliError::Config(
                "simulate needs a single or priority regime".into(),
            ))
        }
    }
    let pop = sample_population(&cfg.distribution, cfg.verify.mc_n, ctx.seed)?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut summary = Vec::new();
    for (name, regime, expected) in &regimes {
        let sim = simulate_regime(&pop, &cfg.value_function, &params, regime);
        for (k, d) in sim.deciles.iter().enumerate() {
            rows.push(vec![
                name.to_string(),
                k.to_string(),
                d.abstain.to_string(),
                d.free_queue.to_string(),
                d.paid_queue.to_string(),
            ]);
        }
        records.push(simulation_json(name, &sim, *expected));
        summary.push(format!("{name} served {}", num(sim.served_fraction)));
    }
    ctx.prepare_out()?;
    write_csv(
        &ctx.out,
        "simulation.csv",
        &["regime", "decile", "abstain", "free_queue", "paid_queue"],
        &rows,
    )?;
    write_json(
        &ctx.out,
        "simulation.json",
        &json!({
            "distribution": cfg.distribution.describe(),
            "n": pop.len(),
            "seed": ctx.seed,
            "regimes": records,
        }),
    )?;
    Ok(summary.join(", "))
}

pub fn emit_figure(ctx: &Context) -> Result<String, CliError> {
    let cfg = &ctx.config;
    let res = cfg.figure.resolution;
    let (geometry, extra): (RegionGeometry, Value) = match cfg.figure.fixture {
        Some(f) => {
            let boundary = PowerLawBoundary { scale: f.scale };
            let drawn = served_mass(&cfg.distribution, &boundary, f.c1)?;
            let extra = json!({
                "fixture": { "scale": sig9(f.scale), "c": sig9(f.c), "c1": sig9(f.c1) },
                "drawn_mass": sig9(drawn.total()),
                "rho": sig9(cfg.rho),
            });
            (region_geometry(&boundary, f.c1, f.c, res)?, extra)
        }
        None => {
            let (system, _) = ctx.system("emit-figure")?;
            let c = ctx.single()?.c;
            let extra = json!({ "system": system_json(&system), "single_queue_c": sig9(c) });
            (
                priority_region_geometry(&cfg.value_function, &system, c, res)?,
                extra,
            )
        }
    };
    if geometry.is_degenerate() {
        return Err(CliError::Numerical(geometry.notices.join("; ")));
    }
    let curves: Vec<Vec<String>> = geometry
        .curves
        .iter()
        .flat_map(|c| {
            c.samples
                .iter()
                .map(move |&(y, theta)| vec![c.id.to_string(), num(y), num(theta)])
        })
        .collect();
    let points: Vec<Vec<String>> = geometry
        .points
        .iter()
        .map(|p| vec![p.label.to_string(), num(p.theta), num(p.y)])
        .collect();
    ctx.prepare_out()?;
    write_csv(&ctx.out, "boundaries.csv", &["curve_id", "y", "theta"], &curves)?;
    write_csv(&ctx.out, "points.csv", &["label", "theta", "y"], &points)?;
    write_json(
        &ctx.out,
        "figure.json",
        &json!({ "parameters": extra, "notices": geometry.notices }),
    )?;
    Ok(format!("{} curve samples, {} points", curves.len(), points.len()))
}
