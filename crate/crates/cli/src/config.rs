//! TOML run configuration.

use std::path::{Path, PathBuf};

use fasttrack_core::model::{JointDistribution, ValueFunction};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub rho: f64,
    #[serde(default = "uniform")]
    pub distribution: JointDistribution,
    #[serde(default = "sqrt")]
    pub value_function: ValueFunction,
    #[serde(default)]
    pub regime: RegimeSpec,
    #[serde(default)]
    pub verify: VerifyOptions,
    #[serde(default)]
    pub figure: FigureOptions,
    /// Output directory, overridden by `--out`.
    pub out: Option<PathBuf>,
}

fn uniform() -> JointDistribution {
    JointDistribution::IndependentUniform
}

fn sqrt() -> ValueFunction {
    ValueFunction::Sqrt
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RegimeSpec {
    Single {},
    /// Two coordinates fixed and the third solved, or all three fixed.
    Priority {
        c1: Option<f64>,
        c2: Option<f64>,
        p: Option<f64>,
    },
    /// `c1` solved on the grid `c2 x p`.
    Sweep {
        c2: Vec<f64>,
        p: Vec<f64>,
    },
}

impl Default for RegimeSpec {
    fn default() -> Self {
        RegimeSpec::Single {}
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyOptions {
    #[serde(default = "VerifyOptions::default_grid")]
    pub grid_n: usize,
    #[serde(default = "VerifyOptions::default_mc")]
    pub mc_n: usize,
    #[serde(default)]
    pub seed: u64,
}

impl VerifyOptions {
    fn default_grid() -> usize {
        200
    }

    fn default_mc() -> usize {
        1_000_000
    }
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            grid_n: Self::default_grid(),
            mc_n: Self::default_mc(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureOptions {
    #[serde(default = "FigureOptions::default_resolution")]
    pub resolution: usize,
    pub fixture: Option<FigureFixture>,
}

impl FigureOptions {
    fn default_resolution() -> usize {
        201
    }
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions {
            resolution: Self::default_resolution(),
            fixture: None,
        }
    }
}

/// Explicit figure boundary `y = scale / theta^2` with given `c` and `c1`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureFixture {
    pub scale: f64,
    pub c: f64,
    pub c1: f64,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Range checks that do not need a solver.
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(CliError::Config(format!(
                "capacity rho = {} must lie in (0, 1)",
                self.rho
            )));
        }
        self.distribution.validate()?;
        self.value_function.validate()?;
        match &self.regime {
            RegimeSpec::Single {} => {}
            RegimeSpec::Priority { c1, c2, p } => {
                let fixed = [c1, c2, p].iter().filter(|x| x.is_some()).count();
                if fixed < 2 {
                    return Err(CliError::Config(
                        "priority regime needs at least two of c1, c2, p".into(),
                    ));
                }
                for (name, x) in [("c1", c1), ("c2", c2), ("p", p)] {
                    if let Some(x) = x {
                        unit(name, *x)?;
                    }
                }
                if let (Some(c1), Some(c2)) = (c1, c2) {
                    if c2 >= c1 {
                        return Err(CliError::Config(format!(
                            "degenerate system: c2 = {c2} must be below c1 = {c1}"
                        )));
                    }
                }
            }
            RegimeSpec::Sweep { c2, p } => {
                if c2.is_empty() || p.is_empty() {
                    return Err(CliError::Config("sweep grid is empty".into()));
                }
                for x in c2 {
                    unit("c2", *x)?;
                }
                for x in p {
                    unit("p", *x)?;
                }
            }
        }
        if self.verify.grid_n < 2 {
            return Err(CliError::Config(format!(
                "verify.grid_n = {} must be at least 2",
                self.verify.grid_n
            )));
        }
        if self.verify.mc_n == 0 {
            return Err(CliError::Config("verify.mc_n must be positive".into()));
        }
        if self.figure.resolution < 2 {
            return Err(CliError::Config(format!(
                "figure.resolution = {} must be at least 2",
                self.figure.resolution
            )));
        }
        if let Some(f) = &self.figure.fixture {
            if f.scale.is_nan() || f.scale <= 0.0 {
                return Err(CliError::Config(format!(
                    "figure.fixture.scale = {} must be positive",
                    f.scale
                )));
            }
            unit("figure.fixture.c", f.c)?;
            unit("figure.fixture.c1", f.c1)?;
        }
        Ok(())
    }
}

fn unit(name: &str, x: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} = {x} must lie in [0, 1]")))
    }
}
