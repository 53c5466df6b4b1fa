use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

/// Flat JSON mirror of the command-line flags. Flags win over file values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub period: Option<usize>,
    pub depth: Option<usize>,
    pub epsilon: Option<f64>,
    pub coeffs: Option<Vec<f64>>,
    pub coeffs_file: Option<PathBuf>,
    pub method: Option<MarginMethodArg>,
    pub mu: Option<f64>,
    pub roots: Option<bool>,
    pub map: Option<MapArg>,
    pub param: Option<f64>,
    pub perturb: Option<f64>,
    pub steps: Option<usize>,
    pub tol: Option<f64>,
    pub cycle_index: Option<usize>,
    pub out: Option<PathBuf>,
    pub suite: Option<Suite>,
    pub max_depth: Option<usize>,
    pub seed: Option<u64>,
    pub depths: Option<String>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let config: Self = serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        let scalars = [
            ("epsilon", self.epsilon),
            ("mu", self.mu),
            ("param", self.param),
            ("perturb", self.perturb),
            ("tol", self.tol),
        ];
        for (name, value) in scalars {
            if value.is_some_and(|v| !v.is_finite()) {
                bail!("config field {name} must be finite");
            }
        }
        if self.coeffs.as_ref().is_some_and(|a| a.iter().any(|v| !v.is_finite())) {
            bail!("config field coeffs must be finite");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MarginMethodArg {
    Closed,
    Curve,
    Bisect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MapArg {
    Logistic,
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Thm5,
    Thm6,
    Lemma2,
    Lemma3,
    Jacobian,
    Interval,
    All,
}
