//! Experiment configuration: a flat `key = value` file, any key of which can
//! be overridden from the command line.
//!
//! Keys: `ensemble`, `theta`, `kappa1`, `kappa2`, `d`, `n`, `beta`, `replicas`,
//! `seed`, `statistic`, `checks` (comma separated), `out`. Lines starting with
//! `#` are comments.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use betaens::EnsembleSpec;
use serde::Serialize;

use crate::error::{io_error, HarnessError, Result};

/// Per-replica statistic written to the CSV and summarised in the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    /// ℒ_n
    LogDensity,
    /// Y_n = ℒ_n + nE_β
    CenteredY,
    /// Y_n / (σ_β √n)
    NormalizedY,
    /// (2/n)[½ΣV(λ_k) − (1/(n−1))Σ_{j<k} log|λ_j − λ_k|]
    PopescuEnergy,
}

impl FromStr for Statistic {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "log-density" => Statistic::LogDensity,
            "centered-y" => Statistic::CenteredY,
            "normalized-y" => Statistic::NormalizedY,
            "popescu-energy" => Statistic::PopescuEnergy,
            _ => {
                return Err(HarnessError::Config(format!(
                    "unknown statistic '{s}' (expected log-density, centered-y, normalized-y or popescu-energy)"
                )))
            }
        })
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statistic::LogDensity => "log-density",
            Statistic::CenteredY => "centered-y",
            Statistic::NormalizedY => "normalized-y",
            Statistic::PopescuEnergy => "popescu-energy",
        })
    }
}

/// Names accepted in `checks`.
pub const CHECK_REGISTRY: [&str; 7] = ["mean", "variance", "third-cumulant", "cgf", "ks", "ks-bound", "popescu"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub spec: EnsembleSpec,
    pub beta: f64,
    pub n: usize,
    pub replicas: u64,
    pub seed: u64,
    pub statistic: Statistic,
    /// Empty means every check that applies.
    pub checks: Vec<String>,
    #[serde(skip)]
    pub output_path: Option<PathBuf>,
}

/// Unvalidated key/value settings, in the order they were given.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: Vec<(String, String)>,
}

const KEYS: [&str; 12] =
    ["ensemble", "theta", "kappa1", "kappa2", "d", "n", "beta", "replicas", "seed", "statistic", "checks", "out"];

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("line {}: expected key = value", lineno + 1)))?;
            raw.set(k.trim(), v.trim())?;
        }
        Ok(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        Self::parse(&text)
    }

    /// Later values win.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(HarnessError::Config(format!("unknown key '{key}'")));
        }
        self.entries.retain(|(k, _)| k != key);
        self.entries.push((key.to_string(), value.to_string()));
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn number<T: FromStr>(&self, key: &str, default: Option<T>) -> Result<T> {
        match self.get(key) {
            Some(v) => v.parse().map_err(|_| HarnessError::Config(format!("{key}: cannot parse '{v}'"))),
            None => default.ok_or_else(|| HarnessError::Config(format!("missing required key '{key}'"))),
        }
    }

    pub fn spec(&self) -> Result<EnsembleSpec> {
        let name =
            self.get("ensemble").ok_or_else(|| HarnessError::Config("missing required key 'ensemble'".into()))?;
        parse_spec(
            name,
            self.number("theta", Some(1.0))?,
            self.number("kappa1", Some(1.0))?,
            self.number("kappa2", Some(1.0))?,
            self.number("d", Some(1.0))?,
        )
    }

    pub fn into_experiment(self) -> Result<ExperimentConfig> {
        let spec = self.spec()?;
        let beta: f64 = self.number("beta", Some(2.0))?;
        let n: usize = self.number("n", None)?;
        let replicas: u64 = self.number("replicas", Some(1000))?;
        let seed: u64 = self.number("seed", Some(0))?;
        let statistic = match self.get("statistic") {
            Some(s) => s.parse()?,
            None => Statistic::LogDensity,
        };
        let checks = match self.get("checks") {
            Some(s) => s.split(',').map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect(),
            None => Vec::new(),
        };
        let config = ExperimentConfig {
            spec,
            beta,
            n,
            replicas,
            seed,
            statistic,
            checks,
            output_path: self.get("out").map(PathBuf::from),
        };
        config.validate()?;
        Ok(config)
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicas < 2 {
            return Err(HarnessError::Config("replicas must be at least 2".into()));
        }
        if self.n < 1 {
            return Err(HarnessError::Config("n must be at least 1".into()));
        }
        if self.statistic == Statistic::PopescuEnergy && self.n < 2 {
            return Err(HarnessError::Config("popescu-energy needs n >= 2".into()));
        }
        betaens::BetaParam::new(self.beta)?;
        for c in &self.checks {
            if !CHECK_REGISTRY.contains(&c.as_str()) {
                return Err(HarnessError::Config(format!(
                    "unknown check '{c}' (known: {})",
                    CHECK_REGISTRY.join(", ")
                )));
            }
        }
        Ok(())
    }
}

pub fn parse_spec(name: &str, theta: f64, kappa1: f64, kappa2: f64, d: f64) -> Result<EnsembleSpec> {
    Ok(match name {
        "hermite" => EnsembleSpec::Hermite,
        "laguerre" => EnsembleSpec::laguerre(theta)?,
        "jacobi" => EnsembleSpec::jacobi(kappa1, kappa2)?,
        "cauchy" => EnsembleSpec::cauchy(d)?,
        "circular" => EnsembleSpec::Circular,
        "circular-jacobi" => EnsembleSpec::circular_jacobi(d)?,
        _ => {
            return Err(HarnessError::Config(format!(
                "unknown ensemble '{name}' (expected hermite, laguerre, jacobi, cauchy, circular or circular-jacobi)"
            )))
        }
    })
}
