//! Command-line flags, the optional JSON config file, and their merge.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use goe_charpoly::estimators::QuantitySpec;
use serde::{Deserialize, Serialize};

use crate::UsageError;

#[derive(Parser, Debug)]
#[command(name = "goe-charpoly", version, about = "Averages of half-integer powers of GOE characteristic polynomials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Monte Carlo estimate of a preset quantity.
    Estimate(Flags),
    /// Closed-form large-N value of a preset quantity.
    Eval(Flags),
    /// Exact or integral-representation value of a preset quantity.
    Oracle(Flags),
    /// Run a named verification suite.
    Verify(Flags),
    /// Dump sampled GOE spectra.
    SampleSpectra(Flags),
}

#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// Preset or suite name (same as --preset).
    pub name: Option<String>,
    #[arg(long)]
    pub preset: Option<String>,
    /// JSON config file; flags win over its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "E", allow_negative_numbers = true)]
    pub e: Option<f64>,
    #[arg(long = "J", allow_negative_numbers = true)]
    pub j: Option<f64>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long = "omega-f", num_args = 1.., allow_negative_numbers = true)]
    pub omega_f: Option<Vec<f64>>,
    #[arg(long = "omega-b", num_args = 1.., allow_negative_numbers = true)]
    pub omega_b: Option<Vec<f64>>,
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    pub x: Option<Vec<f64>>,
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    pub gamma: Option<Vec<f64>>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, env = "GOE_CHARPOLY_WORKERS")]
    pub workers: Option<usize>,
    /// Override of the suite's primary tolerance; always echoed.
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Oracle route for c12.
    #[arg(long, value_enum)]
    pub route: Option<Route>,
    /// Output path prefix: writes PREFIX.json and PREFIX[_name].csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Exact,
    Alt,
}

/// What a config file may name as the quantity.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuantityChoice {
    Preset(String),
    Spec(QuantitySpec),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    quantity: Option<QuantityChoice>,
    #[serde(rename = "E")]
    e: Option<f64>,
    #[serde(rename = "J")]
    j: Option<f64>,
    #[serde(rename = "N")]
    n: Option<usize>,
    omega_f: Option<Vec<f64>>,
    omega_b: Option<Vec<f64>>,
    x: Option<Vec<f64>>,
    gamma: Option<Vec<f64>>,
    samples: Option<u64>,
    seed: Option<u64>,
    workers: Option<usize>,
    tol: Option<f64>,
    route: Option<Route>,
    out: Option<PathBuf>,
}

/// Fully merged configuration for one command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub quantity: Option<QuantityChoice>,
    pub e: Option<f64>,
    pub j: Option<f64>,
    pub n: Option<usize>,
    pub omega_f: Option<Vec<f64>>,
    pub omega_b: Option<Vec<f64>>,
    pub x: Option<Vec<f64>>,
    pub gamma: Option<Vec<f64>>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub tol: Option<f64>,
    pub route: Option<Route>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_flags(flags: Flags) -> Result<Self, UsageError> {
        let file = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| UsageError::new("config", format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<ConfigFile>(&text).map_err(|e| UsageError::new("config", e.to_string()))?
            }
            None => ConfigFile::default(),
        };
        let name = match (flags.name, flags.preset) {
            (Some(a), Some(b)) if a != b => {
                return Err(UsageError::new("preset", format!("positional name {a:?} conflicts with --preset {b:?}")))
            }
            (a, b) => a.or(b),
        };
        let cfg = Self {
            quantity: name.map(QuantityChoice::Preset).or(file.quantity),
            e: flags.e.or(file.e),
            j: flags.j.or(file.j),
            n: flags.n.or(file.n),
            omega_f: flags.omega_f.or(file.omega_f),
            omega_b: flags.omega_b.or(file.omega_b),
            x: flags.x.or(file.x),
            gamma: flags.gamma.or(file.gamma),
            samples: flags.samples.or(file.samples),
            seed: flags.seed.or(file.seed),
            workers: flags.workers.or(file.workers),
            tol: flags.tol.or(file.tol),
            route: flags.route.or(file.route),
            out: flags.out.or(file.out),
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), UsageError> {
        let finite = |name: &'static str, v: Option<f64>| match v {
            Some(x) if !x.is_finite() => Err(UsageError::new(name, format!("{x} is not a finite number"))),
            _ => Ok(()),
        };
        finite("E", self.e)?;
        finite("tol", self.tol)?;
        if let Some(j) = self.j {
            if !(j > 0.0 && j.is_finite()) {
                return Err(UsageError::new("J", format!("{j} must be positive")));
            }
        }
        if self.n == Some(0) {
            return Err(UsageError::new("N", "must be at least 1"));
        }
        if let Some(t) = self.tol {
            if t <= 0.0 {
                return Err(UsageError::new("tol", format!("{t} must be positive")));
            }
        }
        if self.samples.is_some_and(|s| s < 2) {
            return Err(UsageError::new("samples", "need at least 2 samples"));
        }
        if self.workers == Some(0) {
            return Err(UsageError::new("workers", "must be at least 1"));
        }
        for (name, list) in [("omega-f", &self.omega_f), ("omega-b", &self.omega_b), ("x", &self.x), ("gamma", &self.gamma)] {
            if let Some(v) = list {
                if let Some(bad) = v.iter().find(|w| !w.is_finite()) {
                    return Err(UsageError::new(name, format!("{bad} is not a finite number")));
                }
            }
        }
        Ok(())
    }

    pub fn preset(&self) -> Result<&str, UsageError> {
        match &self.quantity {
            Some(QuantityChoice::Preset(p)) => Ok(p),
            Some(QuantityChoice::Spec(_)) => Err(UsageError::new("quantity", "this command needs a named preset")),
            None => Err(UsageError::new("preset", "missing preset name")),
        }
    }

    pub fn e(&self) -> f64 {
        self.e.unwrap_or(0.0)
    }

    pub fn j(&self) -> f64 {
        self.j.unwrap_or(1.0)
    }

    pub fn n_or(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }

    pub fn omega_f(&self) -> &[f64] {
        self.omega_f.as_deref().unwrap_or(&[])
    }

    pub fn omega_b(&self) -> &[f64] {
        self.omega_b.as_deref().unwrap_or(&[])
    }

    /// A list flag that must hold exactly `len` values.
    pub fn exact<'a>(&self, name: &'static str, list: &'a Option<Vec<f64>>, len: usize) -> Result<&'a [f64], UsageError> {
        match list {
            Some(v) if v.len() == len => Ok(v),
            Some(v) => Err(UsageError::new(name, format!("expected {len} value(s), got {}", v.len()))),
            None => Err(UsageError::new(name, format!("missing; expected {len} value(s)"))),
        }
    }
}
