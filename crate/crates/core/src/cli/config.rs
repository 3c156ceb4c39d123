//! Experiment configuration: flat `key = value` lines grouped under
//! `[section]` headers, `#` comments.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exponents::{HypothesisError, MediumParams};
use crate::solver::{Boundary, SolverConfig};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing key `{0}`")]
    Missing(String),
    #[error("key `{key}`: {message}")]
    Value { key: String, message: String },
    #[error("unknown key `{0}`")]
    Unknown(String),
    #[error("key `params.m`: {0}")]
    Hypothesis(#[from] HypothesisError),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Initial data of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InitialSpec {
    /// Plateau of mass `mass` and height `height` centered at `center`,
    /// supported in `Q(radius)`.
    Plateau {
        mass: f64,
        height: f64,
        radius: f64,
        center: Vec<f64>,
    },
    /// Isotropic Barenblatt solution of exponent `m` and mass `mass` at `t = 1`.
    Barenblatt { m: f64, mass: f64 },
    /// Field CSV on disk.
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExperimentSpec {
    Evolve { t_end: f64, checkpoints: Vec<f64> },
    Profile { mass: f64, tau_max: f64 },
    Verify { checks: Vec<String>, cases: usize },
    Asymptotics { t_window: f64, checkpoints: usize },
}

impl ExperimentSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Evolve { .. } => "evolve",
            Self::Profile { .. } => "profile",
            Self::Verify { .. } => "verify",
            Self::Asymptotics { .. } => "asymptotics",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: Vec<f64>,
    pub cells: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub m: Vec<f64>,
    pub grid: GridSpec,
    pub solver: SolverConfig,
    pub initial: InitialSpec,
    pub experiment: ExperimentSpec,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn params(&self) -> Result<MediumParams, HypothesisError> {
        MediumParams::new(self.m.clone())
    }

    /// Reads and validates a config file; relative paths inside it resolve
    /// against the file's directory.
    pub fn load(path: &Path) -> Result<(Self, String), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let cfg = Self::parse_in(&text, base)?;
        Ok((cfg, text))
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Self::parse_in(text, Path::new("."))
    }

    fn parse_in(text: &str, base: &Path) -> Result<Self, ConfigError> {
        let mut t = Table::parse(text)?;
        let name = t.take("name").unwrap_or_else(|| "experiment".to_string());
        let output_dir = base.join(
            t.take("output_dir")
                .unwrap_or_else(|| format!("out/{name}")),
        );
        let seed = t.opt("seed", 0u64)?;

        let m: Vec<f64> = t.list("params.m")?;
        MediumParams::new(m.clone())?;
        let dim = m.len();

        let grid = GridSpec {
            half_width: t.per_axis("grid.half_width", dim, Some(4.0))?,
            cells: t.per_axis("grid.cells", dim, Some(64))?,
        };

        let defaults = SolverConfig::default();
        let epsilon = t.opt("solver.epsilon", defaults.epsilon)?;
        let boundary = match t.take("solver.boundary").as_deref() {
            None if epsilon > 0.0 => Boundary::Lift,
            None | Some("zero") => Boundary::Zero,
            Some("lift") => Boundary::Lift,
            Some(other) => {
                return Err(ConfigError::Value {
                    key: "solver.boundary".into(),
                    message: format!("expected zero or lift, got {other:?}"),
                })
            }
        };
        let solver = SolverConfig {
            epsilon,
            cfl_safety: t.opt("solver.cfl", defaults.cfl_safety)?,
            boundary,
            max_dt: t.maybe("solver.max_dt")?,
        };
        solver.validate().map_err(|e| ConfigError::Value {
            key: "solver".into(),
            message: e.to_string(),
        })?;

        let initial = parse_initial(&mut t, dim, base)?;
        let experiment = parse_experiment(&mut t)?;
        t.finish()?;
        Ok(Self {
            name,
            m,
            grid,
            solver,
            initial,
            experiment,
            output_dir,
            seed,
        })
    }
}

fn parse_initial(t: &mut Table, dim: usize, base: &Path) -> Result<InitialSpec, ConfigError> {
    let key = "initial.data";
    let raw = t.take(key).unwrap_or_else(|| "plateau 1 1 1".to_string());
    let words: Vec<&str> = raw.split_whitespace().collect();
    let num = |i: usize| -> Result<f64, ConfigError> {
        words
            .get(i)
            .ok_or_else(|| value_err(key, format!("`{}` needs more arguments", words[0])))?
            .parse()
            .map_err(|_| value_err(key, format!("bad number {:?}", words[i])))
    };
    let spec = match words.first().copied() {
        Some("plateau") if words.len() == 4 => InitialSpec::Plateau {
            mass: num(1)?,
            height: num(2)?,
            radius: num(3)?,
            center: vec![0.0; dim],
        },
        Some("barenblatt") if words.len() == 3 => InitialSpec::Barenblatt {
            m: num(1)?,
            mass: num(2)?,
        },
        Some("file") if words.len() == 2 => {
            let path = base.join(words[1]);
            if !path.is_file() {
                return Err(value_err(
                    key,
                    format!("file {} does not exist", path.display()),
                ));
            }
            InitialSpec::File { path }
        }
        _ => {
            return Err(value_err(
                key,
                format!("expected `plateau M L R`, `barenblatt m M` or `file <path>`, got {raw:?}"),
            ))
        }
    };
    let spec = match spec {
        InitialSpec::Plateau {
            mass,
            height,
            radius,
            ..
        } => InitialSpec::Plateau {
            mass,
            height,
            radius,
            center: t.per_axis("initial.center", dim, Some(0.0))?,
        },
        other => other,
    };
    Ok(spec)
}

fn parse_experiment(t: &mut Table) -> Result<ExperimentSpec, ConfigError> {
    let kind = t
        .take("experiment.kind")
        .ok_or_else(|| ConfigError::Missing("experiment.kind".into()))?;
    Ok(match kind.as_str() {
        "evolve" => {
            let t_end: f64 = t.require("experiment.t_end")?;
            let checkpoints = match t.maybe_list("experiment.checkpoints")? {
                Some(c) => c,
                None => vec![t_end],
            };
            ExperimentSpec::Evolve { t_end, checkpoints }
        }
        "profile" => ExperimentSpec::Profile {
            mass: t.opt("experiment.mass", 1.0)?,
            tau_max: t.opt("experiment.tau_max", 40.0)?,
        },
        "verify" => ExperimentSpec::Verify {
            checks: match t.take("experiment.checks") {
                None => crate::cli::verify::ALL_CHECKS
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
                Some(s) => s.split(',').map(|c| c.trim().to_string()).collect(),
            },
            cases: t.opt("experiment.cases", 100usize)?,
        },
        "asymptotics" => ExperimentSpec::Asymptotics {
            t_window: t.opt("experiment.t_window", 6.0)?,
            checkpoints: t.opt("experiment.checkpoints", 25usize)?,
        },
        other => {
            return Err(value_err(
                "experiment.kind",
                format!("expected evolve, profile, verify or asymptotics, got {other:?}"),
            ))
        }
    })
}

fn value_err(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Value {
        key: key.to_string(),
        message: message.into(),
    }
}

/// Raw `section.key -> value` pairs; every key must be consumed.
struct Table {
    entries: BTreeMap<String, String>,
}

impl Table {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: String| ConfigError::Syntax {
                line: i + 1,
                message,
            };
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| syntax(format!("unterminated section header {line:?}")))?;
                section = name.trim().to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| syntax(format!("expected key = value, got {line:?}")))?;
            let key = if section.is_empty() {
                k.trim().to_string()
            } else {
                format!("{section}.{}", k.trim())
            };
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(syntax(format!("duplicate key `{key}`")));
            }
        }
        Ok(Self { entries })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    fn maybe<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>, ConfigError> {
        self.take(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| value_err(key, format!("cannot parse {v:?}")))
            })
            .transpose()
    }

    fn opt<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T, ConfigError> {
        Ok(self.maybe(key)?.unwrap_or(default))
    }

    fn require<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, ConfigError> {
        self.maybe(key)?
            .ok_or_else(|| ConfigError::Missing(key.to_string()))
    }

    fn maybe_list<T: std::str::FromStr>(
        &mut self,
        key: &str,
    ) -> Result<Option<Vec<T>>, ConfigError> {
        self.take(key)
            .map(|v| {
                v.split(',')
                    .map(|x| {
                        x.trim().parse().map_err(|_| {
                            value_err(key, format!("cannot parse entry {:?}", x.trim()))
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    fn list<T: std::str::FromStr>(&mut self, key: &str) -> Result<Vec<T>, ConfigError> {
        self.maybe_list(key)?
            .ok_or_else(|| ConfigError::Missing(key.to_string()))
    }

    /// One value for every axis, or `dim` comma-separated values.
    fn per_axis<T: std::str::FromStr + Clone>(
        &mut self,
        key: &str,
        dim: usize,
        default: Option<T>,
    ) -> Result<Vec<T>, ConfigError> {
        match self.maybe_list::<T>(key)? {
            Some(v) if v.len() == 1 => Ok(vec![v[0].clone(); dim]),
            Some(v) if v.len() == dim => Ok(v),
            Some(v) => Err(value_err(
                key,
                format!("expected 1 or {dim} entries, got {}", v.len()),
            )),
            None => default
                .map(|d| vec![d; dim])
                .ok_or_else(|| ConfigError::Missing(key.to_string())),
        }
    }

    fn finish(self) -> Result<(), ConfigError> {
        match self.entries.into_keys().next() {
            Some(key) => Err(ConfigError::Unknown(key)),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "\
name = demo
seed = 3

[params]
m = 2, 3

[grid]
half_width = 3
cells = 32, 48

[initial]
data = plateau 1 1 1   # mass, height, radius

[experiment]
kind = evolve
t_end = 4
checkpoints = 1, 2, 4
";

    #[test]
    fn parses_example() {
        let c = ExperimentConfig::parse(EXAMPLE).unwrap();
        assert_eq!(c.name, "demo");
        assert_eq!(c.seed, 3);
        assert_eq!(c.m, vec![2.0, 3.0]);
        assert_eq!(c.grid.half_width, vec![3.0, 3.0]);
        assert_eq!(c.grid.cells, vec![32, 48]);
        assert_eq!(
            c.experiment,
            ExperimentSpec::Evolve {
                t_end: 4.0,
                checkpoints: vec![1.0, 2.0, 4.0]
            }
        );
        assert!(matches!(c.initial, InitialSpec::Plateau { mass, .. } if mass == 1.0));
    }

    #[test]
    fn errors_name_the_key() {
        let text = EXAMPLE.replace("t_end = 4", "t_end = soon");
        let err = ExperimentConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("experiment.t_end"), "{err}");

        let text = EXAMPLE.replace("cells = 32, 48", "cells = 32, 48, 8");
        let err = ExperimentConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("grid.cells"), "{err}");

        let text = format!("{EXAMPLE}colour = red\n");
        let err = ExperimentConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("experiment.colour"), "{err}");
    }

    #[test]
    fn hypothesis_violation_cites_h1() {
        let text = EXAMPLE.replace("m = 2, 3", "m = 0.9, 2");
        let err = ExperimentConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("H1"), "{err}");
    }

    #[test]
    fn missing_file_is_rejected() {
        let text = EXAMPLE.replace("plateau 1 1 1", "file /nonexistent/u0.csv");
        let err = ExperimentConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("initial.data"), "{err}");
    }
}
