//! Experiment configuration files.
//!
//! One `key = value` pair per line; `#` starts a comment. The keys
//! `experiment` and `seed` are common to every experiment, the rest are
//! declared by the experiment itself (see [`crate::registry`]). Unset
//! parameters take the registry default, and the resolved map is echoed in
//! every report.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{CliError, CliResult};
use crate::registry::{lookup, Experiment};

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    experiment: &'static Experiment,
    seed: u64,
    values: BTreeMap<String, String>,
}

/// Raw `key = value` pairs in file order; duplicate keys are an error.
pub fn parse_pairs(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(CliError::Config(format!("line {}: empty key", lineno + 1)));
        }
        if out.iter().any(|(k, _)| *k == key) {
            return Err(CliError::Config(format!("line {}: duplicate key {key:?}", lineno + 1)));
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

impl ExperimentConfig {
    /// Builds a config from pairs. `experiment` may come from the pairs or
    /// from `name`; when both are present they must agree.
    pub fn from_pairs(name: Option<&str>, pairs: Vec<(String, String)>) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        let mut file_name = None;
        let mut seed = 0u64;
        for (key, value) in pairs {
            match key.as_str() {
                "experiment" => file_name = Some(value),
                "seed" => {
                    seed = value
                        .parse()
                        .map_err(|_| CliError::Config(format!("seed must be a 64-bit unsigned integer, got {value:?}")))?
                }
                _ => {
                    values.insert(key, value);
                }
            }
        }
        let name = match (name, file_name.as_deref()) {
            (Some(a), Some(b)) if a != b => {
                return Err(CliError::Config(format!("command names {a:?} but the config names {b:?}")));
            }
            (Some(a), _) => a.to_string(),
            (None, Some(b)) => b.to_string(),
            (None, None) => return Err(CliError::Config("no experiment named".into())),
        };
        let experiment = lookup(&name)?;
        for key in values.keys() {
            if !experiment.params.iter().any(|p| p.key == key) {
                let known: Vec<&str> = experiment.params.iter().map(|p| p.key).collect();
                return Err(CliError::Config(format!(
                    "{} has no parameter {key:?}; known: {}",
                    experiment.name,
                    known.join(", ")
                )));
            }
        }
        for p in experiment.params {
            values.entry(p.key.to_string()).or_insert_with(|| p.default.to_string());
        }
        let config = Self { experiment, seed, values };
        config.validate()?;
        Ok(config)
    }

    pub fn parse(name: Option<&str>, text: &str) -> CliResult<Self> {
        Self::from_pairs(name, parse_pairs(text)?)
    }

    pub fn load(name: Option<&str>, path: impl AsRef<Path>) -> CliResult<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        Self::parse(name, &text)
    }

    /// The registry defaults alone.
    pub fn defaults(name: &str) -> CliResult<Self> {
        Self::from_pairs(Some(name), Vec::new())
    }

    pub fn experiment(&self) -> &'static Experiment {
        self.experiment
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Overrides one parameter, as from the command line.
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        match key {
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| CliError::Config(format!("seed must be a 64-bit unsigned integer, got {value:?}")))?;
                return Ok(());
            }
            "experiment" => return Err(CliError::Config("the experiment cannot be overridden".into())),
            _ => {}
        }
        if !self.values.contains_key(key) {
            return Err(CliError::Config(format!("{} has no parameter {key:?}", self.experiment.name)));
        }
        let old = self.values.insert(key.to_string(), value.to_string());
        let checked = self.validate();
        if checked.is_err() {
            self.values.insert(key.to_string(), old.unwrap_or_default());
        }
        checked
    }

    /// Resolved parameters, including `experiment` and `seed`.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut out = self.values.clone();
        out.insert("experiment".into(), self.experiment.name.into());
        out.insert("seed".into(), self.seed.to_string());
        out
    }

    /// Every parameter declared numeric must parse and be positive.
    fn validate(&self) -> CliResult<()> {
        for p in self.experiment.params {
            match p.kind {
                ParamKind::Count => {
                    self.count(p.key)?;
                }
                ParamKind::Real => {
                    self.real(p.key)?;
                }
                ParamKind::Counts => {
                    self.counts(p.key)?;
                }
                ParamKind::Reals => {
                    self.reals(p.key)?;
                }
                ParamKind::Text => {}
            }
        }
        Ok(())
    }

    fn raw(&self, key: &str) -> CliResult<&str> {
        self.values
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| CliError::Config(format!("missing parameter {key:?}")))
    }

    pub fn text(&self, key: &str) -> CliResult<String> {
        self.raw(key).map(str::to_string)
    }

    pub fn count(&self, key: &str) -> CliResult<usize> {
        parse_count(key, self.raw(key)?)
    }

    pub fn real(&self, key: &str) -> CliResult<f64> {
        parse_real(key, self.raw(key)?)
    }

    pub fn counts(&self, key: &str) -> CliResult<Vec<usize>> {
        list(self.raw(key)?).map(|v| parse_count(key, v)).collect()
    }

    pub fn reals(&self, key: &str) -> CliResult<Vec<f64>> {
        list(self.raw(key)?).map(|v| parse_real(key, v)).collect()
    }
}

fn list(raw: &str) -> impl Iterator<Item = &str> {
    raw.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_count(key: &str, raw: &str) -> CliResult<usize> {
    match raw.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(CliError::Config(format!("{key} must be a positive integer, got {raw:?}"))),
    }
}

fn parse_real(key: &str, raw: &str) -> CliResult<f64> {
    let v = match raw {
        "pi" => std::f64::consts::PI,
        _ => raw
            .parse::<f64>()
            .map_err(|_| CliError::Config(format!("{key} must be a positive number, got {raw:?}")))?,
    };
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{key} must be a positive number, got {raw:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    Count,
    Real,
    Counts,
    Reals,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Param {
    pub key: &'static str,
    pub default: &'static str,
    pub kind: ParamKind,
    pub help: &'static str,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_defaults() {
        let c = ExperimentConfig::parse(None, "# run\nexperiment = kp-growth\nseed = 9 # trailing\nn_list = 4, 8\n").unwrap();
        assert_eq!(c.seed(), 9);
        assert_eq!(c.counts("n_list").unwrap(), vec![4, 8]);
        assert!(c.echo().contains_key("r2_min"));
        assert_eq!(c.echo()["experiment"], "kp-growth");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ExperimentConfig::parse(None, "seed = 1").is_err());
        assert!(ExperimentConfig::parse(Some("kp-growth"), "experiment = isometry").is_err());
        assert!(ExperimentConfig::parse(Some("kp-growth"), "n_list = 4, -8").is_err());
        assert!(ExperimentConfig::parse(Some("kp-growth"), "r2_min = 0").is_err());
        assert!(ExperimentConfig::parse(Some("kp-growth"), "colour = red").is_err());
        assert!(ExperimentConfig::parse(Some("kp-growth"), "a = 1\na = 2").is_err());
        assert!(ExperimentConfig::parse(Some("kp-growth"), "no equals sign").is_err());
        let mut c = ExperimentConfig::defaults("kp-growth").unwrap();
        assert!(c.set("n_list", "0").is_err());
        c.set("seed", "3").unwrap();
        assert_eq!(c.seed(), 3);
    }
}
