use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tailforge::{PerturbationChoice, Tolerances};

/// Reads a TOML file, or JSON when the extension is `.json`. Unknown keys are
/// rejected by the target types.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let parsed = if is_json(path) {
        serde_json::from_str(&text).map_err(anyhow::Error::from)
    } else {
        toml::from_str(&text).map_err(anyhow::Error::from)
    };
    parsed.with_context(|| format!("invalid config {}", path.display()))
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyCheckConfig {
    /// FunctionTable JSON file; mutually exclusive with `random`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Number of random tables to generate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<usize>,
    pub max_coords: usize,
    pub max_points: usize,
    pub seed: u64,
    /// Magnitudes of the log-Sobolev grid; each is used with both signs.
    pub lambdas: Vec<f64>,
    pub tolerances: Tolerances,
}

impl Default for EntropyCheckConfig {
    fn default() -> Self {
        Self {
            input: None,
            random: Some(100),
            max_coords: 4,
            max_points: 4,
            seed: 7,
            lambdas: vec![0.1, 0.5, 1.0, 2.0],
            tolerances: Tolerances::default(),
        }
    }
}

impl EntropyCheckConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        match (&self.input, self.random) {
            (Some(_), Some(_)) => {
                problems.push("give either input or random, not both".to_string())
            }
            (None, None) => problems.push("give input or random".to_string()),
            (None, Some(0)) => problems.push("random must be at least 1".to_string()),
            _ => {}
        }
        if self.max_coords == 0 || self.max_points == 0 {
            problems.push("max_coords and max_points must be at least 1".into());
        }
        if self.lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            problems.push("lambdas must be finite and >= 0".into());
        }
        if !problems.is_empty() {
            bail!(problems.join("; "));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    pub choice: PerturbationChoice,
    pub t_grid: Vec<f64>,
}

impl Default for DeltaConfig {
    fn default() -> Self {
        Self {
            input: None,
            choice: PerturbationChoice::MaurerInf,
            t_grid: (0..=8).map(|i| i as f64 * 0.5).collect(),
        }
    }
}

impl DeltaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.input.is_none() {
            bail!("delta needs an input table");
        }
        if self.t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            bail!("t_grid values must be finite and >= 0");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let e = EntropyCheckConfig::default();
        assert_eq!(
            toml::from_str::<EntropyCheckConfig>(&toml::to_string(&e).unwrap()).unwrap(),
            e
        );
        let d = DeltaConfig::default();
        assert_eq!(
            toml::from_str::<DeltaConfig>(&toml::to_string(&d).unwrap()).unwrap(),
            d
        );
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = format!(
            "{}\nextra = 1\n",
            toml::to_string(&DeltaConfig::default()).unwrap()
        );
        assert!(toml::from_str::<DeltaConfig>(&text).is_err());
    }

    #[test]
    fn entropy_source_is_exclusive() {
        let cfg = EntropyCheckConfig {
            input: Some("x.json".into()),
            ..EntropyCheckConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
