use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::EntryDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    /// `lambda_k(X X^* / N)` for an `n x N` matrix.
    Covariance,
    /// `lambda_k(X)` for an `n x n` real symmetric matrix.
    Symmetric,
}

/// How the unknown mean `E lambda_k` is replaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    /// Mean of an independent pilot batch.
    PilotMean,
    /// Mean of the main batch itself.
    PooledMean,
}

/// A tail-estimation experiment. All randomness derives from `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub ensemble: Ensemble,
    pub n: usize,
    /// Number of columns; covariance ensemble only.
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    /// Eigenvalue rank, 1 = largest.
    pub k: usize,
    pub dist: EntryDistribution,
    pub samples: usize,
    #[serde(default = "default_pilot")]
    pub pilot_samples: usize,
    pub t_grid: Vec<f64>,
    pub seed: u64,
    #[serde(default = "default_centering")]
    pub centering: Centering,
    /// Confidence level of the per-threshold Clopper-Pearson intervals.
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    /// Multiple of the center's standard error added to the pass slack.
    #[serde(default = "default_stderr_multiplier")]
    pub stderr_multiplier: f64,
}

fn default_pilot() -> usize {
    2000
}

fn default_centering() -> Centering {
    Centering::PilotMean
}

fn default_confidence() -> f64 {
    0.99
}

fn default_stderr_multiplier() -> f64 {
    3.0
}

/// `0.25, 0.5, ..., 2.0`
pub fn default_t_grid() -> Vec<f64> {
    (1..=8).map(|i| i as f64 * 0.25).collect()
}

impl Default for SimulationConfig {
    /// The covariance desk configuration: `n = 4`, `N = 16`, `k = 1`,
    /// Rademacher entries, 20000 samples.
    fn default() -> Self {
        Self {
            ensemble: Ensemble::Covariance,
            n: 4,
            cols: Some(16),
            k: 1,
            dist: EntryDistribution::Rademacher,
            samples: 20_000,
            pilot_samples: default_pilot(),
            t_grid: default_t_grid(),
            seed: 7,
            centering: default_centering(),
            confidence: default_confidence(),
            stderr_multiplier: default_stderr_multiplier(),
        }
    }
}

pub const MIN_SAMPLES: usize = 100;

impl SimulationConfig {
    /// Checks every field and reports all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.n == 0 {
            problems.push("n must be at least 1".to_string());
        }
        if self.k == 0 || self.k > self.n {
            problems.push(format!("k = {} must lie in 1..=n = {}", self.k, self.n));
        }
        match (self.ensemble, self.cols) {
            (Ensemble::Covariance, None) => problems.push("covariance ensemble needs N".into()),
            (Ensemble::Covariance, Some(0)) => problems.push("N must be at least 1".into()),
            (Ensemble::Symmetric, Some(_)) => problems.push("symmetric ensemble takes no N".into()),
            _ => {}
        }
        if self.ensemble == Ensemble::Symmetric && !self.dist.is_real() {
            problems.push(format!(
                "symmetric ensemble needs a real entry law, got {:?}",
                self.dist
            ));
        }
        if self.samples < MIN_SAMPLES {
            problems.push(format!("samples = {} is below {MIN_SAMPLES}", self.samples));
        }
        if self.centering == Centering::PilotMean && self.pilot_samples < MIN_SAMPLES {
            problems.push(format!(
                "pilot_samples = {} is below {MIN_SAMPLES}",
                self.pilot_samples
            ));
        }
        if self.t_grid.is_empty() {
            problems.push("t_grid is empty".into());
        }
        if self.t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            problems.push("t_grid values must be finite and >= 0".into());
        }
        if self.t_grid.windows(2).any(|w| w[0] > w[1]) {
            problems.push("t_grid must be sorted ascending".into());
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            problems.push(format!(
                "confidence = {} must lie in (0, 1)",
                self.confidence
            ));
        }
        if !(self.stderr_multiplier >= 0.0 && self.stderr_multiplier.is_finite()) {
            problems.push(format!(
                "stderr_multiplier = {} must be >= 0",
                self.stderr_multiplier
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }
}

/// Marchenko-Pastur sanity check over a batch of covariance spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MpCheckConfig {
    pub n: usize,
    #[serde(rename = "N")]
    pub cols: usize,
    pub dist: EntryDistribution,
    pub samples: usize,
    pub seed: u64,
    /// Pass iff the KS distance is below this.
    #[serde(default = "default_mp_threshold")]
    pub threshold: f64,
    /// Below this `n` the distance is reported but not enforced.
    #[serde(default = "default_min_dimension")]
    pub min_dimension: usize,
    #[serde(default = "default_bins")]
    pub bins: usize,
}

fn default_mp_threshold() -> f64 {
    0.05
}

fn default_min_dimension() -> usize {
    100
}

fn default_bins() -> usize {
    50
}

impl Default for MpCheckConfig {
    fn default() -> Self {
        Self {
            n: 400,
            cols: 800,
            dist: EntryDistribution::Rademacher,
            samples: 20,
            seed: 7,
            threshold: default_mp_threshold(),
            min_dimension: default_min_dimension(),
            bins: default_bins(),
        }
    }
}

impl MpCheckConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.n == 0 || self.cols == 0 {
            problems.push(format!(
                "dimensions {}x{} must be at least 1x1",
                self.n, self.cols
            ));
        }
        if self.dist.variance() != 1.0 {
            problems.push(format!(
                "{:?} has entry variance {}, the comparison needs unit variance",
                self.dist,
                self.dist.variance()
            ));
        }
        if self.samples == 0 {
            problems.push("samples must be at least 1".into());
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            problems.push(format!("threshold = {} must lie in (0, 1]", self.threshold));
        }
        if self.bins == 0 {
            problems.push("bins must be at least 1".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }

    pub fn ratio(&self) -> f64 {
        self.n as f64 / self.cols as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        SimulationConfig::default().validate().unwrap();
        MpCheckConfig::default().validate().unwrap();
        assert_eq!(
            default_t_grid(),
            vec![0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]
        );
    }

    #[test]
    fn validation_lists_every_problem() {
        let cfg = SimulationConfig {
            k: 9,
            samples: 10,
            t_grid: vec![1.0, 0.5, -1.0],
            ..SimulationConfig::default()
        };
        let Err(Error::Config(msg)) = cfg.validate() else {
            panic!("expected config error");
        };
        assert!(msg.contains("k = 9"));
        assert!(msg.contains("samples = 10"));
        assert!(msg.contains("sorted"));
        assert!(msg.contains(">= 0"));
    }

    #[test]
    fn symmetric_shape_rules() {
        let cfg = SimulationConfig {
            ensemble: Ensemble::Symmetric,
            ..SimulationConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = SimulationConfig { cols: None, ..cfg };
        cfg.validate().unwrap();
        let cfg = SimulationConfig {
            dist: EntryDistribution::ComplexDisk,
            ..cfg
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn mp_rejects_non_unit_variance() {
        let cfg = MpCheckConfig {
            dist: EntryDistribution::UniformReal,
            ..MpCheckConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn toml_round_trip_and_unknown_keys() {
        let cfg = SimulationConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        assert!(text.contains("N = 16"));
        let back: SimulationConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        let bad = format!("{text}\nbogus = 1\n");
        assert!(toml::from_str::<SimulationConfig>(&bad).is_err());
    }
}
