//! Reproducible parallel Monte Carlo estimation of eigenvalue tails.
//!
//! Sample `i` of a batch draws from the ChaCha stream `(seed, i)`; pilot
//! samples use streams offset by [`PILOT_STREAM_OFFSET`]. Each sample is a
//! pure function of its stream, and results are gathered in index order, so
//! every output is bitwise independent of the worker count.

mod config;
mod report;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{
    default_t_grid, Centering, Ensemble, MpCheckConfig, SimulationConfig, MIN_SAMPLES,
};
pub use report::{compare_report, Comparison, RowFailure, TailReport, TailRow};

use crate::delta::{maurer_eig_bounds, tail_bound, TailSide};
use crate::error::{Error, Result, SeedTag};
use crate::spectra::{
    covariance_spectrum, mp_distance, mp_histogram, sample_rectangular, sample_symmetric,
    symmetric_spectrum, SpectralBin, Spectrum,
};
use crate::stats::clopper_pearson;

/// Pilot streams start here, disjoint from any main batch.
pub const PILOT_STREAM_OFFSET: u64 = 1 << 63;

/// Runs `f` on a pool of `workers` threads (0 = rayon's default).
fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// The spectrum of one sample of the configured ensemble.
pub fn sample_spectrum(config: &SimulationConfig, tag: SeedTag) -> Result<Spectrum> {
    match config.ensemble {
        Ensemble::Covariance => {
            let cols = config
                .cols
                .ok_or_else(|| Error::Config("covariance ensemble needs N".into()))?;
            covariance_spectrum(&sample_rectangular(config.n, cols, config.dist, tag)?)
        }
        Ensemble::Symmetric => symmetric_spectrum(&sample_symmetric(config.n, config.dist, tag)?),
    }
}

/// `lambda_k` for streams `first..first + count`, in stream order.
pub fn sample_statistics(
    config: &SimulationConfig,
    first: u64,
    count: usize,
    workers: usize,
) -> Result<Vec<f64>> {
    with_workers(workers, || {
        (0..count as u64)
            .into_par_iter()
            .map(|i| {
                sample_spectrum(config, SeedTag::new(config.seed, first + i))?.kth_largest(config.k)
            })
            .collect::<Result<Vec<f64>>>()
    })?
}

/// Full spectra for streams `0..count`, in stream order.
pub fn spectrum_batch(
    config: &SimulationConfig,
    count: usize,
    workers: usize,
) -> Result<Vec<Spectrum>> {
    with_workers(workers, || {
        (0..count as u64)
            .into_par_iter()
            .map(|i| sample_spectrum(config, SeedTag::new(config.seed, i)))
            .collect::<Result<Vec<_>>>()
    })?
}

/// Long-format CSV `sample_index,k,lambda` of a batch of spectra.
pub fn spectra_to_csv(spectra: &[Spectrum]) -> Result<String> {
    #[derive(Serialize)]
    struct Row {
        sample_index: usize,
        k: usize,
        lambda: f64,
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for (sample_index, s) in spectra.iter().enumerate() {
        for (i, lambda) in s.eigenvalues.iter().enumerate() {
            w.serialize(Row {
                sample_index,
                k: i + 1,
                lambda: *lambda,
            })
            .map_err(|e| Error::Numeric {
                tag: None,
                detail: e.to_string(),
            })?;
        }
    }
    finish_csv(w)
}

pub(crate) fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Numeric {
        tag: None,
        detail: e.to_string(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CenterEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(count)`.
    pub stderr: f64,
    pub count: usize,
}

fn mean_and_stderr(values: &[f64]) -> CenterEstimate {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    CenterEstimate {
        mean,
        stderr: (var / m).sqrt(),
        count: values.len(),
    }
}

/// Mean of `lambda_k` over the pilot batch, whose streams are disjoint from
/// the main batch.
pub fn estimate_center(config: &SimulationConfig, workers: usize) -> Result<CenterEstimate> {
    if config.pilot_samples < MIN_SAMPLES {
        return Err(Error::Config(format!(
            "pilot_samples = {} is below {MIN_SAMPLES}",
            config.pilot_samples
        )));
    }
    let pilot = sample_statistics(config, PILOT_STREAM_OFFSET, config.pilot_samples, workers)?;
    Ok(mean_and_stderr(&pilot))
}

/// Theoretical right and left bounds at threshold `t` for the configured ensemble.
pub fn theoretical_bounds(config: &SimulationConfig, t: f64) -> Result<(f64, f64)> {
    match config.ensemble {
        Ensemble::Covariance => {
            let cols = config
                .cols
                .ok_or_else(|| Error::Config("covariance ensemble needs N".into()))?;
            let sup_norm = (config.n * config.n) as f64 / cols as f64;
            Ok((
                tail_bound(t, sup_norm, TailSide::Right)?,
                tail_bound(t, sup_norm, TailSide::Left)?,
            ))
        }
        Ensemble::Symmetric => {
            let b = maurer_eig_bounds(config.k, t)?;
            Ok((b.right, b.left))
        }
    }
}

/// Empirical right and left tail frequencies of `lambda_k - center` over a
/// fresh batch of `samples` draws, with Clopper-Pearson intervals and the
/// matching theoretical bounds at every threshold.
pub fn tail_estimate(config: &SimulationConfig, workers: usize) -> Result<TailReport> {
    config.validate()?;
    let values = sample_statistics(config, 0, config.samples, workers)?;
    let center = match config.centering {
        Centering::PilotMean => estimate_center(config, workers)?,
        Centering::PooledMean => mean_and_stderr(&values),
    };
    let m = values.len() as u64;
    let rows = config
        .t_grid
        .iter()
        .map(|&t| {
            let right = values.iter().filter(|v| **v - center.mean >= t).count() as u64;
            let left = values.iter().filter(|v| **v - center.mean <= -t).count() as u64;
            let ci_right = clopper_pearson(right, m, config.confidence)?;
            let ci_left = clopper_pearson(left, m, config.confidence)?;
            let (bound_right, bound_left) = theoretical_bounds(config, t)?;
            let center_slack = config.stderr_multiplier * center.stderr;
            Ok(TailRow::new(
                t,
                (right, left),
                m,
                (ci_right.half_width(), ci_left.half_width()),
                (bound_right, bound_left),
                center_slack,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TailReport {
        config: config.clone(),
        center,
        rows,
    })
}

/// Result of comparing a pooled spectrum against the Marchenko-Pastur law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MpCheckReport {
    pub config: MpCheckConfig,
    pub ratio: f64,
    pub ks_distance: f64,
    /// False when `n` is below the configured floor; the distance is then
    /// informational only.
    pub enforced: bool,
    pub passed: bool,
    pub bins: Vec<SpectralBin>,
}

impl MpCheckReport {
    pub fn bins_to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for b in &self.bins {
            w.serialize(b).map_err(|e| Error::Numeric {
                tag: None,
                detail: e.to_string(),
            })?;
        }
        finish_csv(w)
    }
}

pub fn mp_check(config: &MpCheckConfig, workers: usize) -> Result<MpCheckReport> {
    config.validate()?;
    let sim = SimulationConfig {
        ensemble: Ensemble::Covariance,
        n: config.n,
        cols: Some(config.cols),
        k: 1,
        dist: config.dist,
        samples: config.samples,
        seed: config.seed,
        ..SimulationConfig::default()
    };
    let spectra = spectrum_batch(&sim, config.samples, workers)?;
    let ratio = config.ratio();
    let ks_distance = mp_distance(&spectra, ratio)?;
    let enforced = config.n >= config.min_dimension;
    Ok(MpCheckReport {
        config: config.clone(),
        ratio,
        ks_distance,
        enforced,
        passed: !enforced || ks_distance < config.threshold,
        bins: mp_histogram(&spectra, ratio, config.bins)?,
    })
}
