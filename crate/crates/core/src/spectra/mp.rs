//! Marchenko-Pastur comparison for pooled covariance spectra.
//!
//! The law itself is the standard one for unit-variance entries and ratio
//! `c = n / N`: density `sqrt((b - x)(x - a)) / (2 pi c x)` on
//! `[a, b] = [(1 - sqrt c)^2, (1 + sqrt c)^2]`, plus an atom of mass
//! `1 - 1/c` at zero when `c > 1`.

use std::f64::consts::PI;

use serde::Serialize;

use super::eigen::{Scaling, Spectrum};
use crate::error::{Error, Result};

/// A cumulative distribution function with explicit left limits, so that
/// laws with atoms are compared correctly.
pub trait Cdf {
    fn cdf(&self, x: f64) -> f64;

    /// `P(X < x)`
    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarchenkoPastur {
    ratio: f64,
}

impl MarchenkoPastur {
    pub fn new(ratio: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(Error::Domain(format!(
                "aspect ratio must lie in (0, inf), got {ratio}"
            )));
        }
        Ok(Self { ratio })
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Support `[a, b]` of the continuous part.
    pub fn edges(&self) -> (f64, f64) {
        let s = self.ratio.sqrt();
        ((1.0 - s).powi(2), (1.0 + s).powi(2))
    }

    /// Mass of the atom at zero.
    pub fn atom(&self) -> f64 {
        (1.0 - 1.0 / self.ratio).max(0.0)
    }

    /// Density of the continuous part.
    pub fn density(&self, x: f64) -> f64 {
        let (a, b) = self.edges();
        if x <= a || x >= b || x <= 0.0 {
            return 0.0;
        }
        ((b - x) * (x - a)).sqrt() / (2.0 * PI * self.ratio * x)
    }

    /// Mass of the continuous part on `[a, x]`.
    ///
    /// With `x = 1 + c - 2 sqrt(c) cos(theta)` the integrand becomes
    /// `2 sin^2(theta) / (pi (A - B cos theta))`, `A = 1 + c`, `B = 2 sqrt c`,
    /// whose antiderivative is elementary.
    fn continuous_mass(&self, x: f64) -> f64 {
        let c = self.ratio;
        let (a, b) = self.edges();
        if x <= a {
            return 0.0;
        }
        let full = (1.0 + c - (1.0 - c).abs()) / (2.0 * c);
        if x >= b {
            return full;
        }
        let s = c.sqrt();
        let big_a = 1.0 + c;
        let big_b = 2.0 * s;
        let theta = ((big_a - x) / big_b).clamp(-1.0, 1.0).acos();
        let mut value = theta.sin() / big_b + big_a * theta / (big_b * big_b);
        if c != 1.0 {
            // (1 - A^2/B^2) * 2 / sqrt(A^2 - B^2) = -|1 - c| / (2c)
            let ratio = (1.0 + s) / (1.0 - s).abs();
            value -= (1.0 - c).abs() / (2.0 * c) * (ratio * (theta / 2.0).tan()).atan();
        }
        (2.0 / PI * value).clamp(0.0, full)
    }
}

impl Cdf for MarchenkoPastur {
    fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        (self.atom() + self.continuous_mass(x)).min(1.0)
    }

    fn cdf_left(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.cdf(x)
    }
}

/// `sup_x |F_n(x) - F(x)|` for the empirical distribution of `samples`.
pub fn ks_distance<F: Cdf + ?Sized>(samples: &[f64], law: &F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let below = i as f64 / m;
        let at = (j + 1) as f64 / m;
        d = d
            .max((law.cdf_left(xs[i]) - below).abs())
            .max((at - law.cdf(xs[i])).abs());
        i = j + 1;
    }
    d
}

fn pooled(spectra: &[Spectrum]) -> Result<Vec<f64>> {
    if spectra.is_empty() {
        return Err(Error::Domain("no spectra to pool".into()));
    }
    if let Some(s) = spectra
        .iter()
        .find(|s| !matches!(s.scaling, Scaling::Covariance { .. }))
    {
        return Err(Error::Domain(format!(
            "Marchenko-Pastur comparison needs covariance spectra, got {:?}",
            s.scaling
        )));
    }
    Ok(spectra
        .iter()
        .flat_map(|s| s.eigenvalues.iter().copied())
        .collect())
}

/// Kolmogorov-Smirnov distance between the pooled empirical spectral
/// distribution and the Marchenko-Pastur law with ratio `c`.
pub fn mp_distance(spectra: &[Spectrum], c: f64) -> Result<f64> {
    let law = MarchenkoPastur::new(c)?;
    Ok(ks_distance(&pooled(spectra)?, &law))
}

/// One bin of the empirical-vs-limit histogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralBin {
    pub lo: f64,
    pub hi: f64,
    /// Fraction of pooled eigenvalues in `[lo, hi)` (the last bin is closed).
    pub empirical: f64,
    /// Marchenko-Pastur mass of the same interval.
    pub limit: f64,
}

/// Equal-width histogram of the pooled spectrum on `[0, max(b, max eigenvalue)]`
/// alongside the Marchenko-Pastur mass per bin.
pub fn mp_histogram(spectra: &[Spectrum], c: f64, bins: usize) -> Result<Vec<SpectralBin>> {
    if bins == 0 {
        return Err(Error::Domain("histogram needs at least one bin".into()));
    }
    let law = MarchenkoPastur::new(c)?;
    let values = pooled(spectra)?;
    let top = values.iter().copied().fold(law.edges().1, f64::max);
    let width = top / bins as f64;
    let mut counts = vec![0usize; bins];
    for v in &values {
        let idx = ((v / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let total = values.len() as f64;
    Ok((0..bins)
        .map(|i| {
            let lo = i as f64 * width;
            let hi = if i + 1 == bins { top } else { lo + width };
            let lower = if i == 0 { 0.0 } else { law.cdf_left(lo) };
            SpectralBin {
                lo,
                hi,
                empirical: counts[i] as f64 / total,
                limit: law.cdf(hi) - lower,
            }
        })
        .collect())
}
