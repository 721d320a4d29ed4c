//! Coordinate-wise perturbations of `Z`, the resulting `Delta^2` fields and
//! the sub-Gaussian tail bounds they imply.
//!
//! For coordinate `k`, `Z_k(x)` replaces `x_k` by every candidate value of
//! that coordinate and keeps the extreme result: the infimum controls the
//! right tail, the supremum the left tail. Then
//! `Delta^2(x) = sum_k (Z(x) - Z_k(x))^2` and a finite `||Delta^2||_inf`
//! gives `P(Z - EZ >= t) <= exp(-t^2 / (2 ||Delta^2||_inf))` for the
//! matching side.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::FunctionTable;

/// Which extreme of the coordinate substitution defines `Z_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PerturbationChoice {
    /// Infimum over the coordinate (right tail, `lambda >= 0`).
    MaurerInf,
    /// Supremum over the coordinate (left tail, `lambda <= 0`).
    LeftSup,
}

impl PerturbationChoice {
    /// The tail this choice controls.
    pub fn side(self) -> TailSide {
        match self {
            PerturbationChoice::MaurerInf => TailSide::Right,
            PerturbationChoice::LeftSup => TailSide::Left,
        }
    }

    fn extreme(self, a: f64, b: f64) -> f64 {
        match self {
            PerturbationChoice::MaurerInf => a.min(b),
            PerturbationChoice::LeftSup => a.max(b),
        }
    }

    fn identity(self) -> f64 {
        match self {
            PerturbationChoice::MaurerInf => f64::INFINITY,
            PerturbationChoice::LeftSup => f64::NEG_INFINITY,
        }
    }
}

impl fmt::Display for PerturbationChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PerturbationChoice::MaurerInf => "MAURER_INF",
            PerturbationChoice::LeftSup => "LEFT_SUP",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailSide {
    /// `P(Z - EZ >= t)`
    Right,
    /// `P(Z - EZ <= -t)`
    Left,
}

impl fmt::Display for TailSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TailSide::Right => "right",
            TailSide::Left => "left",
        })
    }
}

/// `Z_k` for coordinate `axis` (0-based): the extreme of `Z` over all
/// values of that coordinate, others held fixed. Constant along `axis`.
pub fn perturbed_values(
    z: &FunctionTable,
    axis: usize,
    choice: PerturbationChoice,
) -> Result<FunctionTable> {
    let space = z.space();
    if axis >= space.arity() {
        return Err(Error::Shape(format!(
            "coordinate {axis} out of range for a {}-coordinate space",
            space.arity()
        )));
    }
    let stride = space.stride(axis);
    let size = space.coordinate(axis).len();
    let mut out = z.values().to_vec();
    for r in 0..space.len() / size {
        let base = space.fiber_base(axis, r);
        let fiber = (0..size).map(|j| base + j * stride);
        let extreme = fiber.clone().fold(choice.identity(), |acc, i| {
            choice.extreme(acc, z.values()[i])
        });
        for i in fiber {
            out[i] = extreme;
        }
    }
    FunctionTable::new(space.clone(), out)
}

/// Perturbed tables, the `Delta^2` field and its sup-norm for one choice.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaReport {
    pub choice: PerturbationChoice,
    /// `Z_k` for every coordinate, each over the full space.
    pub perturbed: Vec<FunctionTable>,
    pub delta_sq: FunctionTable,
    /// `max_x Delta^2(x)`
    pub sup_norm: f64,
}

impl DeltaReport {
    /// Flat indices where `Delta^2` reaches its sup-norm.
    pub fn argmax(&self) -> Vec<usize> {
        self.delta_sq
            .values()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == self.sup_norm)
            .map(|(i, _)| i)
            .collect()
    }

    /// Tail bound for the side this report's choice controls.
    pub fn tail_bound(&self, t: f64) -> Result<f64> {
        tail_bound(t, self.sup_norm, self.choice.side())
    }
}

#[derive(Serialize)]
struct DeltaReportWire<'a> {
    choice: PerturbationChoice,
    sup_norm: f64,
    delta_sq: &'a [f64],
}

impl Serialize for DeltaReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DeltaReportWire {
            choice: self.choice,
            sup_norm: self.sup_norm,
            delta_sq: self.delta_sq.values(),
        }
        .serialize(s)
    }
}

pub fn delta_squared(z: &FunctionTable, choice: PerturbationChoice) -> Result<DeltaReport> {
    let perturbed = (0..z.space().arity())
        .into_par_iter()
        .map(|axis| perturbed_values(z, axis, choice))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = (0..z.len())
        .map(|i| {
            perturbed
                .iter()
                .map(|zk| (z.values()[i] - zk.values()[i]).powi(2))
                .sum()
        })
        .collect();
    let sup_norm = values.iter().copied().fold(0.0, f64::max);
    let delta_sq = FunctionTable::new(z.space().clone(), values)?;
    Ok(DeltaReport {
        choice,
        perturbed,
        delta_sq,
        sup_norm,
    })
}

/// `exp(-t^2 / (2 sup_norm))`.
///
/// The side only records which tail is being bounded; the caller supplies
/// the sup-norm of the matching perturbation. A zero sup-norm means `Z` is
/// deterministic: the bound is 1 at `t = 0` and 0 beyond.
pub fn tail_bound(t: f64, sup_norm: f64, _side: TailSide) -> Result<f64> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!(
            "threshold must be finite and >= 0, got {t}"
        )));
    }
    if !(sup_norm >= 0.0 && sup_norm.is_finite()) {
        return Err(Error::Domain(format!(
            "sup-norm must be finite and >= 0, got {sup_norm}"
        )));
    }
    if sup_norm == 0.0 {
        return Ok(if t == 0.0 { 1.0 } else { 0.0 });
    }
    Ok((-t * t / (2.0 * sup_norm)).exp())
}

/// Right and left tail bounds for the `k`-th largest eigenvalue of a real
/// symmetric matrix with independent entries bounded by 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigBounds {
    pub right: f64,
    pub left: f64,
}

/// `exp(-t^2 / (16 k^2))` on the right, `exp(-t^2 / (16 k^2 + 2 k t))` on the left.
pub fn maurer_eig_bounds(k: usize, t: f64) -> Result<EigBounds> {
    if k == 0 {
        return Err(Error::Domain("eigenvalue index k starts at 1".into()));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!(
            "threshold must be finite and >= 0, got {t}"
        )));
    }
    let k = k as f64;
    let base = 16.0 * k * k;
    Ok(EigBounds {
        right: (-t * t / base).exp(),
        left: (-t * t / (base + 2.0 * k * t)).exp(),
    })
}
