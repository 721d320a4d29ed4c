//! Exact entropy functionals on finite product spaces.
//!
//! For a positive table `G`, the entropy is `H(G) = E[G log G] - E[G] log E[G]`
//! and the partial entropy `H_k(G)` is the same expression with the
//! expectation taken over coordinate `k` alone, leaving a function of the
//! remaining coordinates. Every expectation here is an exact weighted sum.

use serde::{Deserialize, Serialize};

use crate::delta::PerturbationChoice;
use crate::error::{Error, Result};
use crate::space::FunctionTable;

/// Tolerances used when checking inequalities that hold exactly in real
/// arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Sums of logarithms (entropy, tensorization, attainment).
    pub exact: f64,
    /// Quantities built from exponentials (log-Sobolev, moment generating function).
    pub exponential: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            exact: 1e-12,
            exponential: 1e-10,
        }
    }
}

/// Entropy of one fiber given its values and probability weights.
fn fiber_entropy(values: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (mean, mean_glog) = values.fold((0.0, 0.0), |(m, ml), (w, g)| {
        (m + w * g, ml + w * g * g.ln())
    });
    mean_glog - mean * mean.ln()
}

/// `E[G log G] - E[G] log E[G]` under the product measure.
pub fn entropy(g: &FunctionTable) -> Result<f64> {
    g.ensure_positive()?;
    let weights = g.space().point_weights();
    Ok(fiber_entropy(
        weights.into_iter().zip(g.values().iter().copied()),
    ))
}

/// The partial entropy along `axis` (0-based), as a table over the
/// remaining coordinates.
pub fn partial_entropy(g: &FunctionTable, axis: usize) -> Result<FunctionTable> {
    g.ensure_positive()?;
    let space = g.space();
    if axis >= space.arity() {
        return Err(Error::Shape(format!(
            "coordinate {axis} out of range for a {}-coordinate space",
            space.arity()
        )));
    }
    let reduced = space.without(axis);
    let stride = space.stride(axis);
    let coord = space.coordinate(axis);
    let values = (0..reduced.len())
        .map(|r| {
            let base = space.fiber_base(axis, r);
            let fiber = coord
                .weights()
                .iter()
                .enumerate()
                .map(|(j, w)| (*w, g.values()[base + j * stride]));
            // Roundoff can push an exactly-zero fiber entropy slightly negative.
            fiber_entropy(fiber).max(0.0)
        })
        .collect();
    FunctionTable::new(reduced, values)
}

/// `E[G (log T - log E[T])]`, the objective of the duality formula. It never
/// exceeds `entropy(G)` and equals it at `T = G`.
pub fn duality_value(g: &FunctionTable, t: &FunctionTable) -> Result<f64> {
    g.ensure_positive()?;
    t.ensure_positive()?;
    g.space().ensure_same(t.space())?;
    let log_mean_t = t.mean().ln();
    let weights = g.space().point_weights();
    Ok(weights
        .iter()
        .zip(g.values().iter().zip(t.values()))
        .map(|(w, (g, t))| w * g * (t.ln() - log_mean_t))
        .sum())
}

/// `E[G (log G - log c) - (G - c)]`, the objective of the variation formula.
/// It is never below `entropy(G)` and equals it at `c = E[G]`.
pub fn variation_value(g: &FunctionTable, c: f64) -> Result<f64> {
    g.ensure_positive()?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!(
            "variation constant must be positive, got {c}"
        )));
    }
    let log_c = c.ln();
    Ok(g.expect(|g| g * (g.ln() - log_c) - (g - c)))
}

/// `sum_k E[H_k(G)] - H(G)`; nonnegative up to roundoff.
pub fn tensorization_gap(g: &FunctionTable) -> Result<f64> {
    let total = entropy(g)?;
    let mut sum = 0.0;
    for axis in 0..g.space().arity() {
        sum += partial_entropy(g, axis)?.mean();
    }
    Ok(sum - total)
}

fn check_sign_condition(z: &FunctionTable, lambda: f64, perturbed: &[FunctionTable]) -> Result<()> {
    if perturbed.len() != z.space().arity() {
        return Err(Error::Shape(format!(
            "{} perturbed tables for {} coordinates",
            perturbed.len(),
            z.space().arity()
        )));
    }
    for (k, zk) in perturbed.iter().enumerate() {
        z.space().ensure_same(zk.space())?;
        if let Some(point) = z
            .values()
            .iter()
            .zip(zk.values())
            .position(|(z, zk)| -lambda * (z - zk) > 0.0)
        {
            return Err(Error::SignCondition {
                point,
                coordinate: k,
                detail: format!(
                    "lambda={lambda}, Z={}, Z_k={}",
                    z.values()[point],
                    zk.values()[point]
                ),
            });
        }
    }
    Ok(())
}

/// `(lambda^2 / 2) E[e^{lambda Z} Delta^2] - H(e^{lambda Z})`, with
/// `Delta^2 = sum_k (Z - Z_k)^2` built from the supplied perturbed tables.
///
/// Requires `-lambda (Z - Z_k) <= 0` at every point for every `k`; under that
/// condition the result is nonnegative.
pub fn log_sobolev_gap(z: &FunctionTable, lambda: f64, perturbed: &[FunctionTable]) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "lambda must be finite, got {lambda}"
        )));
    }
    check_sign_condition(z, lambda, perturbed)?;
    let exp_lz = z.map(|v| (lambda * v).exp())?.into_positive()?;
    let ent = entropy(&exp_lz)?;
    let weights = z.space().point_weights();
    let weighted: f64 = (0..z.len())
        .map(|i| {
            let delta_sq: f64 = perturbed
                .iter()
                .map(|zk| (z.values()[i] - zk.values()[i]).powi(2))
                .sum();
            weights[i] * exp_lz.values()[i] * delta_sq
        })
        .sum();
    Ok(0.5 * lambda * lambda * weighted - ent)
}

/// The two sides of the sub-Gaussian moment generating function bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MgfComparison {
    /// `E[exp(lambda (Z - E Z))]`
    pub mgf: f64,
    /// `exp(sup_delta * lambda^2 / 2)`
    pub bound: f64,
}

impl MgfComparison {
    pub fn holds(&self, tol: f64) -> bool {
        self.mgf <= self.bound + tol
    }
}

/// Evaluates `E[e^{lambda (Z - EZ)}]` against `exp(sup_delta lambda^2 / 2)`.
///
/// `lambda` must be `<= 0` for [`PerturbationChoice::LeftSup`] and `>= 0` for
/// [`PerturbationChoice::MaurerInf`], matching the sign condition of the
/// log-Sobolev step.
pub fn herbst_mgf_check(
    z: &FunctionTable,
    lambda: f64,
    sup_delta: f64,
    choice: PerturbationChoice,
) -> Result<MgfComparison> {
    if !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "lambda must be finite, got {lambda}"
        )));
    }
    if !(sup_delta >= 0.0 && sup_delta.is_finite()) {
        return Err(Error::Domain(format!(
            "sup-norm must be finite and >= 0, got {sup_delta}"
        )));
    }
    let admissible = match choice {
        PerturbationChoice::LeftSup => lambda <= 0.0,
        PerturbationChoice::MaurerInf => lambda >= 0.0,
    };
    if !admissible {
        return Err(Error::Precondition(format!(
            "lambda={lambda} has the wrong sign for the {choice} perturbation"
        )));
    }
    let mean = z.mean();
    Ok(MgfComparison {
        mgf: z.expect(|v| (lambda * (v - mean)).exp()),
        bound: (0.5 * sup_delta * lambda * lambda).exp(),
    })
}
