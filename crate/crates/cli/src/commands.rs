use std::path::Path;

use anyhow::{Context, Result};
use rand::Rng;
use serde::Serialize;
use tailforge::montecarlo::{
    compare_report, mp_check, tail_estimate, MpCheckConfig, SimulationConfig,
};
use tailforge::spectra::stream_rng;
use tailforge::*;

use crate::config::{DeltaConfig, EntropyCheckConfig};
use crate::Format;

/// What a command produced: the report body and whether every check passed.
pub struct Outcome {
    pub body: String,
    pub passed: bool,
    pub summary: String,
}

fn read_table(path: &Path) -> Result<FunctionTable> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("invalid table {}", path.display()))
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn random_table(index: u64, cfg: &EntropyCheckConfig) -> Result<FunctionTable> {
    let mut rng = stream_rng(SeedTag::new(cfg.seed, index));
    let arity = rng.random_range(1..=cfg.max_coords);
    let coords = (0..arity)
        .map(|_| {
            let len = rng.random_range(1..=cfg.max_points);
            let raw: Vec<f64> = (0..len).map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            CoordinateSpace::new(
                (0..len).map(|i| (i as f64).into()).collect(),
                raw.iter().map(|w| w / total).collect(),
            )
        })
        .collect::<tailforge::Result<Vec<_>>>()?;
    let space = ProductSpace::new(coords)?;
    let values = (0..space.len())
        .map(|_| 10f64.powf(rng.random_range(-2.0..2.0)))
        .collect();
    Ok(FunctionTable::positive(space, values)?)
}

#[derive(Debug, Serialize)]
struct EntropyRow {
    table: usize,
    points: usize,
    entropy: f64,
    tensorization_gap: f64,
    duality_error: f64,
    variation_error: f64,
    min_log_sobolev_gap: f64,
    max_mgf_excess: f64,
    pass: bool,
}

/// Exact checks on `G` and, with `Z = log G`, the log-Sobolev and moment
/// generating function inequalities on both sides of the lambda grid.
fn check_table(table: usize, g: &FunctionTable, cfg: &EntropyCheckConfig) -> Result<EntropyRow> {
    let tol = cfg.tolerances;
    let h = entropy(g)?;
    let scale = h.abs().max(1.0);
    let tensorization_gap = tensorization_gap(g)?;
    let duality_error = (duality_value(g, g)? - h).abs() / scale;
    let variation_error = (variation_value(g, g.mean())? - h).abs() / scale;
    let mut pass = tensorization_gap >= -tol.exact * scale
        && duality_error <= tol.exact
        && variation_error <= tol.exact;

    let z = g.map(f64::ln)?;
    let mut min_log_sobolev_gap = f64::INFINITY;
    let mut max_mgf_excess = f64::NEG_INFINITY;
    for (choice, sign) in [
        (PerturbationChoice::LeftSup, -1.0),
        (PerturbationChoice::MaurerInf, 1.0),
    ] {
        let report = delta_squared(&z, choice)?;
        for l in &cfg.lambdas {
            let lambda = sign * l;
            let gap = log_sobolev_gap(&z, lambda, &report.perturbed)?;
            let ent_scale = entropy(&z.map(|v| (lambda * v).exp())?.into_positive()?)?.max(1.0);
            pass &= gap >= -tol.exponential * ent_scale;
            min_log_sobolev_gap = min_log_sobolev_gap.min(gap);
            let mgf = herbst_mgf_check(&z, lambda, report.sup_norm, choice)?;
            pass &= mgf.holds(tol.exponential * mgf.bound.max(1.0));
            max_mgf_excess = max_mgf_excess.max(mgf.mgf - mgf.bound);
        }
    }
    Ok(EntropyRow {
        table,
        points: g.len(),
        entropy: h,
        tensorization_gap,
        duality_error,
        variation_error,
        min_log_sobolev_gap,
        max_mgf_excess,
        pass,
    })
}

pub fn entropy_check(cfg: &EntropyCheckConfig, format: Format) -> Result<Outcome> {
    cfg.validate()?;
    let tables = match (&cfg.input, cfg.random) {
        (Some(path), _) => vec![read_table(path)?
            .into_positive()
            .with_context(|| format!("{} is not a valid G", path.display()))?],
        (None, Some(count)) => (0..count as u64)
            .map(|i| random_table(i, cfg))
            .collect::<Result<_>>()?,
        (None, None) => unreachable!("validated"),
    };
    let rows = tables
        .iter()
        .enumerate()
        .map(|(i, g)| check_table(i, g, cfg))
        .collect::<Result<Vec<_>>>()?;
    let failing: Vec<usize> = rows.iter().filter(|r| !r.pass).map(|r| r.table).collect();
    let passed = failing.is_empty();
    let worst = rows
        .iter()
        .map(|r| r.tensorization_gap)
        .fold(f64::INFINITY, f64::min);
    let mut summary = format!(
        "{}: {} tables, min tensorization gap {worst:.3e}",
        if passed { "PASS" } else { "FAIL" },
        rows.len()
    );
    if !passed {
        summary.push_str(&format!("; failing tables {failing:?}"));
    }
    let body = match format {
        Format::Csv => to_csv(&rows)?,
        Format::Json => serde_json::to_string_pretty(&serde_json::json!({
            "config": cfg,
            "rows": rows,
            "passed": passed,
        }))?,
    };
    Ok(Outcome {
        body,
        passed,
        summary,
    })
}

#[derive(Debug, Serialize)]
struct CurvePoint {
    t: f64,
    choice: PerturbationChoice,
    sup_norm: f64,
    bound: f64,
}

pub fn delta(cfg: &DeltaConfig, format: Format) -> Result<Outcome> {
    cfg.validate()?;
    let path = cfg.input.as_deref().expect("validated");
    let z = read_table(path)?;
    let report = delta_squared(&z, cfg.choice)?;
    let curve = cfg
        .t_grid
        .iter()
        .map(|&t| {
            Ok(CurvePoint {
                t,
                choice: cfg.choice,
                sup_norm: report.sup_norm,
                bound: report.tail_bound(t)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = format!(
        "{} perturbation: sup-norm {} attained at {:?}",
        cfg.choice,
        report.sup_norm,
        report.argmax()
    );
    let body = match format {
        Format::Csv => to_csv(&curve)?,
        Format::Json => serde_json::to_string_pretty(&serde_json::json!({
            "report": report,
            "argmax": report.argmax(),
            "curve": curve,
        }))?,
    };
    Ok(Outcome {
        body,
        passed: true,
        summary,
    })
}

pub fn simulate(cfg: &SimulationConfig, workers: usize, format: Format) -> Result<Outcome> {
    cfg.validate()?;
    let report = tail_estimate(cfg, workers)?;
    let cmp = compare_report(&report);
    let body = match format {
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json()?,
    };
    Ok(Outcome {
        body,
        passed: cmp.passed,
        summary: cmp.summary,
    })
}

pub fn mp(cfg: &MpCheckConfig, workers: usize, format: Format) -> Result<Outcome> {
    let report = mp_check(cfg, workers)?;
    let verdict = match (report.enforced, report.passed) {
        (false, _) => "REPORT ONLY",
        (true, true) => "PASS",
        (true, false) => "FAIL",
    };
    let summary = format!(
        "{verdict}: KS distance {:.4} against ratio {} (threshold {}, enforced from n >= {})",
        report.ks_distance, report.ratio, cfg.threshold, cfg.min_dimension
    );
    let body = match format {
        Format::Csv => report.bins_to_csv()?,
        Format::Json => serde_json::to_string_pretty(&report)?,
    };
    Ok(Outcome {
        body,
        passed: report.passed,
        summary,
    })
}
