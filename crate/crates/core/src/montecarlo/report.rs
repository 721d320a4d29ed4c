use std::fmt::Write as _;

use serde::Serialize;

use super::{finish_csv, CenterEstimate, SimulationConfig};
use crate::delta::TailSide;
use crate::error::{Error, Result};

/// One threshold of a [`TailReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailRow {
    pub t: f64,
    pub count_right: u64,
    pub count_left: u64,
    pub emp_right: f64,
    pub emp_left: f64,
    /// Clopper-Pearson half-widths.
    pub ci_half_right: f64,
    pub ci_half_left: f64,
    pub bound_right: f64,
    pub bound_left: f64,
    /// Allowance above the bound, per side.
    pub slack_right: f64,
    pub slack_left: f64,
    pub pass_right: bool,
    pub pass_left: bool,
}

impl TailRow {
    pub fn new(
        t: f64,
        (count_right, count_left): (u64, u64),
        samples: u64,
        (ci_half_right, ci_half_left): (f64, f64),
        (bound_right, bound_left): (f64, f64),
        center_slack: f64,
    ) -> Self {
        let m = samples as f64;
        let mut row = Self {
            t,
            count_right,
            count_left,
            emp_right: count_right as f64 / m,
            emp_left: count_left as f64 / m,
            ci_half_right,
            ci_half_left,
            bound_right,
            bound_left,
            slack_right: ci_half_right + center_slack,
            slack_left: ci_half_left + center_slack,
            pass_right: false,
            pass_left: false,
        };
        row.refresh();
        row
    }

    /// Recomputes the pass flags from the stored numbers.
    pub fn refresh(&mut self) {
        self.pass_right = self.emp_right <= self.bound_right + self.slack_right;
        self.pass_left = self.emp_left <= self.bound_left + self.slack_left;
    }

    /// `bound + slack - empirical` for one side; negative means failure.
    pub fn margin(&self, side: TailSide) -> f64 {
        match side {
            TailSide::Right => self.bound_right + self.slack_right - self.emp_right,
            TailSide::Left => self.bound_left + self.slack_left - self.emp_left,
        }
    }

    pub fn passed(&self, side: TailSide) -> bool {
        match side {
            TailSide::Right => self.pass_right,
            TailSide::Left => self.pass_left,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub config: SimulationConfig,
    pub center: CenterEstimate,
    pub rows: Vec<TailRow>,
}

impl TailReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass_right && r.pass_left)
    }

    /// CSV with one line per threshold. `ci_half` is the wider of the two
    /// sides' half-widths.
    pub fn to_csv(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Line {
            t: f64,
            emp_right: f64,
            emp_left: f64,
            ci_half: f64,
            bound_right: f64,
            bound_left: f64,
            pass_right: bool,
            pass_left: bool,
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(Line {
                t: r.t,
                emp_right: r.emp_right,
                emp_left: r.emp_left,
                ci_half: r.ci_half_right.max(r.ci_half_left),
                bound_right: r.bound_right,
                bound_left: r.bound_left,
                pass_right: r.pass_right,
                pass_left: r.pass_left,
            })
            .map_err(|e| Error::Numeric {
                tag: None,
                detail: e.to_string(),
            })?;
        }
        finish_csv(w)
    }

    /// Pretty JSON envelope: config echo, center estimate, rows, overall flag.
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Envelope<'a> {
            config: &'a SimulationConfig,
            center: &'a CenterEstimate,
            rows: &'a [TailRow],
            passed: bool,
        }
        serde_json::to_string_pretty(&Envelope {
            config: &self.config,
            center: &self.center,
            rows: &self.rows,
            passed: self.passed(),
        })
        .map_err(|e| Error::Numeric {
            tag: None,
            detail: e.to_string(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RowFailure {
    pub t: f64,
    pub side: TailSide,
    pub empirical: f64,
    pub allowed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub passed: bool,
    /// Every failing (threshold, side), in grid order.
    pub failures: Vec<RowFailure>,
    /// Smallest `bound + slack - empirical` over all rows and sides.
    pub tightest: Option<(f64, TailSide, f64)>,
    pub summary: String,
}

impl Comparison {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

pub fn compare_report(report: &TailReport) -> Comparison {
    let mut failures = Vec::new();
    let mut tightest: Option<(f64, TailSide, f64)> = None;
    for r in &report.rows {
        for side in [TailSide::Right, TailSide::Left] {
            let margin = r.margin(side);
            if tightest.is_none_or(|(_, _, m)| margin < m) {
                tightest = Some((r.t, side, margin));
            }
            if !r.passed(side) {
                let (empirical, bound, slack) = match side {
                    TailSide::Right => (r.emp_right, r.bound_right, r.slack_right),
                    TailSide::Left => (r.emp_left, r.bound_left, r.slack_left),
                };
                failures.push(RowFailure {
                    t: r.t,
                    side,
                    empirical,
                    allowed: bound + slack,
                });
            }
        }
    }
    let passed = failures.is_empty();
    let mut summary = format!(
        "{}: {} thresholds x 2 sides, center {:.6} (stderr {:.2e})",
        if passed { "PASS" } else { "FAIL" },
        report.rows.len(),
        report.center.mean,
        report.center.stderr
    );
    if let Some((t, side, m)) = tightest {
        let _ = write!(summary, "; tightest margin {m:.4e} at t={t} ({side})");
    }
    for f in &failures {
        let _ = write!(
            summary,
            "\n  violation at t={} ({}): empirical {:.6} > allowed {:.6}",
            f.t, f.side, f.empirical, f.allowed
        );
    }
    Comparison {
        passed,
        failures,
        tightest,
        summary,
    }
}
