//! BBB transport time against the quantum speed limits.

use std::io::Write;

use coherent_transport::qsl::{bbb_vs_bounds, log_grid, QslReport, QslRow};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::format::csv_row;

pub const CSV_HEADER: &str = "R,tau_bbb,tau_mt,tau_ml,asymptote";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QslSettings {
    pub d: f64,
    pub omega: f64,
    pub points: usize,
    pub r_min: f64,
    pub r_max: f64,
}

impl QslSettings {
    /// 500 log-spaced `R` over `[D, 100 D]`.
    pub fn for_distance(d: f64) -> Self {
        Self {
            d,
            omega: 1.0,
            points: 500,
            r_min: d,
            r_max: 100.0 * d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QslTable {
    pub settings: QslSettings,
    pub rows: Vec<QslReport>,
    pub skipped: Vec<(f64, String)>,
    /// Rows where the `pi/2` approximation of the bounds exceeds the BBB time.
    pub approximation_warnings: Vec<f64>,
}

impl QslTable {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(out, "{}", csv_row(&[r.r, r.tau_bbb, r.tau_mt, r.tau_ml, r.asymptote]))?;
        }
        Ok(())
    }
}

/// Builds the table and checks `tau_bbb > tau_mt >= tau_ml` with the exact
/// bounds on every row with `R >= 1`; a violation is an internal error.
pub fn qsl_table(settings: &QslSettings) -> Result<QslTable, CliError> {
    let grid = log_grid(settings.r_min, settings.r_max, settings.points)?;
    let mut table = QslTable {
        settings: *settings,
        rows: Vec::new(),
        skipped: Vec::new(),
        approximation_warnings: Vec::new(),
    };
    for row in bbb_vs_bounds(settings.omega, settings.d, &grid)? {
        match row {
            QslRow::Report(r) => table.rows.push(r),
            QslRow::Skipped { r, reason } => table.skipped.push((r, reason)),
        }
    }
    for r in table.rows.iter().filter(|r| r.r >= 1.0) {
        if !(r.tau_bbb > r.tau_mt_exact && r.tau_mt_exact >= r.tau_ml_exact) {
            return Err(CliError::Internal(format!(
                "speed-limit ordering broken at R = {}: tau_bbb = {}, tau_mt = {}, tau_ml = {}",
                r.r, r.tau_bbb, r.tau_mt_exact, r.tau_ml_exact
            )));
        }
        if !(r.tau_bbb > r.tau_mt && r.tau_mt >= r.tau_ml) {
            table.approximation_warnings.push(r.r);
        }
    }
    Ok(table)
}
