//! DSBBB time-advantage sweep over the `(omega2, t2)` plane.

use std::f64::consts::PI;
use std::io::Write;

use coherent_transport::protocols::{dsbbb_time, DsbbbParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::format::csv_row;

pub const CSV_HEADER: &str = "omega2,t2,theta2,tau_dsbbb,advantage";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSettings {
    pub omega1: f64,
    pub n_omega2: usize,
    pub n_t2: usize,
    /// Transport distance and BBB displacement used for feasibility checks.
    pub d: f64,
    pub r: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            omega1: 2.0,
            n_omega2: 200,
            n_t2: 200,
            d: 6.0,
            r: 6.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanCell {
    pub omega2: f64,
    pub t2: f64,
    pub theta2: f64,
    pub tau_dsbbb: f64,
    /// `(tau_dsbbb - pi/omega1) / (pi/omega1)`; negative means DSBBB is faster.
    pub advantage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub omega1: f64,
    pub resolution: (usize, usize),
    /// Row-major with `omega2` outer and `t2` inner, both ascending.
    pub cells: Vec<ScanCell>,
}

impl ScanResult {
    pub fn cell(&self, i_omega2: usize, j_t2: usize) -> &ScanCell {
        &self.cells[i_omega2 * self.resolution.1 + j_t2]
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for c in &self.cells {
            writeln!(
                out,
                "{}",
                csv_row(&[c.omega2, c.t2, c.theta2, c.tau_dsbbb, c.advantage])
            )?;
        }
        Ok(())
    }
}

/// `omega2 = omega1 i / n` for `i = 1..=n`; the last value is `omega1` exactly.
pub fn omega2_axis(omega1: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| if i == n { omega1 } else { omega1 * i as f64 / n as f64 })
        .collect()
}

/// `t2 = (pi / (2 omega1)) j / n` for `j = 1..=n`.
pub fn t2_axis(omega1: f64, n: usize) -> Vec<f64> {
    let t_max = PI / (2.0 * omega1);
    (1..=n)
        .map(|j| if j == n { t_max } else { t_max * j as f64 / n as f64 })
        .collect()
}

pub fn run_scan(settings: &ScanSettings) -> Result<ScanResult, CliError> {
    let ScanSettings {
        omega1,
        n_omega2,
        n_t2,
        d,
        r,
    } = *settings;
    if n_omega2 == 0 || n_t2 == 0 {
        return Err(CliError::Invalid(format!(
            "scan resolution must be positive, got {n_omega2} x {n_t2}"
        )));
    }
    // Validates omega1, D and R once before fanning out.
    DsbbbParams::new(omega1, omega1, PI / (4.0 * omega1), r, d)?;

    let omegas = omega2_axis(omega1, n_omega2);
    let times = t2_axis(omega1, n_t2);
    let reference = PI / omega1;
    let cells = (0..n_omega2 * n_t2)
        .into_par_iter()
        .map(|k| {
            let (omega2, t2) = (omegas[k / n_t2], times[k % n_t2]);
            let timing = dsbbb_time(&DsbbbParams::new(omega1, omega2, t2, r, d)?)?;
            let advantage = (timing.total_time - reference) / reference;
            Ok(ScanCell {
                omega2,
                t2,
                theta2: timing.theta2,
                tau_dsbbb: timing.total_time,
                advantage,
            })
        })
        .collect::<Result<Vec<_>, coherent_transport::Error>>()?;

    if let Some(bad) = cells
        .iter()
        .find(|c| !(c.advantage.is_finite() && c.theta2.is_finite()))
    {
        return Err(CliError::Internal(format!("non-finite scan cell {bad:?}")));
    }
    Ok(ScanResult {
        omega1,
        resolution: (n_omega2, n_t2),
        cells,
    })
}

/// Gnuplot script drawing the advantage map from the CSV at `csv_path`.
pub fn gnuplot_script(csv_path: &str, result: &ScanResult) -> String {
    let (n_w, n_t) = result.resolution;
    format!(
        "# DSBBB time advantage, omega1 = {w1}, {n_w} x {n_t} cells\n\
         set datafile separator ','\n\
         set xlabel 'omega2'\n\
         set ylabel 't2'\n\
         set cblabel '(tau_DSBBB - pi/omega1) / (pi/omega1)'\n\
         set palette defined (-1 'blue', 0 'white', 1 'red')\n\
         set cbrange [-1:1]\n\
         set view map\n\
         splot '{csv_path}' every ::1 using 1:2:5 with image notitle\n",
        w1 = result.omega1
    )
}
