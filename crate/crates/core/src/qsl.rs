//! Quantum speed limits for BBB transport.
//!
//! A BBB run with displacement `R` keeps a coherent amplitude `|alpha| = R`,
//! so the mean excitation energy is `hbar w R^2` and the energy spread is
//! `hbar w R`. The Mandelstam-Tamm and Margolus-Levitin bounds follow from the
//! overlap of the initial and destination ground states.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::frame::{evolve_segment, GaussianState, Schedule};
use crate::protocols::{bbb_schedule, bbb_time, BbbParams};

/// `exp(-D^2 / 2)`, amplitude overlap of two ground states a distance `D` apart.
pub fn ground_state_overlap(d: f64) -> Result<f64> {
    ensure(d.is_finite() && d >= 0.0, || format!("D must be nonnegative, got {d}"))?;
    Ok((-d * d / 2.0).exp())
}

fn orthogonality_angle(d: f64, exact: bool) -> Result<f64> {
    if exact {
        Ok(ground_state_overlap(d)?.acos())
    } else {
        Ok(FRAC_PI_2)
    }
}

fn check_rate(omega: f64, r: f64) -> Result<()> {
    ensure(omega.is_finite() && omega > 0.0, || {
        format!("omega must be positive, got {omega}")
    })?;
    ensure(r.is_finite() && r > 0.0, || format!("R must be positive, got {r}"))
}

/// Mandelstam-Tamm bound; `exact` swaps the `pi/2` orthogonality approximation for `acos(overlap)`.
pub fn mt_bound(omega: f64, r: f64, d: f64, exact: bool) -> Result<f64> {
    check_rate(omega, r)?;
    Ok(orthogonality_angle(d, exact)? / (r * omega))
}

/// Margolus-Levitin bound; `exact` as in [`mt_bound`].
pub fn ml_bound(omega: f64, r: f64, d: f64, exact: bool) -> Result<f64> {
    check_rate(omega, r)?;
    Ok(orthogonality_angle(d, exact)? / (r * r * omega))
}

/// Large-`R` behaviour of the BBB time, `2 sqrt(D) / (omega sqrt(R))`.
pub fn bbb_asymptote(omega: f64, r: f64, d: f64) -> f64 {
    2.0 * d.sqrt() / (omega * r.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QslReport {
    pub r: f64,
    pub overlap: f64,
    pub tau_mt: f64,
    pub tau_ml: f64,
    pub tau_mt_exact: f64,
    pub tau_ml_exact: f64,
    pub tau_bbb: f64,
    pub asymptote: f64,
    /// Coherent amplitude measured on the evolved BBB trajectory.
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum QslRow {
    Report(QslReport),
    Skipped { r: f64, reason: String },
}

/// Distance of the evolved mean from the active trap center on both BBB arcs.
///
/// Both arcs must keep the distance `R`; the returned value is the distance at
/// the end of the second arc.
pub fn bbb_amplitude(params: &BbbParams) -> Result<f64> {
    let schedule: Schedule = bbb_schedule(params)?;
    let mut state = GaussianState::ground(schedule.segments[0].frame, 0.0);
    let mut amplitude = 0.0;
    for seg in &schedule.segments {
        let start = (state.x() - seg.center).hypot(state.p());
        state = evolve_segment(&state, seg)?;
        let end = (state.x() - seg.center).hypot(state.p());
        let r_seg = schedule.final_frame.position_to(params.r, &seg.frame);
        for dist in [start, end] {
            if (dist - r_seg).abs() > 1e-9 * r_seg.max(1.0) {
                return Err(Error::Inconsistency(format!(
                    "coherent amplitude {dist} departs from R = {r_seg} on a BBB arc"
                )));
            }
        }
        amplitude = seg.frame.position_to(end, &schedule.final_frame);
    }
    Ok(amplitude)
}

pub fn qsl_report(omega: f64, r: f64, d: f64) -> Result<QslReport> {
    let params = BbbParams::new(d, r, omega)?;
    Ok(QslReport {
        r,
        overlap: ground_state_overlap(d)?,
        tau_mt: mt_bound(omega, r, d, false)?,
        tau_ml: ml_bound(omega, r, d, false)?,
        tau_mt_exact: mt_bound(omega, r, d, true)?,
        tau_ml_exact: ml_bound(omega, r, d, true)?,
        tau_bbb: bbb_time(omega, r, d)?,
        asymptote: bbb_asymptote(omega, r, d),
        amplitude: bbb_amplitude(&params)?,
    })
}

/// One row per grid value; infeasible `R` become [`QslRow::Skipped`].
pub fn bbb_vs_bounds(omega: f64, d: f64, r_grid: &[f64]) -> Result<Vec<QslRow>> {
    ensure(d.is_finite() && d > 0.0, || format!("D must be positive, got {d}"))?;
    ensure(omega.is_finite() && omega > 0.0, || {
        format!("omega must be positive, got {omega}")
    })?;
    r_grid
        .iter()
        .map(|&r| match qsl_report(omega, r, d) {
            Ok(rep) => Ok(QslRow::Report(rep)),
            Err(e @ (Error::InfeasibleDisplacement { .. } | Error::InvalidParameter(_))) => Ok(QslRow::Skipped {
                r,
                reason: e.to_string(),
            }),
            Err(e) => Err(e),
        })
        .collect()
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    ensure(lo > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite(), || {
        format!("log grid needs 0 < lo <= hi, got [{lo}, {hi}]")
    })?;
    ensure(n >= 2, || format!("log grid needs at least two points, got {n}"))?;
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

/// Default R grid: 500 log-spaced values over `[D, 100 D]`.
pub fn default_r_grid(d: f64) -> Result<Vec<f64>> {
    log_grid(d, 100.0 * d, 500)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn overlap_values() {
        assert_eq!(ground_state_overlap(0.0).unwrap(), 1.0);
        let o = ground_state_overlap(3.0).unwrap();
        assert!((0.0110..=0.0112).contains(&o));
        assert_eq!(ground_state_overlap(6.0).unwrap(), (-18f64).exp());
        assert!(ground_state_overlap(-1.0).is_err());
    }

    #[test]
    fn bound_values() {
        assert_abs_diff_eq!(mt_bound(1.0, 10.0, 3.0, false).unwrap(), PI / 20.0);
        assert_abs_diff_eq!(ml_bound(1.0, 10.0, 3.0, false).unwrap(), PI / 200.0);
        assert_abs_diff_eq!(mt_bound(1.0, 1.0, 40.0, true).unwrap(), PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            mt_bound(1.0, 10.0, 3.0, true).unwrap(),
            (-4.5f64).exp().acos() / 10.0,
            epsilon = 1e-15
        );
        assert_eq!(
            ml_bound(1.0, 1.0, 3.0, true).unwrap(),
            mt_bound(1.0, 1.0, 3.0, true).unwrap()
        );
        assert!(mt_bound(1.0, 0.0, 3.0, false).is_err());
    }

    #[test]
    fn approximation_gap_below_one_percent() {
        for d in [3.0, 4.0, 10.0] {
            let ratio = mt_bound(1.0, 5.0, d, true).unwrap() / mt_bound(1.0, 5.0, d, false).unwrap();
            assert!(ratio <= 1.0 && ratio > 1.0 - 0.0071, "D = {d}: {ratio}");
        }
    }

    #[test]
    fn amplitude_equals_r() {
        for r in [3.0, 4.5, 6.0, 12.0] {
            let a = bbb_amplitude(&BbbParams::new(6.0, r, 1.0).unwrap()).unwrap();
            assert_abs_diff_eq!(a, r, epsilon = 1e-9);
        }
    }

    #[test]
    fn bb_row_and_skips() {
        let rows = bbb_vs_bounds(1.0, 6.0, &[1.0, 3.0]).unwrap();
        assert!(matches!(rows[0], QslRow::Skipped { .. }));
        match &rows[1] {
            QslRow::Report(rep) => assert_abs_diff_eq!(rep.tau_bbb, PI, epsilon = 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(3.0, 300.0, 500).unwrap();
        assert_eq!(g.len(), 500);
        assert_eq!((g[0], g[499]), (3.0, 300.0));
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!(log_grid(0.0, 1.0, 5).is_err());
    }
}
