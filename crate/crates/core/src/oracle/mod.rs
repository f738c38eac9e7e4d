//! Independent checks that a schedule delivers the destination ground state.
//!
//! Two routes: the closed-form overlap of pure Gaussian states evolved with
//! the exact symplectic maps, and a split-operator integration of the
//! Schrodinger equation on a position grid.

mod grid;

pub use grid::{grid_propagate, grid_run, write_snapshot_dump, GridConfig, GridRun, MomentSnapshot, WaveSnapshot};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{evolve_from_ground, GaussianState, Schedule, PURE_DET};

/// Relative slack on `det(cov) = 1/16` before a state counts as mixed.
const PURITY_TOL: f64 = 1e-9;

/// Largest allowed gap between the two oracles.
pub const CROSS_ORACLE_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Gaussian,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityResult {
    pub fidelity: f64,
    pub method: Method,
    /// Mean momentum `<P>` of the final state in the reference frame.
    pub residual_momentum: f64,
    /// Largest relative energy change within a constant segment.
    pub energy_drift: f64,
    pub norm_drift: f64,
    pub final_mean_x: f64,
}

/// `|<psi1|psi2>|^2` of two pure Gaussian states in the same frame.
///
/// With covariances normalised to `1/4` for the ground state this is
/// `exp(-d^T (V1 + V2)^-1 d / 2) / (2 sqrt(det(V1 + V2)))`.
pub fn gaussian_fidelity(state: &GaussianState, target: &GaussianState) -> Result<f64> {
    if state.frame != target.frame {
        return Err(Error::FrameMismatch {
            state: state.frame.omega,
            segment: target.frame.omega,
        });
    }
    for s in [state, target] {
        if !s.is_pure(PURITY_TOL) {
            return Err(Error::UnsupportedState(format!(
                "covariance determinant {} differs from the pure-state value {PURE_DET}",
                s.det()
            )));
        }
    }
    let sum = state.cov + target.cov;
    let delta = state.mean - target.mean;
    let inv = sum
        .try_inverse()
        .ok_or_else(|| Error::UnsupportedState("singular covariance sum".into()))?;
    let quad = (delta.transpose() * inv * delta)[(0, 0)];
    let f = (-0.5 * quad).exp() / (2.0 * sum.determinant().sqrt());
    Ok(f.clamp(0.0, 1.0))
}

/// Gaussian-oracle fidelity of a schedule against the destination ground state.
pub fn gaussian_schedule_fidelity(schedule: &Schedule) -> Result<FidelityResult> {
    let end = evolve_from_ground(schedule)?.final_state;
    let target = GaussianState::ground(schedule.final_frame, schedule.final_center);
    Ok(FidelityResult {
        fidelity: gaussian_fidelity(&end, &target)?,
        method: Method::Gaussian,
        residual_momentum: end.p(),
        energy_drift: 0.0,
        norm_drift: 0.0,
        final_mean_x: end.x(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub gaussian: FidelityResult,
    pub grid: FidelityResult,
    pub gap: f64,
}

/// Runs both oracles and fails if they disagree by more than [`CROSS_ORACLE_TOL`].
///
/// On disagreement the grid run is repeated at half the time step; if the gap
/// shrinks the grid discretisation is named as the likely culprit.
pub fn cross_validate(schedule: &Schedule, grid: &GridConfig) -> Result<CrossValidation> {
    let gaussian = gaussian_schedule_fidelity(schedule)?;
    let on_grid = grid_propagate(schedule, grid)?;
    let gap = (gaussian.fidelity - on_grid.fidelity).abs();
    if gap < CROSS_ORACLE_TOL {
        return Ok(CrossValidation {
            gaussian,
            grid: on_grid,
            gap,
        });
    }

    let finer = GridConfig {
        dt: grid.dt / 2.0,
        ..*grid
    };
    let refined = (gaussian.fidelity - grid_propagate(schedule, &finer)?.fidelity).abs();
    let suspect = if refined < 0.5 * gap {
        "grid time step (gap shrinks under dt refinement)"
    } else {
        "Gaussian evolution or schedule (gap insensitive to dt refinement)"
    };
    Err(Error::Inconsistency(format!(
        "Gaussian fidelity {} vs grid fidelity {}: gap {gap:.3e} at dt = {}, {refined:.3e} at dt/2; suspect {suspect}",
        gaussian.fidelity, on_grid.fidelity, grid.dt
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Frame;
    use crate::squeeze::change_frame;
    use approx::assert_abs_diff_eq;
    use nalgebra::Matrix2;

    #[test]
    fn identical_states() {
        let s = GaussianState::coherent(Frame::reference(), 1.0, 2.0);
        assert_abs_diff_eq!(gaussian_fidelity(&s, &s).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn displaced_ground_states() {
        let a = GaussianState::ground(Frame::reference(), 0.0);
        let b = GaussianState::ground(Frame::reference(), 3.0);
        let f = gaussian_fidelity(&a, &b).unwrap();
        assert_abs_diff_eq!(f, (-9f64).exp(), epsilon = 1e-18);
        assert_abs_diff_eq!(f.sqrt(), 0.0111, epsilon = 1e-4);
    }

    #[test]
    fn frame_covariant() {
        let a = GaussianState::coherent(Frame::reference(), 0.4, -0.3);
        let b = change_frame(&GaussianState::ground(Frame::dimensionless(3.0).unwrap(), 1.0), 1.0).unwrap();
        let f = gaussian_fidelity(&a, &b).unwrap();
        let f2 = gaussian_fidelity(&change_frame(&a, 2.0).unwrap(), &change_frame(&b, 2.0).unwrap()).unwrap();
        assert_abs_diff_eq!(f, f2, epsilon = 1e-14);
        assert!(f < 1.0);
    }

    #[test]
    fn mixed_state_rejected() {
        let a = GaussianState::ground(Frame::reference(), 0.0);
        let mixed = GaussianState {
            cov: Matrix2::identity() * 0.3,
            ..a
        };
        assert!(matches!(gaussian_fidelity(&a, &mixed), Err(Error::UnsupportedState(_))));
    }
}
