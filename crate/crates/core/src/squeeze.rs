//! Sudden trap-frequency changes and the orientation of squeezed ellipses.
//!
//! Switching the trap from `w_from` to `w_to` leaves the wavefunction untouched
//! but rescales the dimensionless quadratures by `diag(sqrt(w_to/w_from),
//! sqrt(w_from/w_to))`. The orientation angle of the resulting ellipse is
//! tracked through its semi-axis vectors.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::frame::{clockwise, GaussianState};

const AXIS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeMap {
    pub omega_from: f64,
    pub omega_to: f64,
    pub matrix: Matrix2<f64>,
}

impl SqueezeMap {
    pub fn new(omega_from: f64, omega_to: f64) -> Result<Self> {
        for (name, v) in [("omega_from", omega_from), ("omega_to", omega_to)] {
            ensure(v.is_finite() && v > 0.0, || format!("{name} must be positive, got {v}"))?;
        }
        let r = (omega_to / omega_from).sqrt();
        let matrix = if omega_from == omega_to {
            Matrix2::identity()
        } else {
            Matrix2::new(r, 0.0, 0.0, 1.0 / r)
        };
        Ok(Self {
            omega_from,
            omega_to,
            matrix,
        })
    }

    pub fn apply(&self, v: &Vector2<f64>) -> Vector2<f64> {
        self.matrix * v
    }
}

/// Re-expresses `state` in the frame of trap frequency `omega_to`.
pub fn change_frame(state: &GaussianState, omega_to: f64) -> Result<GaussianState> {
    if omega_to == state.frame.omega {
        return Ok(*state);
    }
    let map = SqueezeMap::new(state.frame.omega, omega_to)?;
    let s = map.matrix;
    Ok(GaussianState {
        mean: s * state.mean,
        cov: s * state.cov * s.transpose(),
        frame: state.frame.with_omega(omega_to)?,
    })
}

/// Semi-axis vectors of a 1-sigma ellipse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseAxes {
    pub a: Vector2<f64>,
    pub b: Vector2<f64>,
    pub is_circular: bool,
}

impl EllipseAxes {
    pub fn major(&self) -> f64 {
        self.a.norm()
    }

    pub fn minor(&self) -> f64 {
        self.b.norm()
    }

    /// Covariance whose 1-sigma contour is this ellipse.
    pub fn covariance(&self) -> Matrix2<f64> {
        self.a * self.a.transpose() + self.b * self.b.transpose()
    }
}

/// Semi-axes of the ellipse `v(phi) = cos(phi) a' + sin(phi) b'`.
///
/// The extrema of `|v(phi)|` satisfy `tan(2 phi) = 2 a'.b' / (|a'|^2 - |b'|^2)`;
/// both roots are evaluated and sorted by length.
pub fn principal_axes(a_prime: Vector2<f64>, b_prime: Vector2<f64>) -> Result<EllipseAxes> {
    let (na, nb) = (a_prime.norm(), b_prime.norm());
    if !(na > 0.0 && nb > 0.0) || !na.is_finite() || !nb.is_finite() {
        return Err(Error::DegenerateAxes);
    }
    let cross = a_prime[0] * b_prime[1] - a_prime[1] * b_prime[0];
    if cross.abs() <= AXIS_TOL * na * nb {
        return Err(Error::DegenerateAxes);
    }

    let dot = a_prime.dot(&b_prime);
    let diff = na * na - nb * nb;
    let scale = na * na + nb * nb;
    if diff.abs() <= AXIS_TOL * scale && dot.abs() <= AXIS_TOL * scale {
        return Ok(EllipseAxes {
            a: a_prime,
            b: b_prime,
            is_circular: true,
        });
    }

    let alpha = 0.5 * (2.0 * dot).atan2(diff);
    let beta = alpha + std::f64::consts::FRAC_PI_2;
    let at = |phi: f64| phi.cos() * a_prime + phi.sin() * b_prime;
    let (mut a, mut b) = (at(alpha), at(beta));
    if b.norm() > a.norm() {
        std::mem::swap(&mut a, &mut b);
    }
    Ok(EllipseAxes {
        a,
        b,
        is_circular: false,
    })
}

/// Clockwise angle of the semi-major axis from `+X`, in `[0, pi)`.
pub fn orientation_angle(axes: &EllipseAxes) -> f64 {
    if axes.is_circular {
        return 0.0;
    }
    reduce_mod_pi((-axes.a[1]).atan2(axes.a[0]))
}

pub(crate) fn reduce_mod_pi(theta: f64) -> f64 {
    use std::f64::consts::PI;
    let r = theta.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Semi-axes `(a0, b0)` of the reference ground state seen in the `omega1` frame.
pub fn squeezed_ground_axes(omega1: f64) -> (Vector2<f64>, Vector2<f64>) {
    (
        Vector2::new(0.5 * omega1.sqrt(), 0.0),
        Vector2::new(0.0, 0.5 / omega1.sqrt()),
    )
}

/// Principal axes after: squeeze to `omega1`, clockwise rotation by `theta1`,
/// squeeze to `omega2`. Frequencies are multiples of the reference frequency.
pub fn second_squeeze_axes(omega1: f64, omega2: f64, theta1: f64) -> Result<EllipseAxes> {
    let map = SqueezeMap::new(omega1, omega2)?;
    ensure(theta1.is_finite(), || format!("theta1 must be finite, got {theta1}"))?;
    let (a0, b0) = squeezed_ground_axes(omega1);
    let rot = clockwise(theta1);
    principal_axes(map.apply(&(rot * a0)), map.apply(&(rot * b0)))
}

/// Orientation angle right after the second squeeze `omega1 -> omega2`,
/// given the angle `theta1` accumulated under `omega1`.
pub fn theta2(omega1: f64, omega2: f64, theta1: f64) -> Result<f64> {
    ensure((0.0..std::f64::consts::PI).contains(&theta1), || {
        format!("theta1 must lie in [0, pi), got {theta1}")
    })?;
    if omega1 == omega2 {
        SqueezeMap::new(omega1, omega2)?;
        return Ok(theta1);
    }
    Ok(orientation_angle(&second_squeeze_axes(omega1, omega2, theta1)?))
}
