//! Dimensionless phase-space frames, Gaussian states and their exact evolution
//! under piecewise-constant displaced harmonic traps.
//!
//! A [`Frame`] is indexed by its trap frequency. Positions and momenta are
//! expressed as `X = sqrt(m w / 2 hbar) x` and `P = p / sqrt(2 hbar m w)`, so
//! the ground state of the frame is a disc of variance 1/4 in both quadratures
//! and free evolution is a clockwise rotation about the trap center.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::squeeze::change_frame;

/// Reduced Planck constant in J s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// Atomic mass unit in kg.
pub const AMU_KG: f64 = 1.660_539_066_60e-27;

/// Variance of either quadrature in a frame's ground state.
pub const GROUND_VARIANCE: f64 = 0.25;
/// Determinant of the covariance of any pure Gaussian state, (1/4)^2.
pub const PURE_DET: f64 = 1.0 / 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub omega: f64,
    pub mass: f64,
    pub hbar: f64,
}

impl Frame {
    pub fn new(omega: f64, mass: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("omega", omega), ("mass", mass), ("hbar", hbar)] {
            ensure(v.is_finite() && v > 0.0, || format!("{name} must be positive, got {v}"))?;
        }
        Ok(Self { omega, mass, hbar })
    }

    /// Frame with `hbar = m = 1`; `omega` is a multiple of the reference frequency.
    pub fn dimensionless(omega: f64) -> Result<Self> {
        Self::new(omega, 1.0, 1.0)
    }

    /// The reference frame `omega = 1` of dimensionless mode.
    pub fn reference() -> Self {
        Self {
            omega: 1.0,
            mass: 1.0,
            hbar: 1.0,
        }
    }

    /// Physical frame for a particle of `mass_kg` in a trap of angular frequency `omega_rad_s`.
    pub fn physical(omega_rad_s: f64, mass_kg: f64) -> Result<Self> {
        Self::new(omega_rad_s, mass_kg, HBAR_SI)
    }

    /// `sqrt(m w / 2 hbar)`, multiplies a physical position.
    pub fn position_scale(&self) -> f64 {
        (self.mass * self.omega / (2.0 * self.hbar)).sqrt()
    }

    /// `1 / sqrt(2 hbar m w)`, multiplies a physical momentum.
    pub fn momentum_scale(&self) -> f64 {
        1.0 / (2.0 * self.hbar * self.mass * self.omega).sqrt()
    }

    /// Same particle and action scale, different trap frequency.
    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        Self::new(omega, self.mass, self.hbar)
    }

    /// Converts a dimensionless position of this frame into the `other` frame.
    pub fn position_to(&self, x: f64, other: &Frame) -> f64 {
        x * other.position_scale() / self.position_scale()
    }
}

pub fn to_dimensionless(x_phys: f64, p_phys: f64, frame: &Frame) -> Result<(f64, f64)> {
    let frame = Frame::new(frame.omega, frame.mass, frame.hbar)?;
    Ok((x_phys * frame.position_scale(), p_phys * frame.momentum_scale()))
}

pub fn from_dimensionless(x: f64, p: f64, frame: &Frame) -> Result<(f64, f64)> {
    let frame = Frame::new(frame.omega, frame.mass, frame.hbar)?;
    Ok((x / frame.position_scale(), p / frame.momentum_scale()))
}

/// Mean and covariance of a Gaussian state in a stated frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    pub mean: Vector2<f64>,
    pub cov: Matrix2<f64>,
    pub frame: Frame,
}

impl GaussianState {
    pub fn new(mean: Vector2<f64>, cov: Matrix2<f64>, frame: Frame) -> Result<Self> {
        let finite = mean.iter().chain(cov.iter()).all(|v| v.is_finite());
        let sym_tol = 1e-12 * cov.abs().max().max(1.0);
        ensure(finite, || "state has non-finite entries".into())?;
        ensure((cov[(0, 1)] - cov[(1, 0)]).abs() <= sym_tol, || {
            "covariance must be symmetric".into()
        })?;
        ensure(cov[(0, 0)] > 0.0 && cov.determinant() > 0.0, || {
            "covariance must be positive definite".into()
        })?;
        Ok(Self { mean, cov, frame })
    }

    /// Ground state of `frame`, displaced to position `center`.
    pub fn ground(frame: Frame, center: f64) -> Self {
        Self::coherent(frame, center, 0.0)
    }

    pub fn coherent(frame: Frame, x: f64, p: f64) -> Self {
        Self {
            mean: Vector2::new(x, p),
            cov: Matrix2::identity() * GROUND_VARIANCE,
            frame,
        }
    }

    pub fn x(&self) -> f64 {
        self.mean[0]
    }

    pub fn p(&self) -> f64 {
        self.mean[1]
    }

    pub fn det(&self) -> f64 {
        self.cov.determinant()
    }

    pub fn is_pure(&self, rel_tol: f64) -> bool {
        (self.det() - PURE_DET).abs() <= rel_tol * PURE_DET
    }
}

/// Clockwise rotation by `angle` acting on column vectors `(X, P)`.
pub fn clockwise(angle: f64) -> Matrix2<f64> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(c, s, -s, c)
}

/// Rotates the state clockwise by `angle` about the phase-space point `(center, 0)`.
pub fn rotate_about(state: &GaussianState, center: f64, angle: f64) -> GaussianState {
    if angle == 0.0 {
        return *state;
    }
    let rot = clockwise(angle);
    let pivot = Vector2::new(center, 0.0);
    GaussianState {
        mean: pivot + rot * (state.mean - pivot),
        cov: rot * state.cov * rot.transpose(),
        frame: state.frame,
    }
}

/// Constant trap held for `duration`; `center` is expressed in `frame`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub center: f64,
    pub frame: Frame,
    pub duration: f64,
}

impl Segment {
    pub fn new(center: f64, frame: Frame, duration: f64) -> Result<Self> {
        let seg = Self {
            center,
            frame,
            duration,
        };
        seg.validate()?;
        Ok(seg)
    }

    /// Builds a segment from a center given in the `reference` frame.
    pub fn from_reference(center: f64, reference: &Frame, frame: Frame, duration: f64) -> Result<Self> {
        Self::new(reference.position_to(center, &frame), frame, duration)
    }

    /// Accumulated clockwise rotation angle.
    pub fn angle(&self) -> f64 {
        self.frame.omega * self.duration
    }

    fn validate(&self) -> Result<()> {
        Frame::new(self.frame.omega, self.frame.mass, self.frame.hbar)?;
        ensure(self.center.is_finite(), || {
            format!("segment center must be finite, got {}", self.center)
        })?;
        ensure(self.duration.is_finite() && self.duration >= 0.0, || {
            format!("segment duration must be nonnegative, got {}", self.duration)
        })
    }
}

pub fn evolve_segment(state: &GaussianState, segment: &Segment) -> Result<GaussianState> {
    if state.frame != segment.frame {
        return Err(Error::FrameMismatch {
            state: state.frame.omega,
            segment: segment.frame.omega,
        });
    }
    Ok(rotate_about(state, segment.center, segment.angle()))
}

/// Piecewise-constant trap trajectory. Before `t = 0` the trap sits at the
/// origin of `final_frame`; after the last segment it holds `final_center`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub segments: Vec<Segment>,
    pub final_center: f64,
    pub final_frame: Frame,
}

impl Schedule {
    pub fn new(segments: Vec<Segment>, final_center: f64, final_frame: Frame) -> Result<Self> {
        let schedule = Self {
            segments,
            final_center,
            final_frame,
        };
        schedule.validate()?;
        Ok(schedule)
    }

    pub fn validate(&self) -> Result<()> {
        Frame::new(self.final_frame.omega, self.final_frame.mass, self.final_frame.hbar)
            .map_err(|e| Error::InvalidSchedule(format!("final frame: {e}")))?;
        if !self.final_center.is_finite() {
            return Err(Error::InvalidSchedule("final center must be finite".into()));
        }
        for (i, seg) in self.segments.iter().enumerate() {
            seg.validate()
                .map_err(|e| Error::InvalidSchedule(format!("segment {i}: {e}")))?;
            if seg.frame.mass != self.final_frame.mass || seg.frame.hbar != self.final_frame.hbar {
                return Err(Error::InvalidSchedule(format!(
                    "segment {i}: frame describes a different particle than the reference frame"
                )));
            }
        }
        Ok(())
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Trap centers of every segment followed by the final center, all in the reference frame.
    pub fn reference_centers(&self) -> Vec<f64> {
        self.segments
            .iter()
            .map(|s| s.frame.position_to(s.center, &self.final_frame))
            .chain(std::iter::once(self.final_center))
            .collect()
    }

    /// Start times of every segment followed by the final event time.
    pub fn event_times(&self) -> Vec<f64> {
        let mut t = 0.0;
        let mut times = Vec::with_capacity(self.segments.len() + 1);
        for seg in &self.segments {
            times.push(t);
            t += seg.duration;
        }
        times.push(t);
        times
    }

    /// Keeps the trajectory up to time `t` and drops the rest; the final hold is unchanged.
    pub fn truncated(&self, t: f64) -> Result<Self> {
        ensure(t.is_finite() && t >= 0.0, || {
            format!("truncation time must be nonnegative, got {t}")
        })?;
        let mut left = t;
        let mut segments = Vec::new();
        for seg in &self.segments {
            if left <= 0.0 {
                break;
            }
            let duration = seg.duration.min(left);
            segments.push(Segment { duration, ..*seg });
            left -= duration;
        }
        Ok(Self {
            segments,
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Shift,
    Squeeze,
    ShiftAndSqueeze,
    Continue,
}

/// State just before and just after one discontinuity of the trap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventSnapshot {
    pub index: usize,
    pub time: f64,
    pub kind: EventKind,
    /// Trap center before and after, both in the reference frame.
    pub center_before: f64,
    pub center_after: f64,
    pub pre: GaussianState,
    pub post: GaussianState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evolution {
    pub final_state: GaussianState,
    pub snapshots: Vec<EventSnapshot>,
}

impl Evolution {
    pub fn snapshot_at(&self, index: usize) -> Option<&EventSnapshot> {
        self.snapshots.get(index)
    }
}

fn classify(center_before: f64, center_after: f64, omega_before: f64, omega_after: f64) -> EventKind {
    let tol = 1e-12 * center_before.abs().max(center_after.abs()).max(1.0);
    let shift = (center_before - center_after).abs() > tol;
    let squeeze = omega_before != omega_after;
    match (shift, squeeze) {
        (true, true) => EventKind::ShiftAndSqueeze,
        (true, false) => EventKind::Shift,
        (false, true) => EventKind::Squeeze,
        (false, false) => EventKind::Continue,
    }
}

/// Evolves `initial` through every segment of the schedule and the final hold.
///
/// `initial` must be expressed in the schedule's reference frame; the final
/// state is returned in that frame as well.
pub fn evolve_schedule(initial: &GaussianState, schedule: &Schedule) -> Result<Evolution> {
    schedule.validate()?;
    let reference = schedule.final_frame;
    if initial.frame != reference {
        return Err(Error::InvalidSchedule(format!(
            "initial state is in the omega = {} frame, schedule reference is omega = {}",
            initial.frame.omega, reference.omega
        )));
    }

    let mut snapshots = Vec::with_capacity(schedule.segments.len() + 1);
    let mut state = *initial;
    let mut center_ref = 0.0;
    let mut time = 0.0;

    let targets = schedule
        .segments
        .iter()
        .map(|s| (s.frame, Some(s)))
        .chain(std::iter::once((reference, None)));

    for (index, (frame, seg)) in targets.enumerate() {
        let next_center_ref = match seg {
            Some(s) => s.frame.position_to(s.center, &reference),
            None => schedule.final_center,
        };
        let pre = state;
        let post = change_frame(&state, frame.omega)?;
        snapshots.push(EventSnapshot {
            index,
            time,
            kind: classify(center_ref, next_center_ref, pre.frame.omega, frame.omega),
            center_before: center_ref,
            center_after: next_center_ref,
            pre,
            post,
        });
        state = post;
        center_ref = next_center_ref;
        if let Some(s) = seg {
            state = evolve_segment(&state, s)?;
            time += s.duration;
        }
    }

    Ok(Evolution {
        final_state: state,
        snapshots,
    })
}

/// Convenience wrapper starting from the reference ground state at the origin.
pub fn evolve_from_ground(schedule: &Schedule) -> Result<Evolution> {
    evolve_schedule(&GaussianState::ground(schedule.final_frame, 0.0), schedule)
}
