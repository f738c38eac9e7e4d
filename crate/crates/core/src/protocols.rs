//! Transport schedules built from closed-form timings: BB, BBB, SBBB, DSBBB.
//!
//! All distances are dimensionless positions of the reference frame and all
//! frequencies are multiples of the reference frequency. Times are measured in
//! units of the inverse reference frequency.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::frame::{evolve_from_ground, evolve_schedule, EventSnapshot, Frame, GaussianState, Schedule, Segment};
use crate::squeeze::theta2;

fn positive(name: &str, v: f64) -> Result<()> {
    ensure(v.is_finite() && v > 0.0, || format!("{name} must be positive, got {v}"))
}

/// Fastest transport time reachable with forward-only trap moves.
pub fn forward_speed_limit(omega: f64) -> Result<f64> {
    positive("omega", omega)?;
    Ok(PI / omega)
}

/// `(2 / omega) * acos((2R - D) / 2R)`, defined for `R >= D/4`.
pub fn bbb_time(omega: f64, r: f64, d: f64) -> Result<f64> {
    positive("omega", omega)?;
    positive("D", d)?;
    positive("R", r)?;
    if r < d / 4.0 {
        return Err(Error::InfeasibleDisplacement { r, d, min: d / 4.0 });
    }
    let arg = ((2.0 * r - d) / (2.0 * r)).max(-1.0);
    Ok(2.0 / omega * arg.acos())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BbbParams {
    pub d: f64,
    pub r: f64,
    pub omega: f64,
}

impl BbbParams {
    pub fn new(d: f64, r: f64, omega: f64) -> Result<Self> {
        bbb_time(omega, r, d)?;
        Ok(Self { d, r, omega })
    }

    pub fn time(&self) -> Result<f64> {
        bbb_time(self.omega, self.r, self.d)
    }
}

/// Shift to `D/2`, wait half a period, shift to `D`, all in the `omega` frame.
pub fn bb_schedule(d: f64, omega: f64) -> Result<Schedule> {
    positive("D", d)?;
    let frame = Frame::dimensionless(omega)?;
    let seg = Segment::new(d / 2.0, frame, forward_speed_limit(omega)?)?;
    Schedule::new(vec![seg], d, frame)
}

/// Trap at `R` for half the transport time, then at `D - R`, then held at `D`.
///
/// Distances are in units of the trap's own ground-state width.
pub fn bbb_schedule(params: &BbbParams) -> Result<Schedule> {
    let half = params.time()? / 2.0;
    let frame = Frame::dimensionless(params.omega)?;
    let segments = vec![
        Segment::new(params.r, frame, half)?,
        Segment::new(params.d - params.r, frame, half)?,
    ];
    Schedule::new(segments, params.d, frame)
}

/// Total time of the single-frequency squeezed protocol, `pi / omega1`.
pub fn sbbb_time(omega1: f64) -> Result<f64> {
    forward_speed_limit(omega1)
}

/// Spatial transport time and the extra orientation wait of SBBB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SbbbSplit {
    pub tau_tr: f64,
    pub tau_ex: f64,
}

/// Requires `R >= D/2`: a forward-only BBB already overruns `pi / omega1`.
pub fn sbbb_split(omega1: f64, r: f64, d: f64) -> Result<SbbbSplit> {
    let tau_tr = bbb_time(omega1, r, d)?;
    ensure(r >= d / 2.0, || {
        format!("SBBB needs R >= D/2 so that transport fits in pi/omega1, got R = {r}, D = {d}")
    })?;
    Ok(SbbbSplit {
        tau_tr,
        tau_ex: (sbbb_time(omega1)? - tau_tr).max(0.0),
    })
}

/// Squeeze to `omega1`, run BBB, wait for the ellipse to realign, squeeze back at `D`.
pub fn sbbb_schedule(omega1: f64, r: f64, d: f64) -> Result<Schedule> {
    let split = sbbb_split(omega1, r, d)?;
    let reference = Frame::reference();
    let frame = Frame::dimensionless(omega1)?;
    let segments = vec![
        Segment::from_reference(r, &reference, frame, split.tau_tr / 2.0)?,
        Segment::from_reference(d - r, &reference, frame, split.tau_tr / 2.0)?,
        Segment::from_reference(d, &reference, frame, split.tau_ex)?,
    ];
    Schedule::new(segments, d, reference)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DsbbbParams {
    pub omega0: f64,
    pub omega1: f64,
    pub omega2: f64,
    /// Wait under `omega1` before and after the `omega2` window.
    pub t2: f64,
    pub r: f64,
    pub d: f64,
    /// Delay of the BBB shifts after the opening of the `omega2` window.
    pub offset: f64,
}

impl DsbbbParams {
    pub fn new(omega1: f64, omega2: f64, t2: f64, r: f64, d: f64) -> Result<Self> {
        let p = Self {
            omega0: 1.0,
            omega1,
            omega2,
            t2,
            r,
            d,
            offset: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("omega0", self.omega0)?;
        positive("omega2", self.omega2)?;
        positive("t2", self.t2)?;
        ensure(self.omega1.is_finite() && self.omega1 > self.omega0, || {
            format!("omega1 must exceed omega0 = {}, got {}", self.omega0, self.omega1)
        })?;
        ensure(self.omega2 <= self.omega1, || {
            format!("omega2 must not exceed omega1 = {}, got {}", self.omega1, self.omega2)
        })?;
        let t2_max = self.t2_max();
        ensure(self.t2 <= t2_max * (1.0 + 1e-12), || {
            format!("t2 must lie in (0, pi/(2 omega1)] = (0, {t2_max}], got {}", self.t2)
        })?;
        ensure(self.offset.is_finite() && self.offset >= 0.0, || {
            format!("offset must be nonnegative, got {}", self.offset)
        })?;
        bbb_time(self.omega2, self.r, self.d).map(|_| ())
    }

    pub fn t2_max(&self) -> f64 {
        PI / (2.0 * self.omega1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DsbbbTiming {
    pub total_time: f64,
    pub theta1: f64,
    pub theta2: f64,
    /// Dwell under `omega2`, `(pi - 2 theta2) / omega2`.
    pub tau_ori: f64,
    pub tau_bbb: f64,
    /// BBB fits inside the `omega2` window.
    pub strict_window: bool,
    /// BBB fits inside the whole protocol.
    pub relaxed_window: bool,
}

/// `2 t2 + (pi - 2 theta2) / omega2` together with the feasibility flags.
pub fn dsbbb_time(params: &DsbbbParams) -> Result<DsbbbTiming> {
    params.validate()?;
    let DsbbbParams {
        omega0,
        omega1,
        omega2,
        t2,
        ..
    } = *params;
    let theta1 = omega1 * t2;
    let tau_bbb = bbb_time(omega2, params.r, params.d)?;
    let (theta2, tau_ori, total_time) = if omega2 == omega1 {
        (theta1, PI / omega1 - 2.0 * t2, PI / omega1)
    } else {
        let th2 = theta2(omega1 / omega0, omega2 / omega0, theta1.min(PI / 2.0))?;
        let tau_ori = (PI - 2.0 * th2) / omega2;
        (th2, tau_ori, 2.0 * t2 + tau_ori)
    };
    Ok(DsbbbTiming {
        total_time,
        theta1,
        theta2,
        tau_ori,
        tau_bbb,
        strict_window: tau_bbb <= tau_ori,
        relaxed_window: tau_bbb <= total_time,
    })
}

/// Where the BBB shifts ended up inside a DSBBB schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Placement {
    /// Symmetric BBB inside the `omega2` window, starting `offset` after it opens.
    Window { offset: f64 },
    /// BBB started at `t = 0`, switching times solved across the frequency changes.
    Parallel { switch_back: f64, catch: f64 },
}

/// Builds a schedule from a frequency timeline and a list of center changes.
///
/// `freqs` lists `(omega, duration)` consecutively from `t = 0`; `moves` lists
/// `(time, center)` in the reference frame, ascending. The trap sits at the
/// origin until the first move. Intervals sharing frequency and center merge.
fn timeline_schedule(
    reference: Frame,
    freqs: &[(f64, f64)],
    moves: &[(f64, f64)],
    final_center: f64,
) -> Result<Schedule> {
    let mut freq_starts = Vec::with_capacity(freqs.len());
    let mut t = 0.0;
    for &(omega, duration) in freqs {
        freq_starts.push((t, omega));
        t += duration;
    }
    let end = t;

    let mut cuts: Vec<f64> = freq_starts.iter().map(|&(s, _)| s).collect();
    cuts.extend(moves.iter().map(|&(s, _)| s).filter(|&s| s > 0.0 && s < end));
    cuts.push(end);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut segments: Vec<Segment> = Vec::new();
    for w in cuts.windows(2) {
        let (start, stop) = (w[0], w[1]);
        if stop <= start {
            continue;
        }
        let omega = freq_starts
            .iter()
            .rev()
            .find(|&&(s, _)| s <= start)
            .map_or(freqs[0].0, |f| f.1);
        let center = moves.iter().rev().find(|&&(s, _)| s <= start).map_or(0.0, |m| m.1);
        let frame = reference.with_omega(omega)?;
        let seg = Segment::from_reference(center, &reference, frame, stop - start)?;
        match segments.last_mut() {
            Some(last) if last.frame == seg.frame && last.center == seg.center => last.duration += seg.duration,
            _ => segments.push(seg),
        }
    }
    Schedule::new(segments, final_center, reference)
}

fn dsbbb_frequencies(params: &DsbbbParams, timing: &DsbbbTiming) -> [(f64, f64); 3] {
    [
        (params.omega1, params.t2),
        (params.omega2, timing.tau_ori.max(0.0)),
        (params.omega1, params.t2),
    ]
}

/// Mean offset from `(D, 0)` in the reference frame after evolving `schedule`
/// with the trap at `R` until `s1` and at `D - R` until `s2`.
fn parallel_residual(params: &DsbbbParams, freqs: &[(f64, f64)], s1: f64, s2: f64) -> Result<Vector2<f64>> {
    let reference = Frame::dimensionless(params.omega0)?;
    let moves = [(0.0, params.r), (s1, params.d - params.r)];
    let schedule = timeline_schedule(reference, freqs, &moves, params.d)?.truncated(s2)?;
    let state = evolve_from_ground(&schedule)?.final_state;
    Ok(state.mean - Vector2::new(params.d, 0.0))
}

/// Solves for the two switching times of a BBB run that starts at `t = 0`
/// and overlaps the frequency changes.
fn solve_parallel(params: &DsbbbParams, freqs: &[(f64, f64)], total: f64) -> Result<(f64, f64)> {
    let res = |s1: f64, s2: f64| parallel_residual(params, freqs, s1, s2);
    let n = 64;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 1..n {
        for j in i..=n {
            let (s1, s2) = (total * i as f64 / n as f64, total * j as f64 / n as f64);
            let norm = res(s1, s2)?.norm();
            if norm < best.0 {
                best = (norm, s1, s2);
            }
        }
    }

    let (_, mut s1, mut s2) = best;
    let tol = 1e-12 * params.d.max(1.0);
    let h = 1e-7 * total;
    for _ in 0..100 {
        let f = res(s1, s2)?;
        if f.norm() <= tol {
            return Ok((s1, s2));
        }
        let j = Matrix2::from_columns(&[
            (res(s1 + h, s2)? - res(s1 - h, s2)?) / (2.0 * h),
            (res(s1, s2 + h)? - res(s1, s2 - h)?) / (2.0 * h),
        ]);
        let Some(step) = j.lu().solve(&f) else { break };
        let mut lambda = 1.0;
        loop {
            let (n1, n2) = (s1 - lambda * step[0], s2 - lambda * step[1]);
            let inside = n1 >= 0.0 && n1 <= n2 && n2 <= total;
            if inside && res(n1, n2)?.norm() < f.norm() {
                s1 = n1;
                s2 = n2;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                return Err(Error::InfeasibleWindow {
                    flag: "relaxed_window",
                    detail: "no switching times bring the mean to rest at D within the protocol".into(),
                });
            }
        }
    }
    if res(s1, s2)?.norm() <= tol * 1e2 {
        Ok((s1, s2))
    } else {
        Err(Error::InfeasibleWindow {
            flag: "relaxed_window",
            detail: "switching-time solve did not converge".into(),
        })
    }
}

/// DSBBB schedule and the placement chosen for its spatial shifts.
pub fn dsbbb_schedule_with_placement(params: &DsbbbParams) -> Result<(Schedule, Placement)> {
    let timing = dsbbb_time(params)?;
    if !timing.relaxed_window {
        return Err(Error::InfeasibleWindow {
            flag: "relaxed_window",
            detail: format!("tau_BBB = {} exceeds tau_DSBBB = {}", timing.tau_bbb, timing.total_time),
        });
    }
    let reference = Frame::dimensionless(params.omega0)?;
    let freqs = dsbbb_frequencies(params, &timing);
    let (r, d) = (params.r, params.d);

    if params.offset + timing.tau_bbb <= timing.tau_ori {
        let start = params.t2 + params.offset;
        let half = timing.tau_bbb / 2.0;
        let moves = [(start, r), (start + half, d - r), (start + 2.0 * half, d)];
        let schedule = timeline_schedule(reference, &freqs, &moves, d)?;
        return Ok((schedule, Placement::Window { offset: params.offset }));
    }
    if timing.strict_window {
        return Err(Error::InfeasibleWindow {
            flag: "strict_window",
            detail: format!(
                "offset {} leaves {} of the omega2 window, BBB needs {}",
                params.offset,
                timing.tau_ori - params.offset,
                timing.tau_bbb
            ),
        });
    }

    let (s1, s2) = solve_parallel(params, &freqs, timing.total_time)?;
    let moves = [(0.0, r), (s1, d - r), (s2, d)];
    let schedule = timeline_schedule(reference, &freqs, &moves, d)?;
    Ok((
        schedule,
        Placement::Parallel {
            switch_back: s1,
            catch: s2,
        },
    ))
}

pub fn dsbbb_schedule(params: &DsbbbParams) -> Result<Schedule> {
    dsbbb_schedule_with_placement(params).map(|(s, _)| s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    Bb,
    Bbb,
    Sbbb,
    Dsbbb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub kind: ProtocolKind,
    pub schedule: Schedule,
    pub total_time: f64,
    pub constraint_flags: BTreeMap<String, bool>,
    pub snapshots: Vec<EventSnapshot>,
    pub final_state: GaussianState,
}

impl ProtocolReport {
    pub fn new(kind: ProtocolKind, schedule: Schedule, flags: &[(&str, bool)]) -> Result<Self> {
        let evolution = evolve_from_ground(&schedule)?;
        Ok(Self {
            kind,
            total_time: schedule.total_duration(),
            schedule,
            constraint_flags: flags.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            snapshots: evolution.snapshots,
            final_state: evolution.final_state,
        })
    }
}

pub fn bb_report(d: f64, omega: f64) -> Result<ProtocolReport> {
    ProtocolReport::new(ProtocolKind::Bb, bb_schedule(d, omega)?, &[])
}

pub fn bbb_report(params: &BbbParams) -> Result<ProtocolReport> {
    let tau = params.time()?;
    let flags = [
        ("backward_move", params.r > params.d / 2.0),
        ("beats_forward_limit", tau < forward_speed_limit(params.omega)?),
    ];
    ProtocolReport::new(ProtocolKind::Bbb, bbb_schedule(params)?, &flags)
}

pub fn sbbb_report(omega1: f64, r: f64, d: f64) -> Result<ProtocolReport> {
    ProtocolReport::new(ProtocolKind::Sbbb, sbbb_schedule(omega1, r, d)?, &[])
}

pub fn dsbbb_report(params: &DsbbbParams) -> Result<ProtocolReport> {
    let timing = dsbbb_time(params)?;
    let (schedule, placement) = dsbbb_schedule_with_placement(params)?;
    let flags = [
        ("strict_window", timing.strict_window),
        ("relaxed_window", timing.relaxed_window),
        (
            "bbb_fits_orientation_window",
            matches!(placement, Placement::Window { .. }),
        ),
        ("beats_sbbb", timing.total_time < sbbb_time(params.omega1)?),
    ];
    ProtocolReport::new(ProtocolKind::Dsbbb, schedule, &flags)
}

/// Outcome of a randomized search over forward-only stepwise schedules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForwardSearch {
    pub accepted: usize,
    pub attempts: usize,
    pub min_time: f64,
    pub max_endpoint_error: f64,
}

/// Samples forward-only schedules that bring the mean to rest at `(D, 0)`.
///
/// Each sample takes up to four random forward steps, each rotating by a
/// random fraction of the angle left before the mean reaches the X axis; the
/// last intermediate center is then fixed so that the final rotation ends at
/// `(D, 0)`. Samples whose closing center would move backward are redrawn.
pub fn forward_only_search(d: f64, omega: f64, samples: usize, seed: u64) -> Result<ForwardSearch> {
    positive("D", d)?;
    let frame = Frame::dimensionless(omega)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ForwardSearch {
        accepted: 0,
        attempts: 0,
        min_time: f64::INFINITY,
        max_endpoint_error: 0.0,
    };

    while out.accepted < samples {
        out.attempts += 1;
        let steps = rng.gen_range(0..=4);
        let mut mean: Vector2<f64> = Vector2::zeros();
        let mut prev = 0.0;
        let mut segments = Vec::with_capacity(steps + 1);
        for _ in 0..steps {
            let c = rng.gen_range(prev..=d);
            let phi = mean[1].atan2(mean[0] - c).max(0.0);
            let angle = rng.gen::<f64>() * phi;
            let rotated = crate::frame::rotate_about(&GaussianState::coherent(frame, mean[0], mean[1]), c, angle);
            mean = rotated.mean;
            segments.push(Segment::new(c, frame, angle / omega)?);
            prev = c;
        }
        if mean[0] >= d {
            continue;
        }
        let c = (d * d - mean.norm_squared()) / (2.0 * (d - mean[0]));
        if !(c >= prev && c <= d && c > 0.0) {
            continue;
        }
        let angle = mean[1].atan2(mean[0] - c).max(0.0);
        segments.push(Segment::new(c, frame, angle / omega)?);

        let schedule = Schedule::new(segments, d, frame)?;
        let end = evolve_schedule(&GaussianState::ground(frame, 0.0), &schedule)?.final_state;
        let err = (end.mean - Vector2::new(d, 0.0)).norm();
        if err > 1e-6 {
            continue;
        }
        out.accepted += 1;
        out.max_endpoint_error = out.max_endpoint_error.max(err);
        out.min_time = out.min_time.min(schedule.total_duration());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bbb_time_reference_values() {
        assert_abs_diff_eq!(bbb_time(1.0, 3.0, 6.0).unwrap(), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(bbb_time(1.0, 6.0, 6.0).unwrap(), 2.0 * PI / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(bbb_time(1.0, 1.5, 6.0).unwrap(), 2.0 * PI, epsilon = 1e-12);
        let far = bbb_time(1.0, 600.0, 6.0).unwrap();
        let asym = 2.0 * 6f64.sqrt() / 600f64.sqrt();
        assert!((far / asym - 1.0).abs() < 0.01);
    }

    #[test]
    fn bbb_time_rejects_short_displacement() {
        assert!(matches!(
            bbb_time(1.0, 1.0, 6.0),
            Err(Error::InfeasibleDisplacement { .. })
        ));
        assert!(bbb_time(0.0, 3.0, 6.0).is_err());
        assert!(bbb_time(1.0, 3.0, -6.0).is_err());
    }

    #[test]
    fn forward_limit_values() {
        assert_eq!(forward_speed_limit(1.0).unwrap(), PI);
        assert_eq!(forward_speed_limit(2.0).unwrap(), PI / 2.0);
        assert_eq!(sbbb_time(2.0).unwrap(), forward_speed_limit(2.0).unwrap());
        assert!(forward_speed_limit(-1.0).is_err());
    }

    #[test]
    fn bb_totals() {
        assert_abs_diff_eq!(bb_schedule(6.0, 1.0).unwrap().total_duration(), PI);
        assert_abs_diff_eq!(bb_schedule(6.0, 2.0).unwrap().total_duration(), PI / 2.0);
        assert!(bb_schedule(0.0, 1.0).is_err());
        assert!(bb_schedule(6.0, 0.0).is_err());
    }

    #[test]
    fn bbb_centers() {
        let s = bbb_schedule(&BbbParams::new(6.0, 6.0, 1.0).unwrap()).unwrap();
        assert_eq!(s.reference_centers(), vec![6.0, 0.0, 6.0]);
        assert_abs_diff_eq!(s.segments[0].duration, PI / 3.0, epsilon = 1e-12);
        let bb = bbb_schedule(&BbbParams::new(6.0, 3.0, 1.0).unwrap()).unwrap();
        assert_eq!(bb.reference_centers(), vec![3.0, 3.0, 6.0]);
    }

    #[test]
    fn sbbb_split_sums_to_limit() {
        assert!(sbbb_split(2.0, 2.0, 6.0).is_err());
        for r in [3.0, 4.5, 6.0, 60.0] {
            let s = sbbb_split(2.0, r, 6.0).unwrap();
            assert!(s.tau_ex >= 0.0);
            assert_abs_diff_eq!(s.tau_tr + s.tau_ex, PI / 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn dsbbb_identity_squeeze_is_exact() {
        let p = DsbbbParams::new(2.0, 2.0, 0.3, 60.0, 6.0).unwrap();
        assert_eq!(dsbbb_time(&p).unwrap().total_time, PI / 2.0);
    }

    #[test]
    fn dsbbb_reference_cell() {
        let p = DsbbbParams::new(2.0, 1.0, PI / 8.0, 60.0, 6.0).unwrap();
        let t = dsbbb_time(&p).unwrap();
        assert_abs_diff_eq!(t.theta1, PI / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.theta2, 1.2334, epsilon = 1e-4);
        assert_abs_diff_eq!(t.total_time, 1.46, epsilon = 5e-3);
        assert!(t.total_time < PI / 2.0);
        assert!(t.strict_window && t.relaxed_window);
    }

    #[test]
    fn dsbbb_small_wait_limit() {
        // omega0 < omega2 < omega1: the major axis stays on X as t2 -> 0
        let p = DsbbbParams::new(2.0, 1.5, 1e-9, 60.0, 6.0).unwrap();
        let t = dsbbb_time(&p).unwrap();
        assert!(t.theta2 < 1e-8);
        assert_abs_diff_eq!(t.total_time, PI / 1.5, epsilon = 1e-8);
        assert!(t.total_time > PI / 2.0);
    }

    #[test]
    fn dsbbb_parameter_validation() {
        assert!(DsbbbParams::new(1.0, 0.5, 0.1, 6.0, 6.0).is_err()); // omega1 <= omega0
        assert!(DsbbbParams::new(2.0, 2.5, 0.1, 6.0, 6.0).is_err()); // omega2 > omega1
        assert!(DsbbbParams::new(2.0, 1.0, 0.0, 6.0, 6.0).is_err()); // t2 = 0
        assert!(DsbbbParams::new(2.0, 1.0, 0.8, 6.0, 6.0).is_err()); // t2 > pi/4
        assert!(DsbbbParams::new(2.0, 1.0, PI / 4.0, 6.0, 6.0).is_ok());
        assert!(DsbbbParams::new(2.0, 1.0, 0.1, 1.0, 6.0).is_err()); // R < D/4
    }

    #[test]
    fn dsbbb_relaxed_failure_names_flag() {
        // R = D/4 gives tau_BBB = 2 pi / omega2, longer than the whole protocol
        let p = DsbbbParams::new(2.0, 1.0, PI / 8.0, 1.5, 6.0).unwrap();
        match dsbbb_schedule(&p) {
            Err(Error::InfeasibleWindow { flag, .. }) => assert_eq!(flag, "relaxed_window"),
            other => panic!("expected window error, got {other:?}"),
        }
    }

    #[test]
    fn dsbbb_offset_too_large() {
        let mut p = DsbbbParams::new(2.0, 1.0, PI / 8.0, 60.0, 6.0).unwrap();
        p.offset = 0.5;
        match dsbbb_schedule(&p) {
            Err(Error::InfeasibleWindow { flag, .. }) => assert_eq!(flag, "strict_window"),
            other => panic!("expected window error, got {other:?}"),
        }
        p.offset = 0.01;
        assert!(dsbbb_schedule(&p).is_ok());
    }

    #[test]
    fn timeline_merges_repeated_configuration() {
        let reference = Frame::reference();
        let s = timeline_schedule(reference, &[(2.0, 1.0), (2.0, 1.0)], &[(0.5, 3.0)], 3.0).unwrap();
        assert_eq!(s.segments.len(), 2);
        assert_abs_diff_eq!(s.segments[1].duration, 1.5);
    }

    #[test]
    fn forward_search_small_sample() {
        let out = forward_only_search(6.0, 1.0, 500, 7).unwrap();
        assert_eq!(out.accepted, 500);
        assert!(out.min_time >= PI - 1e-6);
    }
}
