//! Split-operator integration on a periodic position grid.
//!
//! The grid lives in the reference-frame coordinate `X`, where `P = -(i/2) d/dX`
//! and a trap of frequency `w` centred at `C` reads
//! `H = w0 P^2 + (w^2 / w0) (X - C)^2` (energies in units of `hbar`).

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{FidelityResult, Method};
use crate::error::{ensure, Error, Result};
use crate::frame::{evolve_segment, Frame, GaussianState, Schedule};
use crate::squeeze::change_frame;

const EDGE_POINTS: usize = 5;
const EDGE_PROB: f64 = 1e-12;
const MIN_POINTS: usize = 1024;
const DEFAULT_POINTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub dt: f64,
}

fn omega_max(schedule: &Schedule) -> f64 {
    schedule
        .segments
        .iter()
        .map(|s| s.frame.omega)
        .fold(schedule.final_frame.omega, f64::max)
}

/// Samples the exact Gaussian trajectory, in the reference frame, along every segment.
fn gaussian_envelope(initial: &GaussianState, schedule: &Schedule) -> Result<Vec<GaussianState>> {
    let reference = schedule.final_frame;
    let mut out = vec![*initial];
    let mut state = *initial;
    for seg in &schedule.segments {
        state = change_frame(&state, seg.frame.omega)?;
        let sub = crate::frame::Segment {
            duration: seg.duration / 64.0,
            ..*seg
        };
        for _ in 0..64 {
            state = evolve_segment(&state, &sub)?;
            out.push(change_frame(&state, reference.omega)?);
        }
    }
    Ok(out)
}

impl GridConfig {
    /// Default grid: `X in [-8, D + 2R + 8]` widened to the Gaussian envelope,
    /// at least 4096 points with enough momentum range, `dt = 0.001 / w_max`.
    pub fn default_for(schedule: &Schedule) -> Result<Self> {
        let initial = GaussianState::ground(schedule.final_frame, 0.0);
        Self::default_for_state(&initial, schedule)
    }

    pub fn default_for_state(initial: &GaussianState, schedule: &Schedule) -> Result<Self> {
        schedule.validate()?;
        let d = schedule.final_center;
        let r = schedule.reference_centers().iter().fold(d.abs(), |m, c| m.max(c.abs()));
        let (mut lo, mut hi) = (d.min(0.0) - 8.0, d.max(0.0) + 2.0 * r + 8.0);
        let mut k_need: f64 = 0.0;
        for s in gaussian_envelope(initial, schedule)? {
            let (sx, sp) = (s.cov[(0, 0)].sqrt(), s.cov[(1, 1)].sqrt());
            lo = lo.min(s.x() - 12.0 * sx);
            hi = hi.max(s.x() + 12.0 * sx);
            k_need = k_need.max(2.0 * (s.p().abs() + 12.0 * sp));
        }
        let min_points = ((hi - lo) * 1.2 * k_need / PI).ceil() as usize;
        Ok(Self {
            x_min: lo,
            x_max: hi,
            n_points: min_points.next_power_of_two().max(DEFAULT_POINTS),
            dt: 0.001 / omega_max(schedule),
        })
    }

    pub fn validate(&self, schedule: &Schedule) -> Result<()> {
        ensure(
            self.x_min.is_finite() && self.x_max.is_finite() && self.x_max > self.x_min,
            || {
                format!(
                    "grid bounds must satisfy x_min < x_max, got [{}, {}]",
                    self.x_min, self.x_max
                )
            },
        )?;
        ensure(self.n_points >= MIN_POINTS && self.n_points.is_power_of_two(), || {
            format!("n_points must be a power of two >= {MIN_POINTS}, got {}", self.n_points)
        })?;
        let w = omega_max(schedule);
        ensure(self.dt > 0.0 && self.dt * w <= 0.01 * (1.0 + 1e-12), || {
            format!(
                "dt must satisfy 0 < dt * omega_max <= 0.01, got dt = {} with omega_max = {w}",
                self.dt
            )
        })?;
        let d = schedule.final_center;
        ensure(self.x_min <= d.min(0.0) - 2.5 && self.x_max >= d.max(0.0) + 2.5, || {
            format!(
                "grid [{}, {}] must cover the origin and the destination by five ground-state widths",
                self.x_min, self.x_max
            )
        })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_points as f64
    }

    pub fn positions(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n_points).map(|j| self.x_min + j as f64 * dx).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        let dk = 2.0 * PI / (self.x_max - self.x_min);
        (0..n)
            .map(|j| if j < n / 2 { j as f64 } else { j as f64 - n as f64 } * dk)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSnapshot {
    pub time: f64,
    pub mean_x: f64,
    pub var_x: f64,
    pub excess_kurtosis: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveSnapshot {
    pub time: f64,
    pub psi: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRun {
    pub result: FidelityResult,
    pub x: Vec<f64>,
    pub moments: Vec<MomentSnapshot>,
    pub waves: Vec<WaveSnapshot>,
    pub psi: Vec<Complex64>,
}

/// Wavefunction of a pure Gaussian state on `X`, normalised over `dX`.
fn gaussian_wave(state: &GaussianState, x: &[f64], dx: f64) -> Vec<Complex64> {
    let (sxx, sxp) = (state.cov[(0, 0)], state.cov[(0, 1)]);
    let a = Complex64::new(1.0 / (4.0 * sxx), -sxp / sxx);
    let (x0, p0) = (state.x(), state.p());
    let mut psi: Vec<Complex64> = x
        .iter()
        .map(|&xj| {
            let u = xj - x0;
            (-a * u * u + Complex64::new(0.0, 2.0 * p0 * u)).exp()
        })
        .collect();
    let norm = (psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * dx).sqrt();
    psi.iter_mut().for_each(|c| *c /= norm);
    psi
}

struct Propagator {
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    x: Vec<f64>,
    k: Vec<f64>,
    dx: f64,
    omega0: f64,
}

impl Propagator {
    fn new(grid: &GridConfig, omega0: f64) -> Self {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(grid.n_points);
        let ifft = planner.plan_fft_inverse(grid.n_points);
        let scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len().max(ifft.get_inplace_scratch_len())];
        Self {
            fft,
            ifft,
            scratch,
            x: grid.positions(),
            k: grid.wavenumbers(),
            dx: grid.dx(),
            omega0,
        }
    }

    fn spectrum(&mut self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut out = psi.to_vec();
        self.fft.process_with_scratch(&mut out, &mut self.scratch);
        out
    }

    fn norm(&self, psi: &[Complex64]) -> f64 {
        psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.dx
    }

    /// `<P>` and `<P^2>` from the momentum-space density.
    fn momentum_moments(&mut self, psi: &[Complex64]) -> (f64, f64) {
        let spec = self.spectrum(psi);
        let (mut w, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (c, &k) in spec.iter().zip(&self.k) {
            let p = c.norm_sqr();
            let mom = 0.5 * k;
            w += p;
            m1 += p * mom;
            m2 += p * mom * mom;
        }
        (m1 / w, m2 / w)
    }

    fn energy(&mut self, psi: &[Complex64], omega: f64, center: f64) -> f64 {
        let (_, p2) = self.momentum_moments(psi);
        let norm = self.norm(psi);
        let v: f64 = psi
            .iter()
            .zip(&self.x)
            .map(|(c, &xj)| c.norm_sqr() * (xj - center).powi(2))
            .sum::<f64>()
            * self.dx
            / norm;
        self.omega0 * p2 + omega * omega / self.omega0 * v
    }

    fn moments(&self, psi: &[Complex64], time: f64) -> MomentSnapshot {
        let w: Vec<f64> = psi.iter().map(|c| c.norm_sqr()).collect();
        let total: f64 = w.iter().sum();
        let mean = w.iter().zip(&self.x).map(|(p, x)| p * x).sum::<f64>() / total;
        let central = |n: i32| w.iter().zip(&self.x).map(|(p, x)| p * (x - mean).powi(n)).sum::<f64>() / total;
        let (m2, m4) = (central(2), central(4));
        MomentSnapshot {
            time,
            mean_x: mean,
            var_x: m2,
            excess_kurtosis: m4 / (m2 * m2) - 3.0,
        }
    }

    /// Probability carried by the outermost points in position and momentum.
    fn edge_probability(&mut self, psi: &[Complex64]) -> (f64, f64) {
        let n = psi.len();
        let total = self.norm(psi) / self.dx;
        let pos: f64 = psi[..EDGE_POINTS]
            .iter()
            .chain(&psi[n - EDGE_POINTS..])
            .map(|c| c.norm_sqr())
            .sum();
        let spec = self.spectrum(psi);
        let spec_total: f64 = spec.iter().map(|c| c.norm_sqr()).sum();
        let mid = n / 2;
        let mom: f64 = spec[mid - EDGE_POINTS..mid + EDGE_POINTS]
            .iter()
            .map(|c| c.norm_sqr())
            .sum();
        (pos / total, mom / spec_total)
    }

    fn evolve(&mut self, psi: &mut [Complex64], omega: f64, center: f64, duration: f64, dt: f64) {
        if duration <= 0.0 {
            return;
        }
        let steps = (duration / dt - 1e-9).ceil().max(1.0) as usize;
        let h = duration / steps as f64;
        let n = psi.len() as f64;
        let half_v: Vec<Complex64> = self
            .x
            .iter()
            .map(|&xj| Complex64::from_polar(1.0, -0.5 * h * omega * omega / self.omega0 * (xj - center).powi(2)))
            .collect();
        let kin: Vec<Complex64> = self
            .k
            .iter()
            .map(|&k| Complex64::from_polar(1.0 / n, -h * self.omega0 * 0.25 * k * k))
            .collect();
        for _ in 0..steps {
            psi.iter_mut().zip(&half_v).for_each(|(c, v)| *c *= v);
            self.fft.process_with_scratch(psi, &mut self.scratch);
            psi.iter_mut().zip(&kin).for_each(|(c, v)| *c *= v);
            self.ifft.process_with_scratch(psi, &mut self.scratch);
            psi.iter_mut().zip(&half_v).for_each(|(c, v)| *c *= v);
        }
    }
}

fn suggest(grid: &GridConfig, detail: String) -> Error {
    let width = grid.x_max - grid.x_min;
    Error::GridTooSmall {
        detail,
        suggest_min: grid.x_min - 0.5 * width,
        suggest_max: grid.x_max + 0.5 * width,
        suggest_points: 2 * grid.n_points,
    }
}

/// Propagates `initial` through `schedule` on `grid`.
///
/// Moments are recorded at every event; full wavefunctions only when
/// `record_waves` is set.
pub fn grid_run(
    initial: &GaussianState,
    schedule: &Schedule,
    grid: &GridConfig,
    record_waves: bool,
) -> Result<GridRun> {
    schedule.validate()?;
    grid.validate(schedule)?;
    let reference: Frame = schedule.final_frame;
    if initial.frame != reference {
        return Err(Error::InvalidSchedule(
            "initial state must be in the schedule's reference frame".into(),
        ));
    }
    if !initial.is_pure(1e-9) {
        return Err(Error::UnsupportedState(
            "grid propagation needs a pure Gaussian initial state".into(),
        ));
    }

    let mut prop = Propagator::new(grid, reference.omega);
    let mut psi = gaussian_wave(initial, &prop.x, prop.dx);
    let mut time = 0.0;
    let mut moments = vec![prop.moments(&psi, time)];
    let mut waves = Vec::new();
    if record_waves {
        waves.push(WaveSnapshot { time, psi: psi.clone() });
    }
    let mut energy_drift: f64 = 0.0;

    for (i, seg) in schedule.segments.iter().enumerate() {
        let center = seg.frame.position_to(seg.center, &reference);
        let omega = seg.frame.omega;
        let e0 = prop.energy(&psi, omega, center);
        prop.evolve(&mut psi, omega, center, seg.duration, grid.dt);
        time += seg.duration;
        if seg.duration > 0.0 {
            let e1 = prop.energy(&psi, omega, center);
            energy_drift = energy_drift.max((e1 - e0).abs() / e0.abs());
        }
        let (pos_edge, mom_edge) = prop.edge_probability(&psi);
        if pos_edge > EDGE_PROB {
            return Err(suggest(
                grid,
                format!("position-space edge probability {pos_edge:.3e} after segment {i}"),
            ));
        }
        if mom_edge > EDGE_PROB {
            return Err(suggest(
                grid,
                format!("momentum-space edge probability {mom_edge:.3e} after segment {i}"),
            ));
        }
        moments.push(prop.moments(&psi, time));
        if record_waves {
            waves.push(WaveSnapshot { time, psi: psi.clone() });
        }
    }

    let target = gaussian_wave(
        &GaussianState::ground(reference, schedule.final_center),
        &prop.x,
        prop.dx,
    );
    let norm = prop.norm(&psi);
    let overlap: Complex64 = target.iter().zip(&psi).map(|(t, p)| t.conj() * p).sum::<Complex64>() * prop.dx;
    let fidelity = (overlap.norm_sqr() / norm).clamp(0.0, 1.0);
    let (p_mean, _) = prop.momentum_moments(&psi);
    let last = moments.last().copied().unwrap_or(moments[0]);

    Ok(GridRun {
        result: FidelityResult {
            fidelity,
            method: Method::Grid,
            residual_momentum: p_mean,
            energy_drift,
            norm_drift: (norm - 1.0).abs(),
            final_mean_x: last.mean_x,
        },
        x: prop.x,
        moments,
        waves,
        psi,
    })
}

/// Grid-oracle fidelity of a schedule started from the reference ground state at the origin.
pub fn grid_propagate(schedule: &Schedule, grid: &GridConfig) -> Result<FidelityResult> {
    let initial = GaussianState::ground(schedule.final_frame, 0.0);
    Ok(grid_run(&initial, schedule, grid, false)?.result)
}

/// Writes `t,x,re_psi,im_psi` rows for every recorded wavefunction.
pub fn write_snapshot_dump<W: Write>(mut out: W, x: &[f64], waves: &[WaveSnapshot]) -> std::io::Result<()> {
    writeln!(out, "t,x,re_psi,im_psi")?;
    for w in waves {
        for (xj, c) in x.iter().zip(&w.psi) {
            writeln!(out, "{:.12e},{:.12e},{:.12e},{:.12e}", w.time, xj, c.re, c.im)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Segment;
    use approx::assert_abs_diff_eq;

    fn hold(center: f64, omega: f64, duration: f64) -> Schedule {
        let reference = Frame::reference();
        let seg = Segment::from_reference(center, &reference, Frame::dimensionless(omega).unwrap(), duration).unwrap();
        Schedule::new(vec![seg], center, reference).unwrap()
    }

    #[test]
    fn ground_state_is_stationary() {
        let s = hold(0.0, 1.0, 2.0);
        let grid = GridConfig::default_for(&s).unwrap();
        let out = grid_propagate(&s, &grid).unwrap();
        assert_abs_diff_eq!(out.fidelity, 1.0, epsilon = 1e-12);
        assert!(out.norm_drift < 1e-10);
        assert!(out.residual_momentum.abs() < 1e-12);
    }

    #[test]
    fn wave_has_requested_moments() {
        let grid = GridConfig {
            x_min: -10.0,
            x_max: 10.0,
            n_points: 1024,
            dt: 0.001,
        };
        let state = GaussianState::new(
            nalgebra::Vector2::new(0.5, -1.0),
            nalgebra::Matrix2::new(0.5, 0.2, 0.2, (1.0 / 16.0 + 0.04) / 0.5),
            Frame::reference(),
        )
        .unwrap();
        let x = grid.positions();
        let psi = gaussian_wave(&state, &x, grid.dx());
        let mut prop = Propagator::new(&grid, 1.0);
        let m = prop.moments(&psi, 0.0);
        assert_abs_diff_eq!(m.mean_x, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(m.var_x, 0.5, epsilon = 1e-12);
        assert!(m.excess_kurtosis.abs() < 1e-10);
        let (p1, p2) = prop.momentum_moments(&psi);
        assert_abs_diff_eq!(p1, -1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(p2 - p1 * p1, state.cov[(1, 1)], epsilon = 1e-10);
    }

    #[test]
    fn rejects_bad_configs() {
        let s = hold(3.0, 1.0, 1.0);
        let ok = GridConfig::default_for(&s).unwrap();
        assert!(GridConfig { n_points: 1000, ..ok }.validate(&s).is_err());
        assert!(GridConfig { n_points: 512, ..ok }.validate(&s).is_err());
        assert!(GridConfig { dt: 0.02, ..ok }.validate(&s).is_err());
        assert!(GridConfig { x_min: 5.0, ..ok }.validate(&s).is_err());
    }

    #[test]
    fn narrow_domain_is_reported() {
        // mean swings to X = 6 and back while the domain ends at 5.5
        let s = hold(3.0, 1.0, PI);
        let grid = GridConfig {
            x_min: -3.0,
            x_max: 5.5,
            n_points: 1024,
            dt: 0.005,
        };
        match grid_propagate(&s, &grid) {
            Err(Error::GridTooSmall { suggest_max, .. }) => assert!(suggest_max > 5.5),
            other => panic!("expected grid error, got {other:?}"),
        }
    }

    #[test]
    fn dump_format() {
        let waves = vec![WaveSnapshot {
            time: 0.5,
            psi: vec![Complex64::new(1.0, -2.0)],
        }];
        let mut buf = Vec::new();
        write_snapshot_dump(&mut buf, &[0.25], &waves).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "t,x,re_psi,im_psi\n5.000000000000e-1,2.500000000000e-1,1.000000000000e0,-2.000000000000e0\n"
        );
    }
}
