//! Translation speed from the phase of the dominant Fourier mode.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Grid, SimState};
use crate::error::{Error, Result};

/// Least-squares fit `X(t) ≈ speed·t + intercept` of the crest displacement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityFit {
    pub speed: f64,
    pub intercept: f64,
    /// Root-mean-square deviation of the displacements from the fit.
    pub residual: f64,
    /// Index of the tracked mode.
    pub mode: usize,
}

fn dominant_mode(state: &SimState) -> Result<usize> {
    let n = state.spectrum.len();
    let (mode, amp) = (1..n / 2)
        .map(|k| (k, state.spectrum[k].norm()))
        .fold((0, 0.0), |best, c| if c.1 > best.1 { c } else { best });
    let floor = 1e-12 * n as f64 * (1.0 + state.spectrum[0].norm() / n as f64);
    if mode == 0 || amp <= floor {
        return Err(Error::NoSignal("field is constant to within the noise floor".into()));
    }
    Ok(mode)
}

/// `(t, X(t) − X(t₀))` from the unwrapped phase of the dominant mode.
pub fn positions(trajectory: &[SimState], grid: &Grid) -> Result<Vec<(f64, f64)>> {
    let first = trajectory
        .first()
        .ok_or_else(|| Error::NoSignal("empty trajectory".into()))?;
    let mode = dominant_mode(first)?;
    Ok(track(trajectory, grid, mode))
}

fn track(trajectory: &[SimState], grid: &Grid, mode: usize) -> Vec<(f64, f64)> {
    let kappa = grid.fundamental() * mode as f64;
    let z0 = trajectory[0].spectrum[mode];
    let mut phase = 0.0;
    let mut previous = 0.0;
    trajectory
        .iter()
        .map(|s| {
            let wrapped = (s.spectrum[mode] / z0).arg();
            let mut jump = wrapped - previous;
            jump -= 2.0 * PI * (jump / (2.0 * PI)).round();
            phase += jump;
            previous = wrapped;
            (s.t, -phase / kappa)
        })
        .collect()
}

/// Translation speed over the trajectory; needs at least three snapshots.
pub fn measure_velocity(trajectory: &[SimState], grid: &Grid) -> Result<VelocityFit> {
    if trajectory.len() < 3 {
        return Err(Error::Domain(format!(
            "need at least 3 snapshots, got {}",
            trajectory.len()
        )));
    }
    let mode = dominant_mode(&trajectory[0])?;
    let xs = track(trajectory, grid, mode);
    let n = xs.len() as f64;
    let tm = xs.iter().map(|p| p.0).sum::<f64>() / n;
    let xm = xs.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = xs.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let stx: f64 = xs.iter().map(|p| (p.0 - tm) * (p.1 - xm)).sum();
    let speed = stx / stt;
    let intercept = xm - speed * tm;
    let residual = (xs
        .iter()
        .map(|p| (p.1 - speed * p.0 - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(VelocityFit {
        speed,
        intercept,
        residual,
        mode,
    })
}

/// `‖u − u_ref(· − shift)‖₂` over the domain.
pub fn shape_defect(grid: &Grid, state: &SimState, reference: &SimState, shift: f64) -> f64 {
    let n = grid.n as f64;
    let sum: f64 = state
        .spectrum
        .iter()
        .zip(&reference.spectrum)
        .zip(grid.wavenumbers())
        .map(|((&u, &r), &k)| (u - r * Complex64::from_polar(1.0, -k * shift)).norm_sqr())
        .sum();
    (grid.length * sum).sqrt() / n
}
