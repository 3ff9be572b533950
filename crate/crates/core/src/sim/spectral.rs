//! Periodic grid, wavenumbers and transforms.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Uniform periodic grid `x_j = x0 + j·L/N` with FFT plans on `N` and `2N` points.
#[derive(Clone)]
pub struct Grid {
    pub n: usize,
    pub length: f64,
    pub x0: f64,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    forward_padded: Arc<dyn Fft<f64>>,
    inverse_padded: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("length", &self.length)
            .field("x0", &self.x0)
            .finish()
    }
}

impl Grid {
    pub fn new(n: usize, length: f64, x0: f64) -> Self {
        let mut planner = FftPlanner::new();
        let scale = 2.0 * PI / length;
        let half = n / 2;
        let wavenumbers = (0..n)
            .map(|j| match j.cmp(&half) {
                std::cmp::Ordering::Less => scale * j as f64,
                std::cmp::Ordering::Equal => 0.0,
                std::cmp::Ordering::Greater => scale * (j as f64 - n as f64),
            })
            .collect();
        Grid {
            n,
            length,
            x0,
            wavenumbers,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            forward_padded: planner.plan_fft_forward(2 * n),
            inverse_padded: planner.plan_fft_inverse(2 * n),
        }
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + self.length * j as f64 / self.n as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.x(j))
    }

    /// Signed wavenumbers `2πk/L`, with the Nyquist entry set to zero.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// `κ = 2π/L`, the wavenumber of mode one.
    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Unnormalized forward transform of grid values.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    /// Grid values of a spectrum, real part only.
    pub fn inverse(&self, spectrum: &[Complex64]) -> Vec<f64> {
        self.inverse_complex(spectrum).iter().map(|z| z.re).collect()
    }

    pub fn inverse_complex(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        let mut buf = spectrum.to_vec();
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|z| *z *= scale);
        buf
    }

    /// Spectrum of the `order`-th derivative.
    pub fn derivative(&self, spectrum: &[Complex64], order: u32) -> Vec<Complex64> {
        spectrum
            .iter()
            .zip(&self.wavenumbers)
            .map(|(&z, &k)| z * Complex64::new(0.0, k).powu(order))
            .collect()
    }

    /// Spectrum of `g(u)` for grid function `u` given by `spectrum`, evaluated
    /// on the `2N` grid and truncated back to `N` modes.
    pub fn padded_map(&self, spectrum: &[Complex64], g: impl Fn(f64) -> f64) -> Vec<Complex64> {
        let n = self.n;
        let m = 2 * n;
        let half = n / 2;
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        buf[..half].copy_from_slice(&spectrum[..half]);
        buf[m - half + 1..].copy_from_slice(&spectrum[half + 1..]);
        buf[half] = spectrum[half] * 0.5;
        buf[m - half] = spectrum[half] * 0.5;
        self.inverse_padded.process(&mut buf);
        let scale = 1.0 / n as f64;
        for z in buf.iter_mut() {
            *z = Complex64::new(g(z.re * scale), 0.0);
        }
        self.forward_padded.process(&mut buf);
        let back = n as f64 / m as f64;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..half {
            out[j] = buf[j] * back;
        }
        for j in half + 1..n {
            out[j] = buf[m - n + j] * back;
        }
        out
    }

    /// Spectrum of `g(u)` evaluated pointwise on the `N` grid.
    pub fn collocated_map(&self, spectrum: &[Complex64], g: impl Fn(f64) -> f64) -> Vec<Complex64> {
        let values: Vec<f64> = self.inverse(spectrum).into_iter().map(g).collect();
        self.forward(&values)
    }
}
