//! Periodic pseudo-spectral integration of
//! `f(t)·u_t + ∂x(a u²/2 + b u³/3) + d u_xxx = 0`.
//!
//! Time stepping is fourth-order Runge–Kutta on the integrating-factor
//! variable `e^{−i d k³ H(t)} û`, where `H = ∫h` and `h = 1/f`, so the
//! dispersive term is integrated exactly.

mod measure;
mod spectral;

pub use measure::{measure_velocity, positions, shape_defect, VelocityFit};
pub use spectral::Grid;

use num_complex::Complex64;

use crate::ansatz::PdeParams;
use crate::elliptic;
use crate::error::{Error, Result};
use crate::waves::{TimeCoefficient, WaveProfile};

/// Largest accepted `dt·h·k_max·max|a u + b u²|`.
pub const CFL_LIMIT: f64 = 2.5;

/// Tail tolerance `|u(±L/2) − D|` for windowed runs.
pub const WINDOW_TAIL_TOL: f64 = 1e-10;

/// Spatial domain of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// `periods·4K(m)` starting at `x = 0`.
    Periodic { periods: u32 },
    /// `[−L/2, L/2]`, for the non-periodic `m = 1` limit.
    Window { length: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub domain: Domain,
    pub dt: f64,
    /// Integration time; the run covers `[t_start, t_start + duration]`.
    pub duration: f64,
    pub t_start: f64,
    pub dealias: bool,
    pub params: PdeParams,
    pub coef: TimeCoefficient,
}

impl SimConfig {
    /// `N = 256`, one period, `dt = 1e-4`, `T = 1`, dealiased, `f ≡ 1`.
    pub fn new(params: PdeParams) -> Self {
        SimConfig {
            n: 256,
            domain: Domain::Periodic { periods: 1 },
            dt: 1e-4,
            duration: 1.0,
            t_start: 0.0,
            dealias: true,
            params,
            coef: TimeCoefficient::Unit,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 64 || !self.n.is_power_of_two() {
            return Err(Error::Domain(format!(
                "grid size must be a power of two >= 64, got {}",
                self.n
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Domain(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.duration >= 0.0 && self.duration.is_finite()) {
            return Err(Error::Domain(format!(
                "duration must be non-negative, got {}",
                self.duration
            )));
        }
        if !self.t_start.is_finite() {
            return Err(Error::Domain("non-finite start time".into()));
        }
        self.length().map(|_| ())
    }

    /// Domain length.
    pub fn length(&self) -> Result<f64> {
        match self.domain {
            Domain::Periodic { periods: 0 } => {
                Err(Error::Domain("periods must be at least 1".into()))
            }
            Domain::Periodic { periods } => match elliptic::period(self.params.m) {
                Some(p) => Ok(p * periods as f64),
                None => Err(Error::Domain(
                    "non-periodic limit; use m<1 (e.g. 1-1e-6) or a wide-domain windowed run"
                        .into(),
                )),
            },
            Domain::Window { length } if length > 0.0 && length.is_finite() => Ok(length),
            Domain::Window { length } => {
                Err(Error::Domain(format!("window length must be positive, got {length}")))
            }
        }
    }

    /// Number of steps and the step actually used, `duration/steps`.
    pub fn steps(&self) -> (usize, f64) {
        if self.duration == 0.0 {
            return (0, self.dt);
        }
        let steps = (self.duration / self.dt - 1e-9).ceil().max(1.0) as usize;
        (steps, self.duration / steps as f64)
    }

    pub fn t_end(&self) -> f64 {
        self.t_start + self.duration
    }
}

/// Spectrum of `u` at time `t` with cached diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub spectrum: Vec<Complex64>,
    /// `∫u dx`.
    pub mass: f64,
    /// `∫u² dx`.
    pub quadratic: f64,
}

/// Integrator for one configuration; owns its transform plans and scratch.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimConfig,
    grid: Grid,
    dt: f64,
    steps: usize,
    /// `d·k³`.
    dispersion: Vec<f64>,
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let length = config.length()?;
        let x0 = match config.domain {
            Domain::Periodic { .. } => 0.0,
            Domain::Window { .. } => -0.5 * length,
        };
        let grid = Grid::new(config.n, length, x0);
        let dispersion = grid
            .wavenumbers()
            .iter()
            .map(|k| config.params.d * k * k * k)
            .collect();
        let (steps, dt) = config.steps();
        Ok(Simulation {
            config,
            grid,
            dt,
            steps,
            dispersion,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Step size after rounding the duration to a whole number of steps.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn state_from_spectrum(&self, t: f64, spectrum: Vec<Complex64>) -> SimState {
        let n = self.grid.n as f64;
        let length = self.grid.length;
        let mass = length * spectrum[0].re / n;
        let quadratic = length * spectrum.iter().map(|z| z.norm_sqr()).sum::<f64>() / (n * n);
        SimState {
            t,
            spectrum,
            mass,
            quadratic,
        }
    }

    pub fn state_from_values(&self, t: f64, values: &[f64]) -> SimState {
        self.state_from_spectrum(t, self.grid.forward(values))
    }

    /// Samples `profile` at `t_start` on the grid.
    pub fn init_from_profile(&self, profile: &WaveProfile) -> Result<SimState> {
        let p = &profile.family.params;
        if *p != self.config.params {
            return Err(Error::Domain(
                "family parameters do not match the simulation parameters".into(),
            ));
        }
        let t = self.config.t_start;
        let values = self
            .grid
            .points()
            .map(|x| profile.evaluate(x, t))
            .collect::<Result<Vec<_>>>()?;
        if let Domain::Window { length } = self.config.domain {
            let offset = profile.family.offset;
            let tails = [
                profile.evaluate(-0.5 * length, t)?,
                profile.evaluate(0.5 * length, t)?,
            ];
            if tails.iter().any(|u| (u - offset).abs() >= WINDOW_TAIL_TOL) {
                return Err(Error::Domain(format!(
                    "window of length {length} truncates the wave: tail exceeds {WINDOW_TAIL_TOL:e}"
                )));
            }
        }
        Ok(self.state_from_values(t, &values))
    }

    pub fn values(&self, state: &SimState) -> Vec<f64> {
        self.grid.inverse(&state.spectrum)
    }

    /// `max_t h(t)` over the run, sampled.
    fn max_inverse_coefficient(&self) -> Result<f64> {
        let c = &self.config;
        if c.coef.is_unit() {
            return Ok(1.0);
        }
        c.coef.check_nonvanishing(c.t_start, c.t_end())?;
        let samples = 256;
        (0..=samples)
            .map(|i| c.coef.inverse(c.t_start + c.duration * i as f64 / samples as f64))
            .try_fold(0.0f64, |acc, h| h.map(|h| acc.max(h.abs())))
    }

    /// `dt·max h·k_max·max|a u + b u²|` for the given state.
    pub fn cfl(&self, state: &SimState) -> Result<f64> {
        let (a, b) = (self.config.params.a, self.config.params.b);
        let speed = self
            .values(state)
            .iter()
            .map(|&u| (a * u + b * u * u).abs())
            .fold(0.0, f64::max);
        let kmax = self.grid.fundamental() * (self.grid.n / 2) as f64;
        Ok(self.dt * self.max_inverse_coefficient()? * kmax * speed)
    }

    fn check_stability(&self, state: &SimState) -> Result<()> {
        let cfl = self.cfl(state)?;
        if cfl > CFL_LIMIT {
            return Err(Error::Unstable {
                cfl,
                limit: CFL_LIMIT,
            });
        }
        Ok(())
    }

    fn flux(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        let (a, b) = (self.config.params.a, self.config.params.b);
        let g = move |u: f64| u * u * (0.5 * a + b * u / 3.0);
        if self.config.dealias {
            self.grid.padded_map(spectrum, g)
        } else {
            self.grid.collocated_map(spectrum, g)
        }
    }

    /// `−h(t)·ik·F̂`.
    fn nonlinear(&self, spectrum: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        let (a, b) = (self.config.params.a, self.config.params.b);
        if a == 0.0 && b == 0.0 {
            return Ok(vec![Complex64::new(0.0, 0.0); spectrum.len()]);
        }
        let h = self.config.coef.inverse(t)?;
        Ok(self
            .flux(spectrum)
            .iter()
            .zip(self.grid.wavenumbers())
            .map(|(&f, &k)| f * Complex64::new(0.0, -h * k))
            .collect())
    }

    /// `e^{i d k³ ΔH}` for `ΔH = ∫_{t0}^{t1} h`.
    fn propagator(&self, t0: f64, t1: f64) -> Result<Vec<Complex64>> {
        let dh = self.config.coef.integral_inverse(t0, t1)?;
        Ok(self
            .dispersion
            .iter()
            .map(|&w| Complex64::from_polar(1.0, w * dh))
            .collect())
    }

    /// One integrating-factor RK4 step of size `dt`.
    pub fn step(&self, state: &SimState) -> Result<SimState> {
        let t = state.t;
        let dt = self.dt;
        let th = t + 0.5 * dt;
        let u = &state.spectrum;
        let e_half = self.propagator(t, th)?;
        let e_rest = self.propagator(th, t + dt)?;
        let e_full: Vec<Complex64> = e_half.iter().zip(&e_rest).map(|(a, b)| a * b).collect();

        let k1 = self.nonlinear(u, t)?;
        let s2: Vec<Complex64> = (0..u.len())
            .map(|j| e_half[j] * (u[j] + 0.5 * dt * k1[j]))
            .collect();
        let k2 = self.nonlinear(&s2, th)?;
        let s3: Vec<Complex64> = (0..u.len())
            .map(|j| e_half[j] * u[j] + 0.5 * dt * k2[j])
            .collect();
        let k3 = self.nonlinear(&s3, th)?;
        let s4: Vec<Complex64> = (0..u.len())
            .map(|j| e_full[j] * u[j] + dt * e_rest[j] * k3[j])
            .collect();
        let k4 = self.nonlinear(&s4, t + dt)?;
        let next: Vec<Complex64> = (0..u.len())
            .map(|j| {
                e_full[j] * u[j]
                    + dt / 6.0 * (e_full[j] * k1[j] + 2.0 * e_rest[j] * (k2[j] + k3[j]) + k4[j])
            })
            .collect();
        if next.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::BlowUp(t + dt));
        }
        Ok(self.state_from_spectrum(t + dt, next))
    }

    /// Integrates to `t_start + duration`, keeping the initial state, every
    /// `snapshot_every`-th state, and the final state.
    pub fn run(&self, initial: SimState, snapshot_every: usize) -> Result<Vec<SimState>> {
        if initial.spectrum.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::BlowUp(initial.t));
        }
        self.check_stability(&initial)?;
        let every = snapshot_every.max(1);
        let mut state = initial.clone();
        let mut out = vec![initial];
        for i in 1..=self.steps {
            state = self.step(&state)?;
            state.t = self.config.t_start + i as f64 * self.dt;
            if i % every == 0 || i == self.steps {
                out.push(state.clone());
            }
        }
        Ok(out)
    }
}

/// `max_j |−v u_x + (a u + b u²) u_x + d u_xxx|` for the wave's profile
/// sampled on `n` points over `periods` periods, derivatives taken spectrally.
pub fn pde_residual(profile: &WaveProfile, n: usize, periods: u32) -> Result<f64> {
    let fam = &profile.family;
    let p = fam.params;
    let length = elliptic::period(p.m).ok_or_else(|| {
        Error::Domain("non-periodic limit; use m<1 (e.g. 1-1e-6)".into())
    })? * periods as f64;
    let grid = Grid::new(n, length, 0.0);
    let u = grid
        .points()
        .map(|x| fam.profile(x))
        .collect::<Result<Vec<_>>>()?;
    let s = grid.forward(&u);
    let ux = grid.inverse(&grid.derivative(&s, 1));
    let uxxx = grid.inverse(&grid.derivative(&s, 3));
    let v = profile.law.base();
    Ok((0..n)
        .map(|j| ((-v + p.a * u[j] + p.b * u[j] * u[j]) * ux[j] + p.d * uxxx[j]).abs())
        .fold(0.0, f64::max))
}
