//! Explicit traveling waves `u = A·cn(ξ) + B·dn(ξ) + D`, their hyperbolic
//! limit, and the phase-speed law for a time-dependent `u_t` coefficient.

mod coefficient;

pub use coefficient::{Table, TimeCoefficient};

use crate::elliptic;
use crate::error::{Error, Result};
use crate::quad;
use crate::solver::SolutionFamily;

/// Step used for the central-difference check of the velocity constraint.
pub const CONSTRAINT_STEP: f64 = 1e-4;

/// Phase speed of the wave as a function of time.
///
/// The time-dependent kind solves `d(t·v)/dt = C·h(t)` with `v(t_ref) = v0`,
/// so the crest sits at `X(t) = t·v(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum VelocityLaw {
    Constant {
        speed: f64,
    },
    TimeDependent {
        base: f64,
        coef: TimeCoefficient,
        v0: f64,
        t_ref: f64,
    },
}

impl VelocityLaw {
    pub fn constant(speed: f64) -> Self {
        VelocityLaw::Constant { speed }
    }

    /// Time-dependent law with base speed `C = base`.
    pub fn time_dependent(base: f64, coef: TimeCoefficient, v0: f64, t_ref: f64) -> Result<Self> {
        if !(t_ref > 0.0 && t_ref.is_finite()) {
            return Err(Error::Domain(format!("t_ref must be positive, got {t_ref}")));
        }
        Ok(VelocityLaw::TimeDependent {
            base,
            coef,
            v0,
            t_ref,
        })
    }

    pub fn base(&self) -> f64 {
        match self {
            VelocityLaw::Constant { speed } => *speed,
            VelocityLaw::TimeDependent { base, .. } => *base,
        }
    }

    /// `v(t) = (t_ref·v0 + C·∫_{t_ref}^t h) / t`.
    pub fn velocity_at(&self, t: f64) -> Result<f64> {
        match self {
            VelocityLaw::Constant { speed } => Ok(*speed),
            VelocityLaw::TimeDependent {
                base,
                coef,
                v0,
                t_ref,
            } => {
                check_time(t)?;
                let integral = coef.integral_inverse(*t_ref, t)?;
                Ok((t_ref * v0 + base * integral) / t)
            }
        }
    }

    /// `C·e^{−t}(∫_{t_ref}^t e^s h(s) ds + v0)`, the printed exponential-kernel form.
    pub fn velocity_kernel_form(&self, t: f64) -> Result<f64> {
        match self {
            VelocityLaw::Constant { speed } => Ok(*speed),
            VelocityLaw::TimeDependent {
                base,
                coef,
                v0,
                t_ref,
            } => {
                check_time(t)?;
                let kernel = match coef {
                    TimeCoefficient::Unit => -(t_ref - t).exp_m1(),
                    TimeCoefficient::Exponential { rate } => {
                        exponential_kernel(*rate, *t_ref, t)
                    }
                    _ => {
                        coef.check_nonvanishing(*t_ref, t)?;
                        quad::integrate(
                            |s| (s - t).exp() * coef.inverse(s).unwrap_or(f64::NAN),
                            *t_ref,
                            t,
                            1e-13,
                        )?
                    }
                };
                Ok(base * (kernel + v0 * (-t).exp()))
            }
        }
    }

    /// Crest position `X(t)`, so that `ξ = x − X(t)`.
    pub fn position(&self, t: f64) -> Result<f64> {
        match self {
            VelocityLaw::Constant { speed } => Ok(speed * t),
            VelocityLaw::TimeDependent { .. } => Ok(t * self.velocity_at(t)?),
        }
    }

    /// `h(t)`, equal to one for the constant law.
    pub fn inverse_coefficient(&self, t: f64) -> Result<f64> {
        match self {
            VelocityLaw::Constant { .. } => Ok(1.0),
            VelocityLaw::TimeDependent { coef, .. } => coef.inverse(t),
        }
    }

    /// `v(t) + t·v′(t) − C·h(t)` for `v = velocity_at`, with `v′` by second-order differences
    /// that turn one-sided at the ends of a tabulated coefficient.
    pub fn constraint_residual(&self, t: f64) -> Result<f64> {
        self.residual_of(t, |s| self.velocity_at(s))
    }

    /// The same residual for `v = velocity_kernel_form`.
    pub fn kernel_form_residual(&self, t: f64) -> Result<f64> {
        self.residual_of(t, |s| self.velocity_kernel_form(s))
    }

    fn residual_of(&self, t: f64, v: impl Fn(f64) -> Result<f64>) -> Result<f64> {
        let delta = CONSTRAINT_STEP * t.abs().max(1.0);
        let (lo, hi) = match self {
            VelocityLaw::TimeDependent {
                coef: TimeCoefficient::Tabulated(table),
                ..
            } => (table.times()[0], table.times()[table.times().len() - 1]),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        };
        let slope = if t - delta < lo {
            (-3.0 * v(t)? + 4.0 * v(t + delta)? - v(t + 2.0 * delta)?) / (2.0 * delta)
        } else if t + delta > hi {
            (3.0 * v(t)? - 4.0 * v(t - delta)? + v(t - 2.0 * delta)?) / (2.0 * delta)
        } else {
            (v(t + delta)? - v(t - delta)?) / (2.0 * delta)
        };
        Ok(v(t)? + t * slope - self.base() * self.inverse_coefficient(t)?)
    }

    /// `(t, v(t))` at `n` evenly spaced times in `[t0, t1]`.
    pub fn velocity_series(&self, t0: f64, t1: f64, n: usize) -> Result<Vec<(f64, f64)>> {
        grid(t0, t1, n)
            .map(|t| self.velocity_at(t).map(|v| (t, v)))
            .collect()
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "time-dependent velocity is undefined at t = {t}; needs t > 0"
        )))
    }
}

/// `∫_{t0}^{t} e^{s−t}·e^{−rate·s} ds`.
fn exponential_kernel(rate: f64, t0: f64, t: f64) -> f64 {
    let q = 1.0 - rate;
    if q == 0.0 {
        (t - t0) * (-t).exp()
    } else {
        // e^{−t}(e^{q t} − e^{q t0})/q.
        (-rate * t).exp() * -(q * (t0 - t)).exp_m1() / q
    }
}

fn grid(t0: f64, t1: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (t1 - t0) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| t0 + step * i as f64)
}

/// A solution family moving under a velocity law.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveProfile {
    pub family: SolutionFamily,
    pub law: VelocityLaw,
}

impl WaveProfile {
    /// Constant-coefficient wave moving at the family's speed.
    pub fn new(family: SolutionFamily) -> Self {
        WaveProfile {
            law: VelocityLaw::constant(family.speed),
            family,
        }
    }

    /// Wave of the `f(t)·u_t` equation; the base speed is the family's speed.
    pub fn with_coefficient(
        family: SolutionFamily,
        coef: TimeCoefficient,
        v0: f64,
        t_ref: f64,
    ) -> Result<Self> {
        Ok(WaveProfile {
            law: VelocityLaw::time_dependent(family.speed, coef, v0, t_ref)?,
            family,
        })
    }

    /// `u(x, t) = A·cn(ξ) + B·dn(ξ) + D` with `ξ = x − X(t)`.
    pub fn evaluate(&self, x: f64, t: f64) -> Result<f64> {
        self.family.profile(x - self.law.position(t)?)
    }

    /// Spatial period `4K(m)`, or `None` at `m = 1`.
    pub fn period(&self) -> Option<f64> {
        elliptic::period(self.family.params.m)
    }

    /// `(x, u(x, t))` at `n` evenly spaced points in `[x0, x1]`.
    pub fn profile_table(&self, x0: f64, x1: f64, n: usize, t: f64) -> Result<Vec<(f64, f64)>> {
        grid(x0, x1, n)
            .map(|x| self.evaluate(x, t).map(|u| (x, u)))
            .collect()
    }
}

/// `amplitude·sech(x − speed·t) + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SechWave {
    pub amplitude: f64,
    pub speed: f64,
    pub offset: f64,
}

impl SechWave {
    pub fn evaluate(&self, x: f64, t: f64) -> f64 {
        self.amplitude / (x - self.speed * t).cosh() + self.offset
    }
}

/// At `m = 1` both `cn` and `dn` become `sech`, so the wave is `(A+B)·sech + D`.
pub fn hyperbolic_limit(fam: &SolutionFamily) -> Result<SechWave> {
    if fam.params.m != 1.0 {
        return Err(Error::Domain(format!(
            "hyperbolic limit needs m = 1, got m = {}",
            fam.params.m
        )));
    }
    Ok(SechWave {
        amplitude: fam.amp_cn + fam.amp_dn,
        speed: fam.speed,
        offset: fam.offset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::PdeParams;
    use crate::solver::solve_closed_form;
    use proptest::prelude::*;

    fn families(a: f64, b: f64, d: f64, m: f64) -> Vec<SolutionFamily> {
        solve_closed_form(&PdeParams::new(a, b, d, m).unwrap()).unwrap()
    }

    #[test]
    fn sech_peak() {
        let w = WaveProfile::new(families(0.0, 1.0, 1.0, 1.0)[0]);
        assert!((w.evaluate(0.0, 0.0).unwrap() - 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn value_at_zero_phase() {
        for f in families(0.7, 1.3, 0.4, 0.6) {
            let w = WaveProfile::new(f);
            assert_eq!(
                w.evaluate(f.speed * 2.0, 2.0).unwrap(),
                f.amp_cn + f.amp_dn + f.offset
            );
        }
    }

    #[test]
    fn translation() {
        let f = families(1.0, 1.0, 1.0, 0.5)[1];
        let w = WaveProfile::new(f);
        for &(x, t, dt) in &[(0.3, 0.0, 1.0), (-2.0, 0.5, 3.25)] {
            let u0 = w.evaluate(x, t).unwrap();
            let u1 = w.evaluate(x + f.speed * dt, t + dt).unwrap();
            assert!((u0 - u1).abs() < 1e-13);
        }
    }

    #[test]
    fn hyperbolic_limit_matches_sech() {
        let f = families(0.0, 1.0, 1.0, 1.0)[0];
        let s = hyperbolic_limit(&f).unwrap();
        assert!((s.amplitude - 6f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.speed, 1.0);
        let w = WaveProfile::new(f);
        for i in 0..=200 {
            let x = -10.0 + 0.1 * i as f64;
            for &t in &[0.0, 0.7] {
                let target = 6f64.sqrt() / (x - t).cosh();
                assert!((w.evaluate(x, t).unwrap() - target).abs() < 1e-12);
                assert!((s.evaluate(x, t) - target).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn stationary_sech_with_offset() {
        let f = families(2.0, 1.0, 1.0, 1.0)[0];
        let s = hyperbolic_limit(&f).unwrap();
        assert_eq!(s.speed, 0.0);
        assert_eq!(s.offset, -1.0);
        assert!((s.evaluate(0.0, 5.0) - (6f64.sqrt() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn opposite_signs_cancel_at_unit_modulus() {
        let f = families(2.0, 1.0, 1.0, 1.0)[1];
        assert_eq!(hyperbolic_limit(&f).unwrap().amplitude, 0.0);
        let w = WaveProfile::new(f);
        for &x in &[-3.0, 0.0, 1.5] {
            assert!((w.evaluate(x, 0.2).unwrap() - f.offset).abs() < 1e-15);
        }
        assert!(hyperbolic_limit(&families(0.0, 1.0, 1.0, 0.5)[0]).is_err());
    }

    #[test]
    fn unit_coefficient_reduces_to_constant_speed() {
        let c = 0.75;
        let law = VelocityLaw::time_dependent(c, TimeCoefficient::Unit, c, 1.0).unwrap();
        for &t in &[0.5, 1.0, 2.0, 10.0] {
            assert!((law.velocity_at(t).unwrap() - c).abs() < 1e-15);
        }
    }

    #[test]
    fn unit_coefficient_general_v0() {
        let (c, v0, t_ref) = (0.75, 2.0, 1.5);
        let law = VelocityLaw::time_dependent(c, TimeCoefficient::Unit, v0, t_ref).unwrap();
        for &t in &[1.5, 2.0, 7.0] {
            let expected = c + t_ref * (v0 - c) / t;
            assert!((law.velocity_at(t).unwrap() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn exponential_coefficient_velocity() {
        let (c, v0, t_ref) = (0.75, 0.3, 1.0);
        let law = VelocityLaw::time_dependent(c, TimeCoefficient::Exponential { rate: 1.0 }, v0, t_ref)
            .unwrap();
        for &t in &[1.0f64, 1.7, 4.0] {
            let expected = (t_ref * v0 + c * ((-t_ref).exp() - (-t).exp())) / t;
            assert!((law.velocity_at(t).unwrap() - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn constraint_holds_for_exponential_coefficient() {
        let law = VelocityLaw::time_dependent(
            0.75,
            TimeCoefficient::Exponential { rate: 1.0 },
            0.4,
            1.0,
        )
        .unwrap();
        for (t, _) in law.velocity_series(1.0, 6.0, 50).unwrap() {
            assert!(law.constraint_residual(t).unwrap().abs() < 1e-7);
        }
    }

    #[test]
    fn constraint_holds_for_polynomial_coefficient() {
        let law =
            VelocityLaw::time_dependent(1.2, TimeCoefficient::Polynomial(vec![1.0, 0.5]), 0.1, 1.0)
                .unwrap();
        for i in 0..50 {
            let t = 1.0 + 0.1 * i as f64;
            assert!(law.constraint_residual(t).unwrap().abs() < 1e-7);
        }
    }

    #[test]
    fn constraint_holds_up_to_table_ends() {
        let coef: TimeCoefficient = "table:1:1,3:2,6:4".parse().unwrap();
        let law = VelocityLaw::time_dependent(0.75, coef, 0.75, 1.0).unwrap();
        for i in 0..50 {
            let t = 1.0 + 5.0 * i as f64 / 49.0;
            let r = law.constraint_residual(t).unwrap();
            assert!(r.abs() < 1e-7, "t = {t}: {r}");
        }
    }

    #[test]
    fn kernel_form_unit_coefficient() {
        let c = 0.75;
        let t_ref: f64 = 1.0;
        let law = VelocityLaw::time_dependent(c, TimeCoefficient::Unit, 0.0, t_ref).unwrap();
        for &t in &[1.0, 2.0, 5.0] {
            let v = law.velocity_kernel_form(t).unwrap();
            assert!((v - c * (1.0 - (t_ref - t).exp())).abs() < 1e-15);
        }
        let v0 = t_ref.exp();
        let law = VelocityLaw::time_dependent(c, TimeCoefficient::Unit, v0, t_ref).unwrap();
        for &t in &[1.5, 3.0] {
            assert!((law.velocity_kernel_form(t).unwrap() - c).abs() < 1e-15);
            assert!(law.kernel_form_residual(t).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn kernel_form_residual_formula() {
        let (c, v0, t_ref): (f64, f64, f64) = (0.75, 0.5, 1.0);
        let law = VelocityLaw::time_dependent(c, TimeCoefficient::Unit, v0, t_ref).unwrap();
        for &t in &[0.5f64, 2.0, 3.0] {
            let expected = c * (v0 - t_ref.exp()) * (-t).exp() * (1.0 - t);
            let r = law.kernel_form_residual(t).unwrap();
            assert!((r - expected).abs() < 1e-8, "{r} vs {expected}");
        }
    }

    #[test]
    fn kernel_form_kernels_agree_with_quadrature() {
        let (c, v0, t_ref): (f64, f64, f64) = (0.75, 0.5, 1.0);
        let exp = VelocityLaw::time_dependent(c, TimeCoefficient::Exponential { rate: 1.0 }, v0, t_ref)
            .unwrap();
        let poly = VelocityLaw::time_dependent(c, TimeCoefficient::Polynomial(vec![0.0, 0.0, 1.0]), v0, t_ref)
            .unwrap();
        let half = VelocityLaw::time_dependent(c, TimeCoefficient::Exponential { rate: 0.5 }, v0, t_ref)
            .unwrap();
        for &t in &[1.0, 2.5, 4.0] {
            let sampled = quad::integrate(|s| (s - t).exp() * (-s).exp(), t_ref, t, 1e-14).unwrap();
            let expected = c * (sampled + v0 * (-t).exp());
            assert!((exp.velocity_kernel_form(t).unwrap() - expected).abs() < 1e-14);
            let sampled = quad::integrate(|s| (s - t).exp() * (-0.5 * s).exp(), t_ref, t, 1e-14).unwrap();
            let expected = c * (sampled + v0 * (-t).exp());
            assert!((half.velocity_kernel_form(t).unwrap() - expected).abs() < 1e-14);
            let sampled = quad::integrate(|s| (s - t).exp() / (s * s), t_ref, t, 1e-14).unwrap();
            let expected = c * (sampled + v0 * (-t).exp());
            assert!((poly.velocity_kernel_form(t).unwrap() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn time_dependent_domain_errors() {
        let law = VelocityLaw::time_dependent(1.0, TimeCoefficient::Polynomial(vec![-2.0, 1.0]), 0.0, 1.0)
            .unwrap();
        assert!(matches!(
            law.velocity_at(3.0),
            Err(Error::CoefficientSingularity(_))
        ));
        assert!(law.velocity_at(0.0).is_err());
        assert!(VelocityLaw::time_dependent(1.0, TimeCoefficient::Unit, 0.0, 0.0).is_err());
    }

    #[test]
    fn time_dependent_wave_moves_with_position() {
        let f = families(0.0, 1.0, 1.0, 0.5)[0];
        let w = WaveProfile::with_coefficient(f, TimeCoefficient::Exponential { rate: 1.0 }, 0.75, 1.0)
            .unwrap();
        let t = 2.0;
        let x = w.law.position(t).unwrap();
        assert!((w.evaluate(x, t).unwrap() - (f.amp_cn + f.amp_dn)).abs() < 1e-15);
        let series = w.law.velocity_series(1.0, 3.0, 5).unwrap();
        assert_eq!(series.len(), 5);
        assert_eq!(series[0], (1.0, 0.75));
    }

    #[test]
    fn profile_table_shape() {
        let w = WaveProfile::new(families(1.0, 1.0, 1.0, 0.5)[0]);
        let tab = w.profile_table(0.0, 1.0, 11, 0.0).unwrap();
        assert_eq!(tab.len(), 11);
        assert_eq!(tab[10].0, 1.0);
    }

    proptest! {
        #[test]
        fn periodic_and_bounded(a in -2.0..2.0f64, b in 0.2..2.0f64, d in 0.2..2.0f64,
                                m in 0.01..0.99f64, xi in -20.0..20.0f64, which in 0usize..4,
                                flip in any::<bool>()) {
            let (b, d) = if flip { (-b, -d) } else { (b, d) };
            let f = families(a, b, d, m)[which];
            let w = WaveProfile::new(f);
            let period = w.period().unwrap();
            let u0 = f.profile(xi).unwrap();
            let u1 = f.profile(xi + period).unwrap();
            prop_assert!((u0 - u1).abs() < 1e-11);
            prop_assert!(u0.abs() <= f.amplitude_bound() + 1e-14);
        }

        #[test]
        fn unit_law_is_constant(c in -3.0..3.0f64, t in 0.1..50.0f64) {
            let law = VelocityLaw::time_dependent(c, TimeCoefficient::Unit, c, 1.0).unwrap();
            let v = law.velocity_at(t).unwrap();
            prop_assert!((v - c).abs() <= 1e-14 * (1.0 + c.abs() * t.max(1.0 / t)));
        }
    }
}
