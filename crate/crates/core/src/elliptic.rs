//! Jacobi elliptic functions sn, cn, dn and the complete elliptic integral K(m).
//!
//! Parameter convention: `dn² = 1 − m·sn²`, so `m = 0` gives the circular
//! functions and `m = 1` the hyperbolic ones.
//!
//! Both routines use the arithmetic–geometric mean. The Jacobi functions are
//! evaluated by the descending Landen transformation seeded by the AGM
//! sequence (Abramowitz & Stegun 16.4), after reducing the argument into
//! `[0, K]` with the exact quarter- and half-period symmetries.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Iteration cap for the AGM sequence.
pub const AGM_MAX_ITER: usize = 32;

/// Convergence threshold on the AGM gap `c_n = (a_{n-1} − b_{n-1}) / 2`.
pub const AGM_TOL: f64 = 1e-15;

/// Values of sn, cn and dn at a single argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

impl EllipticTriple {
    pub const ORIGIN: EllipticTriple = EllipticTriple {
        sn: 0.0,
        cn: 1.0,
        dn: 1.0,
    };
}

fn check_parameter(m: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::Domain(format!(
            "elliptic parameter m = {m} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Runs the AGM of `(1, sqrt(1-m))`, recording `a_n` and `c_n` for every step.
///
/// Index 0 holds `a_0 = 1` and `c_0 = sqrt(m)`. The returned count is the
/// index of the last recorded step.
fn agm_sequence(m: f64) -> ([f64; AGM_MAX_ITER + 1], [f64; AGM_MAX_ITER + 1], usize) {
    let mut a_seq = [0.0; AGM_MAX_ITER + 1];
    let mut c_seq = [0.0; AGM_MAX_ITER + 1];
    let mut a = 1.0_f64;
    let mut b = (1.0 - m).sqrt();
    a_seq[0] = a;
    c_seq[0] = m.sqrt();
    let mut n = 0;
    while n < AGM_MAX_ITER && c_seq[n].abs() > AGM_TOL {
        let next_a = 0.5 * (a + b);
        let next_b = (a * b).sqrt();
        n += 1;
        c_seq[n] = 0.5 * (a - b);
        a_seq[n] = next_a;
        a = next_a;
        b = next_b;
    }
    (a_seq, c_seq, n)
}

/// Complete elliptic integral of the first kind,
/// `K(m) = ∫₀^{π/2} dθ / √(1 − m sin²θ) = π / (2·AGM(1, √(1−m)))`.
pub fn complete_k(m: f64) -> Result<f64> {
    if m.is_nan() || !(0.0..1.0).contains(&m) {
        return Err(Error::Domain(format!(
            "K diverges at m=1; parameter out of range (m = {m})"
        )));
    }
    let (a_seq, _, n) = agm_sequence(m);
    Ok(FRAC_PI_2 / a_seq[n])
}

/// Landen descent for an argument already reduced to `[0, K]`.
fn landen(u: f64, m: f64) -> EllipticTriple {
    let (a_seq, c_seq, n) = agm_sequence(m);
    if n == 0 {
        return EllipticTriple {
            sn: u.sin(),
            cn: u.cos(),
            dn: 1.0,
        };
    }
    let mut phi = (1u64 << n) as f64 * a_seq[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c_seq[j] / a_seq[j] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    // The Landen ratio cn/cos(φ₁ − φ₀) is 0/0 at the quarter period.
    EllipticTriple {
        sn,
        cn,
        dn: (1.0 - m * sn * sn).sqrt(),
    }
}

/// Jacobi elliptic functions `(sn, cn, dn)` at `xi` for parameter `m ∈ [0, 1]`.
pub fn jacobi(xi: f64, m: f64) -> Result<EllipticTriple> {
    if !xi.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {xi}")));
    }
    check_parameter(m)?;
    if m == 1.0 {
        let sech = 1.0 / xi.cosh();
        return Ok(EllipticTriple {
            sn: xi.tanh(),
            cn: sech,
            dn: sech,
        });
    }
    if m == 0.0 {
        let (sn, cn) = xi.sin_cos();
        return Ok(EllipticTriple { sn, cn, dn: 1.0 });
    }
    let quarter = complete_k(m)?;
    let period = 4.0 * quarter;

    // Reduce into [-2K, 2K).
    let mut u = xi - period * (xi / period).round();
    // sn(u + 2K) = -sn(u), cn(u + 2K) = -cn(u), dn(u + 2K) = dn(u); sn odd, cn/dn even.
    let sn_sign = if u < 0.0 { -1.0 } else { 1.0 };
    u = u.abs();
    let mut cn_sign = 1.0;
    if u > quarter {
        // sn(2K - u) = sn(u), cn(2K - u) = -cn(u), dn(2K - u) = dn(u).
        u = 2.0 * quarter - u;
        cn_sign = -1.0;
    }
    let base = landen(u.max(0.0), m);
    Ok(EllipticTriple {
        sn: sn_sign * base.sn,
        cn: cn_sign * base.cn,
        dn: base.dn,
    })
}

/// Period `4K(m)` of sn and cn; `None` at `m = 1`.
pub fn period(m: f64) -> Option<f64> {
    complete_k(m).ok().map(|k| 4.0 * k)
}
