//! Canonical elements of the sn/cn/dn function algebra.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::elliptic;
use crate::error::{Error, Result};

use super::poly::{rational, Bindings, ParamPoly, Symbol};

/// `sn^sn_pow · cn^cn_pow · dn^dn_pow` with `cn_pow, dn_pow ∈ {0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EllipticMonomial {
    pub sn_pow: u32,
    pub cn_pow: u8,
    pub dn_pow: u8,
}

impl EllipticMonomial {
    pub const ONE: EllipticMonomial = EllipticMonomial::new(0, 0, 0);
    pub const SN: EllipticMonomial = EllipticMonomial::new(1, 0, 0);
    pub const CN: EllipticMonomial = EllipticMonomial::new(0, 1, 0);
    pub const DN: EllipticMonomial = EllipticMonomial::new(0, 0, 1);

    pub const fn new(sn_pow: u32, cn_pow: u8, dn_pow: u8) -> Self {
        assert!(cn_pow <= 1 && dn_pow <= 1);
        EllipticMonomial {
            sn_pow,
            cn_pow,
            dn_pow,
        }
    }

    fn key(&self) -> (u32, u8, u8) {
        (self.sn_pow, self.cn_pow + self.dn_pow, self.dn_pow)
    }

    pub fn eval(&self, t: &elliptic::EllipticTriple) -> f64 {
        let mut v = t.sn.powi(self.sn_pow as i32);
        if self.cn_pow == 1 {
            v *= t.cn;
        }
        if self.dn_pow == 1 {
            v *= t.dn;
        }
        v
    }
}

/// Ordered by `sn_pow`, then by the cn/dn degree, then `dn_pow` (so `cn`
/// precedes `dn`).
impl Ord for EllipticMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for EllipticMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for EllipticMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.sn_pow {
            0 => {}
            1 => parts.push("sn".to_string()),
            p => parts.push(format!("sn^{p}")),
        }
        if self.cn_pow == 1 {
            parts.push("cn".into());
        }
        if self.dn_pow == 1 {
            parts.push("dn".into());
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

/// A term with arbitrary cn/dn powers, before canonical reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTerm {
    pub sn_pow: u32,
    pub cn_pow: u32,
    pub dn_pow: u32,
    pub coef: ParamPoly,
}

impl RawTerm {
    pub fn new(sn_pow: u32, cn_pow: u32, dn_pow: u32, coef: ParamPoly) -> Self {
        RawTerm {
            sn_pow,
            cn_pow,
            dn_pow,
            coef,
        }
    }

    pub fn eval_numeric(&self, bindings: &Bindings, xi: f64, m: f64) -> Result<f64> {
        let t = elliptic::jacobi(xi, m)?;
        let c = self.coef.eval(&with_modulus(bindings, m)?)?;
        Ok(c * t.sn.powi(self.sn_pow as i32)
            * t.cn.powi(self.cn_pow as i32)
            * t.dn.powi(self.dn_pow as i32))
    }
}

fn with_modulus(bindings: &Bindings, m: f64) -> Result<Bindings> {
    match bindings.get(&Symbol::Modulus) {
        Some(&bound) if bound != m => Err(Error::Domain(format!(
            "binding m = {bound} does not match evaluation parameter {m}"
        ))),
        Some(_) => Ok(bindings.clone()),
        None => {
            let mut b = bindings.clone();
            b.insert(Symbol::Modulus, m);
            Ok(b)
        }
    }
}

/// `Σ coef · snⁱ cnʲ dnᵏ` in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EllipticExpr {
    terms: BTreeMap<EllipticMonomial, ParamPoly>,
}

impl EllipticExpr {
    pub fn zero() -> Self {
        EllipticExpr::default()
    }

    pub fn constant(c: ParamPoly) -> Self {
        EllipticExpr::monomial(EllipticMonomial::ONE, c)
    }

    pub fn monomial(mono: EllipticMonomial, coef: ParamPoly) -> Self {
        let mut e = EllipticExpr::zero();
        e.add_term(mono, &coef);
        e
    }

    pub fn sn() -> Self {
        EllipticExpr::monomial(EllipticMonomial::SN, ParamPoly::one())
    }

    pub fn cn() -> Self {
        EllipticExpr::monomial(EllipticMonomial::CN, ParamPoly::one())
    }

    pub fn dn() -> Self {
        EllipticExpr::monomial(EllipticMonomial::DN, ParamPoly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mono: &EllipticMonomial) -> ParamPoly {
        self.terms.get(mono).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, mono: EllipticMonomial, coef: &ParamPoly) {
        if coef.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono).or_default();
        *entry += coef;
        if entry.is_zero() {
            self.terms.remove(&mono);
        }
    }

    fn add_raw(&mut self, sn_pow: u32, cn_pow: u32, dn_pow: u32, coef: &ParamPoly) {
        // cn² = 1 − sn², dn² = 1 − m·sn²; expand both binomially.
        let (cn_half, dn_half) = (cn_pow / 2, dn_pow / 2);
        let mono_cn = (cn_pow % 2) as u8;
        let mono_dn = (dn_pow % 2) as u8;
        let minus_m = -&ParamPoly::var(Symbol::Modulus);
        for i in 0..=cn_half {
            let c_i = binomial(cn_half, i) * if i % 2 == 0 { 1 } else { -1 };
            for j in 0..=dn_half {
                let factor = minus_m.pow(j).scale(&rational(c_i * binomial(dn_half, j)));
                let mono = EllipticMonomial::new(sn_pow + 2 * (i + j), mono_cn, mono_dn);
                self.add_term(mono, &(coef * &factor));
            }
        }
    }

    /// Canonical reduction of terms with arbitrary cn/dn powers.
    pub fn reduce(raw: impl IntoIterator<Item = RawTerm>) -> Self {
        let mut e = EllipticExpr::zero();
        for t in raw {
            e.add_raw(t.sn_pow, t.cn_pow, t.dn_pow, &t.coef);
        }
        e
    }

    pub fn scale(&self, c: &ParamPoly) -> EllipticExpr {
        let mut e = EllipticExpr::zero();
        for (mono, k) in &self.terms {
            e.add_term(*mono, &(k * c));
        }
        e
    }

    /// Derivative with respect to the elliptic argument, using
    /// `sn' = cn·dn`, `cn' = −sn·dn`, `dn' = −m·sn·cn`.
    pub fn differentiate(&self) -> EllipticExpr {
        let mut e = EllipticExpr::zero();
        let m = ParamPoly::var(Symbol::Modulus);
        for (mono, coef) in &self.terms {
            let (i, j, k) = (mono.sn_pow, mono.cn_pow as u32, mono.dn_pow as u32);
            if i > 0 {
                e.add_raw(i - 1, j + 1, k + 1, &coef.scale(&rational(i as i64)));
            }
            if j > 0 {
                e.add_raw(i + 1, j - 1, k + 1, &-coef);
            }
            if k > 0 {
                e.add_raw(i + 1, j + 1, k - 1, &-&(coef * &m));
            }
        }
        e
    }

    pub fn nth_derivative(&self, n: usize) -> EllipticExpr {
        (0..n).fold(self.clone(), |e, _| e.differentiate())
    }

    /// Monomial/coefficient pairs in canonical order.
    pub fn coefficients(&self) -> Vec<(EllipticMonomial, ParamPoly)> {
        self.terms.iter().map(|(m, p)| (*m, p.clone())).collect()
    }

    pub fn from_coefficients(pairs: impl IntoIterator<Item = (EllipticMonomial, ParamPoly)>) -> Self {
        let mut e = EllipticExpr::zero();
        for (m, p) in pairs {
            e.add_term(m, &p);
        }
        e
    }

    /// Applies `f` to every coefficient polynomial.
    pub fn map_coefficients(&self, f: impl Fn(&ParamPoly) -> ParamPoly) -> EllipticExpr {
        let mut e = EllipticExpr::zero();
        for (mono, coef) in &self.terms {
            e.add_term(*mono, &f(coef));
        }
        e
    }

    pub fn substitute(&self, map: &BTreeMap<Symbol, ParamPoly>) -> EllipticExpr {
        self.map_coefficients(|c| c.substitute(map))
    }

    pub fn eval_numeric(&self, bindings: &Bindings, xi: f64, m: f64) -> Result<f64> {
        let b = with_modulus(bindings, m)?;
        let t = elliptic::jacobi(xi, m)?;
        let mut sum = 0.0;
        for (mono, coef) in &self.terms {
            sum += coef.eval(&b)? * mono.eval(&t);
        }
        Ok(sum)
    }

    /// One `monomial: coefficient` line per term.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        for (mono, coef) in &self.terms {
            out.push_str(&format!("{mono}: {coef}\n"));
        }
        out
    }
}

fn binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

impl fmt::Display for EllipticExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (mono, coef)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if *mono == EllipticMonomial::ONE {
                write!(f, "({coef})")?;
            } else {
                write!(f, "({coef})*{mono}")?;
            }
        }
        Ok(())
    }
}

impl Add for &EllipticExpr {
    type Output = EllipticExpr;

    fn add(self, rhs: &EllipticExpr) -> EllipticExpr {
        let mut e = self.clone();
        for (m, p) in &rhs.terms {
            e.add_term(*m, p);
        }
        e
    }
}

impl Sub for &EllipticExpr {
    type Output = EllipticExpr;

    fn sub(self, rhs: &EllipticExpr) -> EllipticExpr {
        self + &-rhs
    }
}

impl Neg for &EllipticExpr {
    type Output = EllipticExpr;

    fn neg(self) -> EllipticExpr {
        self.map_coefficients(|c| -c)
    }
}

impl Mul for &EllipticExpr {
    type Output = EllipticExpr;

    fn mul(self, rhs: &EllipticExpr) -> EllipticExpr {
        let mut e = EllipticExpr::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                e.add_raw(
                    m1.sn_pow + m2.sn_pow,
                    (m1.cn_pow + m2.cn_pow) as u32,
                    (m1.dn_pow + m2.dn_pow) as u32,
                    &(c1 * c2),
                );
            }
        }
        e
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for EllipticExpr {
            type Output = EllipticExpr;
            fn $method(self, rhs: EllipticExpr) -> EllipticExpr {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for EllipticExpr {
    type Output = EllipticExpr;
    fn neg(self) -> EllipticExpr {
        -&self
    }
}
