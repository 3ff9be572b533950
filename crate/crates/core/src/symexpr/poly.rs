//! Sparse multivariate polynomials with exact rational coefficients.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Scalar symbols appearing in coefficient polynomials.
///
/// Declaration order fixes the variable order used for printing and for the
/// monomial order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    /// `a`, coefficient of `u·u_x`.
    Quadratic,
    /// `b`, coefficient of `u²·u_x`.
    Cubic,
    /// `d`, coefficient of `u_xxx`.
    Dispersion,
    /// `m`, the elliptic parameter.
    Modulus,
    /// `A_i`, coefficient of `sn^{i-1}·cn`. Printed `A` for `i = 1`.
    CnAmp(u16),
    /// `B_i`, coefficient of `sn^{i-1}·dn`. Printed `B` for `i = 1`.
    DnAmp(u16),
    /// `D`, the constant term (`A_0`).
    Offset,
    /// `v`, the wave speed.
    Speed,
    /// `h = 1/f(t)`.
    InvCoef,
    /// `w = v + t·v_t`.
    Drift,
    /// Formal `√m` used by exact back-substitution.
    SqrtModulus,
    /// Formal `√(3d/(2b))` used by exact back-substitution.
    SqrtRatio,
    /// Formal `1/b` used by exact back-substitution.
    InvCubic,
}

impl Symbol {
    pub const A: Symbol = Symbol::CnAmp(1);
    pub const B: Symbol = Symbol::DnAmp(1);
    pub const D: Symbol = Symbol::Offset;

    pub fn name(self) -> String {
        match self {
            Symbol::Quadratic => "a".into(),
            Symbol::Cubic => "b".into(),
            Symbol::Dispersion => "d".into(),
            Symbol::Modulus => "m".into(),
            Symbol::CnAmp(1) => "A".into(),
            Symbol::CnAmp(i) => format!("A{i}"),
            Symbol::DnAmp(1) => "B".into(),
            Symbol::DnAmp(i) => format!("B{i}"),
            Symbol::Offset => "D".into(),
            Symbol::Speed => "v".into(),
            Symbol::InvCoef => "h".into(),
            Symbol::Drift => "w".into(),
            Symbol::SqrtModulus => "sm".into(),
            Symbol::SqrtRatio => "sr".into(),
            Symbol::InvCubic => "ib".into(),
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fixed = match s {
            "a" => Some(Symbol::Quadratic),
            "b" => Some(Symbol::Cubic),
            "d" => Some(Symbol::Dispersion),
            "m" => Some(Symbol::Modulus),
            "A" => Some(Symbol::A),
            "B" => Some(Symbol::B),
            "D" | "A0" => Some(Symbol::Offset),
            "v" => Some(Symbol::Speed),
            "h" => Some(Symbol::InvCoef),
            "w" => Some(Symbol::Drift),
            "sm" => Some(Symbol::SqrtModulus),
            "sr" => Some(Symbol::SqrtRatio),
            "ib" => Some(Symbol::InvCubic),
            _ => None,
        };
        if let Some(sym) = fixed {
            return Ok(sym);
        }
        let indexed = |rest: &str| rest.parse::<u16>().ok().filter(|&i| i >= 1);
        if let Some(i) = s.strip_prefix('A').and_then(indexed) {
            return Ok(Symbol::CnAmp(i));
        }
        if let Some(i) = s.strip_prefix('B').and_then(indexed) {
            return Ok(Symbol::DnAmp(i));
        }
        Err(Error::Parse(format!("unknown symbol `{s}`")))
    }
}

/// Numeric values for symbols.
pub type Bindings = BTreeMap<Symbol, f64>;

/// A power product of symbols, stored sorted by symbol with no zero exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(sym: Symbol) -> Self {
        Monomial(vec![(sym, 1)])
    }

    pub fn from_powers(powers: impl IntoIterator<Item = (Symbol, u32)>) -> Self {
        let mut map: BTreeMap<Symbol, u32> = BTreeMap::new();
        for (s, e) in powers {
            *map.entry(s).or_default() += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, sym: Symbol) -> u32 {
        self.0
            .iter()
            .find(|&&(s, _)| s == sym)
            .map_or(0, |&(_, e)| e)
    }

    pub fn powers(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::from_powers(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn with_exponent(&self, sym: Symbol, exp: u32) -> Monomial {
        Monomial::from_powers(
            self.0
                .iter()
                .filter(|&&(s, _)| s != sym)
                .copied()
                .chain(std::iter::once((sym, exp))),
        )
    }

    /// Exponent-wise minimum.
    fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter_map(|&(s, e)| {
                    let o = other.exponent(s);
                    (o > 0).then(|| (s, e.min(o)))
                })
                .collect(),
        )
    }

    /// `self / other`; `other` must divide `self`.
    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .filter_map(|&(s, e)| {
                    let r = e - other.exponent(s);
                    (r > 0).then_some((s, r))
                })
                .collect(),
        )
    }
}

/// Graded order: lower total degree first; within a degree the monomial with
/// the larger exponent on the first differing symbol comes first.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (mut i, mut j) = (0, 0);
            loop {
                match (self.0.get(i), other.0.get(j)) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Less,
                    (None, Some(_)) => return Ordering::Greater,
                    (Some(&(s, e)), Some(&(t, f))) => match s.cmp(&t) {
                        Ordering::Less => return Ordering::Less,
                        Ordering::Greater => return Ordering::Greater,
                        Ordering::Equal => match f.cmp(&e) {
                            Ordering::Equal => {
                                i += 1;
                                j += 1;
                            }
                            ord => return ord,
                        },
                    },
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        for (k, &(s, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact rational value of a finite double.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Domain(format!("non-finite value {x}")))
}

/// Polynomial in [`Symbol`]s with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ParamPoly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        ParamPoly::default()
    }

    pub fn one() -> Self {
        ParamPoly::constant(rational(1))
    }

    pub fn constant(c: BigRational) -> Self {
        ParamPoly::term(c, Monomial::one())
    }

    pub fn integer(n: i64) -> Self {
        ParamPoly::constant(rational(n))
    }

    pub fn var(sym: Symbol) -> Self {
        ParamPoly::term(rational(1), Monomial::var(sym))
    }

    pub fn term(c: BigRational, mono: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        ParamPoly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = ParamPoly::zero();
        for (mono, c) in terms {
            p.add_term(mono, c);
        }
        p
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// Constant value if the polynomial has no symbols.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms
            .keys()
            .flat_map(|m| m.powers().iter().map(|&(s, _)| s))
            .collect()
    }

    pub fn contains(&self, sym: Symbol) -> bool {
        self.terms.keys().any(|m| m.exponent(sym) > 0)
    }

    pub fn degree_in(&self, sym: Symbol) -> u32 {
        self.terms.keys().map(|m| m.exponent(sym)).max().unwrap_or(0)
    }

    fn add_term(&mut self, mono: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> ParamPoly {
        if c.is_zero() {
            return ParamPoly::zero();
        }
        ParamPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> ParamPoly {
        ParamPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.mul(mono), k.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> ParamPoly {
        let mut acc = ParamPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to `sym`.
    pub fn derivative(&self, sym: Symbol) -> ParamPoly {
        ParamPoly::from_terms(self.terms.iter().filter_map(|(m, c)| {
            let e = m.exponent(sym);
            (e > 0).then(|| (m.with_exponent(sym, e - 1), c * rational(e as i64)))
        }))
    }

    /// Simultaneous substitution of symbols by polynomials.
    pub fn substitute(&self, map: &BTreeMap<Symbol, ParamPoly>) -> ParamPoly {
        let mut out = ParamPoly::zero();
        // Powers are reused heavily across terms.
        let mut cache: BTreeMap<(Symbol, u32), ParamPoly> = BTreeMap::new();
        for (mono, c) in &self.terms {
            let mut kept = Vec::new();
            let mut factor = ParamPoly::constant(c.clone());
            for &(s, e) in mono.powers() {
                match map.get(&s) {
                    Some(p) => {
                        let pe = cache.entry((s, e)).or_insert_with(|| p.pow(e));
                        factor = &factor * &*pe;
                    }
                    None => kept.push((s, e)),
                }
            }
            let rest = Monomial::from_powers(kept);
            for (m, k) in factor.terms {
                out.add_term(m.mul(&rest), k);
            }
        }
        out
    }

    pub fn substitute_one(&self, sym: Symbol, value: &ParamPoly) -> ParamPoly {
        let mut map = BTreeMap::new();
        map.insert(sym, value.clone());
        self.substitute(&map)
    }

    /// Applies `f` to every monomial, summing the polynomials it returns
    /// (scaled by the original coefficients).
    pub fn rewrite_monomials(&self, mut f: impl FnMut(&Monomial) -> ParamPoly) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (mono, c) in &self.terms {
            for (m, k) in f(mono).terms {
                out.add_term(m, k * c);
            }
        }
        out
    }

    pub fn eval(&self, bindings: &Bindings) -> Result<f64> {
        let mut sum = 0.0;
        for (mono, c) in &self.terms {
            let mut term = c.to_f64().unwrap_or(f64::NAN);
            for &(s, e) in mono.powers() {
                let x = bindings.get(&s).ok_or(Error::Unbound(s))?;
                term *= x.powi(e as i32);
            }
            sum += term;
        }
        Ok(sum)
    }

    /// Divides out the monomial content and the rational content and makes the
    /// leading coefficient positive. Two equations `p = 0`, `q = 0` that
    /// differ only by such factors normalize to the same polynomial.
    pub fn normalized(&self) -> ParamPoly {
        let mut iter = self.terms.iter();
        let Some((first, _)) = iter.next() else {
            return ParamPoly::zero();
        };
        let content_mono = iter.fold(first.clone(), |g, (m, _)| g.gcd(m));
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = BigRational::new(num_gcd, den_lcm);
        let lead = self.terms.iter().next().map(|(_, c)| c.is_negative());
        if lead == Some(true) {
            content = -content;
        }
        // Dividing by a monomial preserves the relative order of the terms.
        ParamPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.div(&content_mono), c / &content))
                .collect(),
        }
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (mono, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            match (k, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            if mono.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for ParamPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tokens = tokenize(s)?;
        let mut parser = Parser { tokens, pos: 0 };
        let p = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(Error::Parse(format!("trailing input in `{s}`")));
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            out.push(Token::Num(digits.parse().expect("digits")));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<ParamPoly> {
        let mut acc = ParamPoly::zero();
        let mut sign = match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                -1
            }
            Some('+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { &acc - &t } else { &acc + &t };
            match self.peek_op() {
                Some('+') => sign = 1,
                Some('-') => sign = -1,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<ParamPoly> {
        let mut acc = self.power()?;
        loop {
            match self.peek_op() {
                Some('*') => {
                    self.pos += 1;
                    acc = &acc * &self.power()?;
                }
                Some('/') => {
                    self.pos += 1;
                    let divisor = self
                        .power()?
                        .as_constant()
                        .filter(|c| !c.is_zero())
                        .ok_or_else(|| Error::Parse("division by a non-constant or zero".into()))?;
                    acc = acc.scale(&divisor.recip());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<ParamPoly> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            match self.tokens.get(self.pos) {
                Some(Token::Num(n)) => {
                    let e = n
                        .to_u32()
                        .ok_or_else(|| Error::Parse("exponent too large".into()))?;
                    self.pos += 1;
                    return Ok(base.pow(e));
                }
                _ => return Err(Error::Parse("expected integer exponent".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ParamPoly> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        match tok {
            Some(Token::Num(n)) => Ok(ParamPoly::constant(BigRational::from_integer(n))),
            Some(Token::Ident(name)) => Ok(ParamPoly::var(name.parse()?)),
            Some(Token::Op('(')) => {
                let inner = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(Token::Op('-')) => Ok(-&self.power()?),
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

impl Add for &ParamPoly {
    type Output = ParamPoly;

    fn add(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&ParamPoly> for ParamPoly {
    fn add_assign(&mut self, rhs: &ParamPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl Sub for &ParamPoly {
    type Output = ParamPoly;

    fn sub(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Neg for &ParamPoly {
    type Output = ParamPoly;

    fn neg(self) -> ParamPoly {
        ParamPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &ParamPoly {
    type Output = ParamPoly;

    fn mul(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for ParamPoly {
            type Output = ParamPoly;
            fn $method(self, rhs: ParamPoly) -> ParamPoly {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        -&self
    }
}
