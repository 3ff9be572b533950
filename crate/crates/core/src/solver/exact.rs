//! Exact back-substitution of the closed forms.
//!
//! The amplitudes involve square roots, so substitution happens in the ring
//! extended by formal generators `sm = √m`, `sr = √(3d/(2b))` and `ib = 1/b`
//! modulo `sm² = m`, `sr² = (3/2)·d·ib`, `b·ib = 1`. The leading terms of the
//! three relations are pairwise coprime, so they form a Gröbner basis and
//! [`reduce_extended`] computes a unique normal form: an equation is
//! satisfied exactly iff its reduced image is the zero polynomial.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::ansatz::{AlgebraicSystem, PdeParams};
use crate::error::Result;
use crate::symexpr::{rational, rational_from_f64, ratio, Bindings, Monomial, ParamPoly, Symbol};

use super::{Sign, SolutionFamily};

/// Shift added to a closed-form value before substitution.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub symbol: Symbol,
    pub delta: BigRational,
}

/// `a, b, d, m` as exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactParams {
    pub a: BigRational,
    pub b: BigRational,
    pub d: BigRational,
    pub m: BigRational,
}

impl ExactParams {
    /// Every finite double is an exact dyadic rational.
    pub fn from_params(p: &PdeParams) -> Result<Self> {
        Ok(ExactParams {
            a: rational_from_f64(p.a)?,
            b: rational_from_f64(p.b)?,
            d: rational_from_f64(p.d)?,
            m: rational_from_f64(p.m)?,
        })
    }

    fn substitution(&self) -> BTreeMap<Symbol, ParamPoly> {
        let mut map = BTreeMap::new();
        map.insert(Symbol::Quadratic, ParamPoly::constant(self.a.clone()));
        map.insert(Symbol::Cubic, ParamPoly::constant(self.b.clone()));
        map.insert(Symbol::Dispersion, ParamPoly::constant(self.d.clone()));
        map.insert(Symbol::Modulus, ParamPoly::constant(self.m.clone()));
        if !self.b.is_zero() {
            map.insert(Symbol::InvCubic, ParamPoly::constant(self.b.recip()));
        }
        map
    }
}

fn var(s: Symbol) -> ParamPoly {
    ParamPoly::var(s)
}

/// Closed-form values of `A, B, D, v` in the extended ring, and
/// `w = h·v` for the time-dependent system.
pub fn closed_form_substitution(sign_cn: Sign, sign_dn: Sign) -> BTreeMap<Symbol, ParamPoly> {
    let sm = var(Symbol::SqrtModulus);
    let sr = var(Symbol::SqrtRatio);
    let ib = var(Symbol::InvCubic);
    let a = var(Symbol::Quadratic);
    let speed: ParamPoly = "(2*b*d*(1+m) - a^2)/4".parse().expect("literal");
    let speed = &speed * &ib;
    let mut map = BTreeMap::new();
    map.insert(Symbol::A, (&sm * &sr).scale(&rational(sign_cn.integer())));
    map.insert(Symbol::B, sr.scale(&rational(sign_dn.integer())));
    map.insert(Symbol::D, (&a * &ib).scale(&ratio(-1, 2)));
    map.insert(Symbol::Drift, &speed * &var(Symbol::InvCoef));
    map.insert(Symbol::Speed, speed);
    map
}

/// Normal form modulo `sm² − m`, `sr² − (3/2)·d·ib`, `b·ib − 1`.
pub fn reduce_extended(p: &ParamPoly) -> ParamPoly {
    p.rewrite_monomials(|mono| {
        let sm = mono.exponent(Symbol::SqrtModulus);
        let sr = mono.exponent(Symbol::SqrtRatio);
        let mut b = mono.exponent(Symbol::Cubic);
        let mut ib = mono.exponent(Symbol::InvCubic) + sr / 2;
        let cancel = b.min(ib);
        b -= cancel;
        ib -= cancel;
        let powers = mono
            .powers()
            .iter()
            .copied()
            .filter(|&(s, _)| {
                !matches!(
                    s,
                    Symbol::SqrtModulus | Symbol::SqrtRatio | Symbol::Cubic | Symbol::InvCubic
                )
            })
            .chain([
                (Symbol::SqrtModulus, sm % 2),
                (Symbol::Modulus, sm / 2),
                (Symbol::SqrtRatio, sr % 2),
                (Symbol::Dispersion, sr / 2),
                (Symbol::Cubic, b),
                (Symbol::InvCubic, ib),
            ]);
        let coef = ratio(3, 2).pow((sr / 2) as i32);
        ParamPoly::term(coef, Monomial::from_powers(powers))
    })
}

fn apply(
    sys: &AlgebraicSystem,
    mut map: BTreeMap<Symbol, ParamPoly>,
    perturbations: &[Perturbation],
) -> Vec<ParamPoly> {
    for p in perturbations {
        let entry = map.entry(p.symbol).or_insert_with(|| var(p.symbol));
        *entry = &*entry + &ParamPoly::constant(p.delta.clone());
    }
    sys.polys()
        .map(|eq| reduce_extended(&eq.substitute(&map)))
        .collect()
}

/// Reduced images of every equation with `a, b, d, m` left symbolic.
pub fn back_substitute_symbolic(
    sign_cn: Sign,
    sign_dn: Sign,
    sys: &AlgebraicSystem,
    perturbations: &[Perturbation],
) -> Vec<ParamPoly> {
    apply(sys, closed_form_substitution(sign_cn, sign_dn), perturbations)
}

/// Reduced images of every equation at the family's parameters, taken as
/// exact rationals. Only `sm`, `sr` (and `h` for time-dependent systems)
/// survive in a nonzero result.
pub fn back_substitute_exact(
    fam: &SolutionFamily,
    sys: &AlgebraicSystem,
    perturbations: &[Perturbation],
) -> Result<Vec<ParamPoly>> {
    let exact = ExactParams::from_params(&fam.params)?;
    let values = exact.substitution();
    Ok(
        back_substitute_symbolic(fam.sign_cn, fam.sign_dn, sys, perturbations)
            .into_iter()
            .map(|p| p.substitute(&values))
            .collect(),
    )
}

/// Floating-point residuals of every equation at the family's values.
pub fn numeric_residuals(fam: &SolutionFamily, sys: &AlgebraicSystem, h: f64) -> Result<Vec<f64>> {
    let mut b: Bindings = fam.params.bindings();
    b.insert(Symbol::A, fam.amp_cn);
    b.insert(Symbol::B, fam.amp_dn);
    b.insert(Symbol::D, fam.offset);
    b.insert(Symbol::Speed, fam.speed);
    b.insert(Symbol::InvCoef, h);
    b.insert(Symbol::Drift, fam.speed * h);
    sys.polys().map(|p| p.eval(&b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{derive_constant, derive_timedep, AnsatzSpec};
    use crate::solver::solve_closed_form;

    fn first_order() -> AlgebraicSystem {
        derive_constant(&AnsatzSpec::new(1).unwrap())
    }

    const SIGNS: [(Sign, Sign); 4] = [
        (Sign::Plus, Sign::Plus),
        (Sign::Plus, Sign::Minus),
        (Sign::Minus, Sign::Plus),
        (Sign::Minus, Sign::Minus),
    ];

    #[test]
    fn reduction_rules() {
        let p: ParamPoly = "sm^3*sr^2*b^2 + ib*b".parse().unwrap();
        let expected: ParamPoly = "3/2*m*sm*d*b + 1".parse().unwrap();
        assert_eq!(reduce_extended(&p), expected);
    }

    #[test]
    fn symbolic_back_substitution_vanishes() {
        let sys = first_order();
        for (sa, sb) in SIGNS {
            let rs = back_substitute_symbolic(sa, sb, &sys, &[]);
            assert_eq!(rs.len(), 7);
            assert!(rs.iter().all(ParamPoly::is_zero), "{rs:?}");
        }
    }

    #[test]
    fn timedep_back_substitution_vanishes() {
        let sys = derive_timedep(&AnsatzSpec::new(1).unwrap());
        for (sa, sb) in SIGNS {
            assert!(back_substitute_symbolic(sa, sb, &sys, &[])
                .iter()
                .all(ParamPoly::is_zero));
        }
    }

    #[test]
    fn rational_back_substitution_vanishes() {
        let sys = first_order();
        let p = PdeParams::new(0.75, -1.5, -0.25, 0.375).unwrap();
        for fam in solve_closed_form(&p).unwrap() {
            let rs = back_substitute_exact(&fam, &sys, &[]).unwrap();
            assert!(rs.iter().all(ParamPoly::is_zero));
            let num = numeric_residuals(&fam, &sys, 1.0).unwrap();
            assert!(num.iter().all(|r| r.abs() < 1e-12), "{num:?}");
        }
    }

    #[test]
    fn perturbed_speed_breaks_only_speed_equations() {
        let sys = first_order();
        let pert = [Perturbation {
            symbol: Symbol::Speed,
            delta: rational(1),
        }];
        for (sa, sb) in SIGNS {
            let rs = back_substitute_symbolic(sa, sb, &sys, &pert);
            let broken: Vec<usize> = (0..rs.len()).filter(|&i| !rs[i].is_zero()).collect();
            assert_eq!(broken.len(), 2);
            for i in broken {
                assert!(sys.equations[i].poly.contains(Symbol::Speed));
            }
        }
    }

    #[test]
    fn zero_a_gives_zero_offset() {
        let sys = first_order();
        let p = PdeParams::new(0.0, 1.0, 2.0, 0.5).unwrap();
        let fam = solve_closed_form(&p).unwrap()[1];
        assert_eq!(fam.offset, 0.0);
        for i in [0, 4] {
            // Both (a + 2bD)-equations.
            let mut b = p.bindings();
            b.insert(Symbol::A, fam.amp_cn);
            b.insert(Symbol::B, fam.amp_dn);
            b.insert(Symbol::D, 0.0);
            assert_eq!(sys.equations[i].poly.eval(&b).unwrap(), 0.0);
        }
        assert!(back_substitute_exact(&fam, &sys, &[])
            .unwrap()
            .iter()
            .all(ParamPoly::is_zero));
    }
}
