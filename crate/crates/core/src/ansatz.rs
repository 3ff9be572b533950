//! Compiles the traveling-wave ansatz and the PDE into a symbolic residual,
//! then extracts the overdetermined algebraic system by coefficient matching.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::symexpr::{EllipticExpr, EllipticMonomial, ParamPoly, Symbol};

/// Coefficients of `u_t + a·u·u_x + b·u²·u_x + d·u_xxx = 0` and the elliptic parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeParams {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub m: f64,
}

impl PdeParams {
    pub fn new(a: f64, b: f64, d: f64, m: f64) -> Result<Self> {
        if ![a, b, d, m].iter().all(|x| x.is_finite()) {
            return Err(Error::Domain("non-finite PDE parameter".into()));
        }
        if !(0.0..=1.0).contains(&m) {
            return Err(Error::Domain(format!("m = {m} outside [0, 1]")));
        }
        Ok(PdeParams { a, b, d, m })
    }

    /// Numeric bindings for `a, b, d, m`.
    pub fn bindings(&self) -> crate::symexpr::Bindings {
        [
            (Symbol::Quadratic, self.a),
            (Symbol::Cubic, self.b),
            (Symbol::Dispersion, self.d),
            (Symbol::Modulus, self.m),
        ]
        .into_iter()
        .collect()
    }
}

/// `u = Σ_{i=1}^{n} sn^{i-1}·(A_i·cn + B_i·dn) + A_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnsatzSpec {
    order: u16,
}

impl AnsatzSpec {
    pub fn new(order: u16) -> Result<Self> {
        if order < 1 {
            return Err(Error::Domain(format!("ansatz order must be >= 1, got {order}")));
        }
        Ok(AnsatzSpec { order })
    }

    pub fn order(&self) -> u16 {
        self.order
    }

    /// `A_1..A_n, B_1..B_n, A_0` in symbol order.
    pub fn coefficient_symbols(&self) -> Vec<Symbol> {
        let mut syms: Vec<Symbol> = (1..=self.order).map(Symbol::CnAmp).collect();
        syms.extend((1..=self.order).map(Symbol::DnAmp));
        syms.push(Symbol::Offset);
        syms
    }

    /// Unknowns of the extracted system, speed last.
    pub fn unknowns(&self) -> Vec<Symbol> {
        let mut syms = self.coefficient_symbols();
        syms.push(Symbol::Speed);
        syms
    }
}

pub fn build_ansatz(spec: &AnsatzSpec) -> EllipticExpr {
    let mut u = EllipticExpr::constant(ParamPoly::var(Symbol::Offset));
    for i in 1..=spec.order {
        let sn_pow = (i - 1) as u32;
        u = &u
            + &EllipticExpr::monomial(
                EllipticMonomial::new(sn_pow, 1, 0),
                ParamPoly::var(Symbol::CnAmp(i)),
            );
        u = &u
            + &EllipticExpr::monomial(
                EllipticMonomial::new(sn_pow, 0, 1),
                ParamPoly::var(Symbol::DnAmp(i)),
            );
    }
    u
}

/// `a·u·u′ + b·u²·u′ + d·u‴`.
fn spatial_part(u: &EllipticExpr) -> (EllipticExpr, EllipticExpr) {
    let du = u.differentiate();
    let d3u = du.nth_derivative(2);
    let a = ParamPoly::var(Symbol::Quadratic);
    let b = ParamPoly::var(Symbol::Cubic);
    let d = ParamPoly::var(Symbol::Dispersion);
    let u_du = u * &du;
    let spatial = &(&u_du.scale(&a) + &(u * &u_du).scale(&b)) + &d3u.scale(&d);
    (du, spatial)
}

/// Residual of the traveling-wave ODE `−v·u′ + a·u·u′ + b·u²·u′ + d·u‴`.
pub fn residual_constant(u: &EllipticExpr) -> EllipticExpr {
    let (du, spatial) = spatial_part(u);
    &spatial - &du.scale(&ParamPoly::var(Symbol::Speed))
}

/// Residual for `f(t)·u_t + …`: `−w·u′ + h·(a·u·u′ + b·u²·u′ + d·u‴)` with
/// `h = 1/f(t)` and `w = v + t·v_t`. Valid once `A_t = B_t = D_t = 0`.
pub fn residual_timedep(u: &EllipticExpr) -> EllipticExpr {
    let (du, spatial) = spatial_part(u);
    &spatial.scale(&ParamPoly::var(Symbol::InvCoef)) - &du.scale(&ParamPoly::var(Symbol::Drift))
}

/// One coefficient equation `poly = 0` and the basis monomial it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemEquation {
    pub source: EllipticMonomial,
    pub poly: ParamPoly,
}

/// Ordered polynomial constraints from coefficient matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraicSystem {
    pub equations: Vec<SystemEquation>,
    pub unknowns: Vec<Symbol>,
    /// Conditions recorded outside the polynomial ring, e.g. `A_t = 0`.
    pub facts: Vec<String>,
}

impl AlgebraicSystem {
    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn polys(&self) -> impl Iterator<Item = &ParamPoly> {
        self.equations.iter().map(|e| &e.poly)
    }

    pub fn normalized(&self) -> Vec<ParamPoly> {
        self.polys().map(ParamPoly::normalized).collect()
    }

    pub fn substitute(&self, map: &BTreeMap<Symbol, ParamPoly>) -> AlgebraicSystem {
        let residual = EllipticExpr::from_coefficients(
            self.equations
                .iter()
                .map(|e| (e.source, e.poly.substitute(map))),
        );
        let mut sys = extract_system(&residual, &self.unknowns);
        sys.facts = self.facts.clone();
        sys
    }

    /// Text dump: facts as `#` lines, then one normalized equation per line.
    pub fn show(&self, normalize: bool) -> String {
        let mut out = String::new();
        for fact in &self.facts {
            out.push_str(&format!("# {fact}\n"));
        }
        for eq in &self.equations {
            let p = if normalize { eq.poly.normalized() } else { eq.poly.clone() };
            out.push_str(&format!("{p} = 0\n"));
        }
        out
    }
}

impl fmt::Display for AlgebraicSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.show(true))
    }
}

pub fn extract_system(residual: &EllipticExpr, unknowns: &[Symbol]) -> AlgebraicSystem {
    AlgebraicSystem {
        equations: residual
            .coefficients()
            .into_iter()
            .map(|(source, poly)| SystemEquation { source, poly })
            .collect(),
        unknowns: unknowns.to_vec(),
        facts: Vec::new(),
    }
}

/// System for the constant-coefficient equation.
pub fn derive_constant(spec: &AnsatzSpec) -> AlgebraicSystem {
    let u = build_ansatz(spec);
    extract_system(&residual_constant(&u), &spec.unknowns())
}

/// System for the `f(t)·u_t` equation; the constancy of the ansatz
/// coefficients is recorded as facts.
pub fn derive_timedep(spec: &AnsatzSpec) -> AlgebraicSystem {
    let u = build_ansatz(spec);
    let mut unknowns = spec.coefficient_symbols();
    unknowns.push(Symbol::Drift);
    let mut sys = extract_system(&residual_timedep(&u), &unknowns);
    sys.facts = spec
        .coefficient_symbols()
        .into_iter()
        .map(|s| format!("{s}_t = 0"))
        .collect();
    sys
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::Bindings;

    fn p(s: &str) -> ParamPoly {
        s.parse().unwrap()
    }

    fn first_order() -> AnsatzSpec {
        AnsatzSpec::new(1).unwrap()
    }

    #[test]
    fn order_zero_rejected() {
        assert!(AnsatzSpec::new(0).is_err());
    }

    #[test]
    fn ansatz_first_order() {
        let u = build_ansatz(&first_order());
        assert_eq!(u.to_string(), "(D) + (A)*cn + (B)*dn");
        let mut zero = BTreeMap::new();
        zero.insert(Symbol::A, ParamPoly::zero());
        zero.insert(Symbol::B, ParamPoly::zero());
        assert_eq!(u.substitute(&zero), EllipticExpr::constant(p("D")));
    }

    #[test]
    fn ansatz_second_order() {
        let spec = AnsatzSpec::new(2).unwrap();
        let u = build_ansatz(&spec);
        let expected = EllipticExpr::from_coefficients([
            (EllipticMonomial::ONE, p("D")),
            (EllipticMonomial::CN, p("A")),
            (EllipticMonomial::DN, p("B")),
            (EllipticMonomial::new(1, 1, 0), p("A2")),
            (EllipticMonomial::new(1, 0, 1), p("B2")),
        ]);
        assert_eq!(u, expected);
        assert_eq!(spec.coefficient_symbols().len(), 5);
    }

    #[test]
    fn constant_ansatz_has_zero_residual() {
        let u = EllipticExpr::constant(p("D"));
        assert!(residual_constant(&u).is_zero());
        assert!(residual_timedep(&u).is_zero());
        assert!(extract_system(&residual_constant(&u), &[]).is_empty());
    }

    #[test]
    fn seven_equations_for_first_order() {
        let sys = derive_constant(&first_order());
        assert_eq!(sys.len(), 7);
        assert_eq!(
            sys.equations[0].poly.normalized(),
            p("a + 2*b*D + a*m + 2*b*D*m")
        );
        assert!(sys.normalized().contains(&p("a + 2*b*D")));
        // Raw first coefficient factors as -(1+m)(a+2bD)·A·B.
        assert_eq!(sys.equations[0].poly, p("-A*B*(1+m)*(a+2*b*D)"));
    }

    #[test]
    fn sn_residual_matches_finite_differences() {
        let u = EllipticExpr::sn();
        let r = residual_constant(&u);
        let mut map = BTreeMap::new();
        map.insert(Symbol::Quadratic, ParamPoly::zero());
        map.insert(Symbol::Cubic, ParamPoly::zero());
        let r = r.substitute(&map);
        assert!(!r.is_zero());
        let mut b = Bindings::new();
        b.insert(Symbol::Speed, 0.7);
        b.insert(Symbol::Dispersion, 1.3);
        let m = 0.6;
        let sn = |x: f64| crate::elliptic::jacobi(x, m).unwrap().sn;
        let h = 1e-3;
        for &x in &[-1.2, 0.3, 2.9] {
            let d1 = (sn(x + h) - sn(x - h)) / (2.0 * h);
            let d3 = (sn(x + 2.0 * h) - 2.0 * sn(x + h) + 2.0 * sn(x - h) - sn(x - 2.0 * h))
                / (2.0 * h * h * h);
            let fd = -0.7 * d1 + 1.3 * d3;
            assert!((r.eval_numeric(&b, x, m).unwrap() - fd).abs() < 1e-5);
        }
    }

    #[test]
    fn timedep_reduces_to_constant() {
        let u = build_ansatz(&first_order());
        let mut map = BTreeMap::new();
        map.insert(Symbol::InvCoef, ParamPoly::one());
        map.insert(Symbol::Drift, ParamPoly::var(Symbol::Speed));
        assert_eq!(residual_timedep(&u).substitute(&map), residual_constant(&u));
    }

    #[test]
    fn timedep_dn_equation() {
        let sys = derive_timedep(&first_order());
        let eq = sys
            .equations
            .iter()
            .find(|e| e.source == EllipticMonomial::new(1, 1, 0))
            .unwrap();
        let expected = p("h*(2*A^2*b*B + A^2*b*B*m + b*B^3*m - 4*B*d*m + a*B*D*m + b*B*D^2*m - B*d*m^2) - B*m*w");
        assert_eq!(eq.poly, -&expected);
        assert_eq!(sys.facts, vec!["A_t = 0", "B_t = 0", "D_t = 0"]);
        assert_eq!(sys.len(), 7);
    }

    #[test]
    fn mkdv_specialization_forces_zero_offset() {
        let mut map = BTreeMap::new();
        map.insert(Symbol::Quadratic, ParamPoly::zero());
        let sys = derive_constant(&first_order()).substitute(&map);
        assert_eq!(sys.len(), 7);
        // With a = 0 both offset equations are proportional to D alone.
        assert_eq!(sys.equations[0].poly, p("-2*A*B*b*D*(1+m)"));
        let sn3 = sys
            .equations
            .iter()
            .find(|e| e.source == EllipticMonomial::new(3, 0, 0))
            .unwrap();
        assert_eq!(sn3.poly, p("4*A*B*b*D*m"));
    }

    #[test]
    fn higher_order_systems_are_generated() {
        let sys = derive_constant(&AnsatzSpec::new(2).unwrap());
        assert!(sys.len() > 7);
        assert!(sys.polys().all(|q| !q.is_zero()));
        assert_eq!(sys.unknowns.len(), 6);
    }
}
