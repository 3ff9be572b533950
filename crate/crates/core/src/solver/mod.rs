//! Closed-form solution families of the first-order system and their
//! verification by exact back-substitution and multi-start Newton search.

mod exact;
mod numeric;

use std::fmt;

pub use exact::{
    back_substitute_exact, back_substitute_symbolic, closed_form_substitution, numeric_residuals,
    reduce_extended, ExactParams, Perturbation,
};
pub use numeric::{solve_numeric, NumericConfig, NumericRoot, RootKind};

use crate::ansatz::PdeParams;
use crate::elliptic;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn integer(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn of(x: f64) -> Sign {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// Sign of the offset `D = −a/(2b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OffsetSign {
    Negative,
    Zero,
    Positive,
}

/// Class of a family by `sign(A·B)` and `sign(D)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FamilyClass {
    pub product_positive: bool,
    pub offset: OffsetSign,
}

impl FamilyClass {
    pub fn label(&self) -> &'static str {
        match (self.product_positive, self.offset) {
            (true, OffsetSign::Negative) => "AB>0,D<0",
            (true, OffsetSign::Positive) => "AB>0,D>0",
            (false, OffsetSign::Negative) => "AB<0,D<0",
            (false, OffsetSign::Positive) => "AB<0,D>0",
            (true, OffsetSign::Zero) => "AB>0,D=0",
            (false, OffsetSign::Zero) => "AB<0,D=0",
        }
    }

    /// Relation between the signs of `a` and `b` implied by the class.
    pub fn regime(&self) -> &'static str {
        match self.offset {
            OffsetSign::Negative => "a,b same sign",
            OffsetSign::Positive => "a,b different sign",
            OffsetSign::Zero => "a = 0",
        }
    }
}

impl fmt::Display for FamilyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.label(), self.regime())
    }
}

/// `u(ξ) = A·cn(ξ, m) + B·dn(ξ, m) + D`, traveling with speed `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionFamily {
    pub amp_cn: f64,
    pub amp_dn: f64,
    pub offset: f64,
    pub speed: f64,
    pub sign_cn: Sign,
    pub sign_dn: Sign,
    pub params: PdeParams,
}

impl SolutionFamily {
    pub fn class(&self) -> FamilyClass {
        let offset = if self.offset < 0.0 {
            OffsetSign::Negative
        } else if self.offset > 0.0 {
            OffsetSign::Positive
        } else {
            OffsetSign::Zero
        };
        FamilyClass {
            product_positive: self.sign_cn == self.sign_dn,
            offset,
        }
    }

    /// Profile value at `ξ`.
    pub fn profile(&self, xi: f64) -> Result<f64> {
        let t = elliptic::jacobi(xi, self.params.m)?;
        Ok(self.amp_cn * t.cn + self.amp_dn * t.dn + self.offset)
    }

    /// `|A| + |B| + |D|`, a bound on `|u|`.
    pub fn amplitude_bound(&self) -> f64 {
        self.amp_cn.abs() + self.amp_dn.abs() + self.offset.abs()
    }
}

/// `(2bd(1+m) − a²) / (4b)`.
pub fn closed_form_speed(p: &PdeParams) -> f64 {
    (2.0 * p.b * p.d * (1.0 + p.m) - p.a * p.a) / (4.0 * p.b)
}

fn check_solvable(p: &PdeParams) -> Result<()> {
    if p.b == 0.0 {
        return Err(Error::DegenerateKdv);
    }
    if !(p.m > 0.0 && p.m <= 1.0) {
        return Err(Error::Domain(format!("closed forms need 0 < m <= 1, got m = {}", p.m)));
    }
    if p.b * p.d <= 0.0 {
        return Err(Error::NoRealSolution(p.b * p.d));
    }
    Ok(())
}

/// The four families `A = ±√(3dm/2b)`, `B = ±√(3d/2b)`, `D = −a/(2b)`,
/// `v = (2bd(1+m) − a²)/(4b)`, ordered `(+,+), (+,−), (−,+), (−,−)`.
pub fn solve_closed_form(p: &PdeParams) -> Result<Vec<SolutionFamily>> {
    check_solvable(p)?;
    let ratio = 3.0 * p.d / (2.0 * p.b);
    let amp_dn = ratio.sqrt();
    let amp_cn = (ratio * p.m).sqrt();
    let offset = if p.a == 0.0 { 0.0 } else { -p.a / (2.0 * p.b) };
    let speed = closed_form_speed(p);
    let signs = [Sign::Plus, Sign::Minus];
    Ok(signs
        .iter()
        .flat_map(|&sa| signs.iter().map(move |&sb| (sa, sb)))
        .map(|(sign_cn, sign_dn)| SolutionFamily {
            amp_cn: sign_cn.value() * amp_cn,
            amp_dn: sign_dn.value() * amp_dn,
            offset,
            speed,
            sign_cn,
            sign_dn,
            params: *p,
        })
        .collect())
}
