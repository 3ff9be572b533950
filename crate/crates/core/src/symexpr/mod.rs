//! Exact symbolic algebra over `Σ coef · snⁱ · cnʲ · dnᵏ`.
//!
//! Coefficients are [`ParamPoly`]s over the scalar symbols of the problem
//! with arbitrary-precision rational coefficients. Expressions are kept in
//! canonical form: `cn²` and `dn²` are always rewritten through
//! `cn² = 1 − sn²` and `dn² = 1 − m·sn²`, so every stored monomial has
//! `cn` and `dn` exponents at most one while sn powers are left alone.
//! `{snⁱ, snⁱ·cn, snⁱ·dn, snⁱ·cn·dn}` is then a basis, and setting each
//! coefficient to zero is the coefficient-matching step of the derivation.

mod expr;
mod poly;

use nalgebra::DMatrix;

pub use expr::{EllipticExpr, EllipticMonomial, RawTerm};
pub use poly::{rational, rational_from_f64, ratio, Bindings, Monomial, ParamPoly, Symbol};

use crate::elliptic;
use crate::error::{Error, Result};

/// Spectral summary of the Gram matrix of the canonical basis sampled over one period.
#[derive(Debug, Clone, PartialEq)]
pub struct GramReport {
    pub dimension: usize,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

impl GramReport {
    pub fn condition(&self) -> f64 {
        self.max_eigenvalue / self.min_eigenvalue
    }
}

/// Numerical linear-independence check of `{snⁱ, snⁱcn, snⁱdn, snⁱcn·dn : i ≤ max_sn}`.
///
/// Only meaningful for `0 < m < 1`: at `m = 0` we have `dn ≡ 1`, and at
/// `m = 1` we have `cn ≡ dn`.
pub fn basis_gram(max_sn: u32, m: f64, samples: usize) -> Result<GramReport> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::Domain(format!(
            "basis is dependent at m = {m}; need 0 < m < 1"
        )));
    }
    let period = 4.0 * elliptic::complete_k(m)?;
    let basis: Vec<EllipticMonomial> = (0..=max_sn)
        .flat_map(|i| {
            [(0, 0), (1, 0), (0, 1), (1, 1)]
                .into_iter()
                .map(move |(c, d)| EllipticMonomial::new(i, c, d))
        })
        .collect();
    let mut phi = DMatrix::<f64>::zeros(samples, basis.len());
    for r in 0..samples {
        let t = elliptic::jacobi(period * r as f64 / samples as f64, m)?;
        for (c, mono) in basis.iter().enumerate() {
            phi[(r, c)] = mono.eval(&t);
        }
    }
    let gram = phi.transpose() * &phi / samples as f64;
    let eig = gram.symmetric_eigenvalues();
    Ok(GramReport {
        dimension: basis.len(),
        min_eigenvalue: eig.min(),
        max_eigenvalue: eig.max(),
    })
}
