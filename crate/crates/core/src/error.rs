use thiserror::Error;

use crate::symexpr::Symbol;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the requested function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unbound symbol `{0}` in numeric evaluation")]
    Unbound(Symbol),

    #[error("degenerates to KdV, ansatz invalid (b = 0)")]
    DegenerateKdv,

    #[error("no real elliptic solution of this class (b*d = {0} is not positive)")]
    NoRealSolution(f64),

    #[error("coefficient singularity: f(t) vanishes near t = {0}")]
    CoefficientSingularity(f64),

    #[error("quadrature did not converge on [{0}, {1}]")]
    Quadrature(f64, f64),

    #[error("stability bound violated: cfl = {cfl:.4} exceeds {limit}")]
    Unstable { cfl: f64, limit: f64 },

    #[error("blow-up: non-finite value at t = {0}")]
    BlowUp(f64),

    #[error("no traveling signal: {0}")]
    NoSignal(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
