//! Jacobi-elliptic traveling waves of the combined KdV–mKdV equation
//! `u_t + a·u·u_x + b·u²·u_x + d·u_xxx = 0`.
//!
//! The crate derives the coefficient-matching system for an sn/cn/dn ansatz
//! with exact symbolic algebra, produces and verifies the closed-form
//! solution families, and checks them against a pseudo-spectral integrator.

pub mod ansatz;
pub mod elliptic;
pub mod error;
pub mod quad;
pub mod sim;
pub mod solver;
pub mod symexpr;
pub mod waves;

pub use error::{Error, Result};
pub use ansatz::{AlgebraicSystem, AnsatzSpec, PdeParams};
pub use sim::{SimConfig, SimState, Simulation};
pub use solver::{FamilyClass, Sign, SolutionFamily};
pub use waves::{TimeCoefficient, VelocityLaw, WaveProfile};
