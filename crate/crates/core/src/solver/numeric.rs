//! Multi-start damped Gauss–Newton (Levenberg–Marquardt) on the
//! least-squares form of the overdetermined system.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ansatz::{AlgebraicSystem, PdeParams};
use crate::error::{Error, Result};
use crate::symexpr::{Bindings, ParamPoly, Symbol};

#[derive(Debug, Clone, PartialEq)]
pub struct NumericConfig {
    pub seeds: usize,
    pub max_steps: usize,
    /// Accept a root when `‖F(x)‖₂` is below this.
    pub residual_tol: f64,
    /// Roots closer than this (Euclidean) are merged.
    pub dedup_tol: f64,
    pub rng_seed: u64,
    /// `|A|, |B|` below this count as zero amplitude.
    pub amplitude_floor: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig {
            seeds: 64,
            max_steps: 200,
            residual_tol: 1e-10,
            dedup_tol: 1e-8,
            rng_seed: 0x5eed_cafe,
            amplitude_floor: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    /// Both the cn and dn amplitudes are nonzero.
    ClosedForm,
    /// Exactly one of the amplitudes vanishes: a pure cn or pure dn wave.
    OutsideClosedForms,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericRoot {
    /// Values in the order of the system's unknowns.
    pub values: Vec<f64>,
    pub residual_norm: f64,
    pub kind: RootKind,
}

impl NumericRoot {
    pub fn get(&self, unknowns: &[Symbol], sym: Symbol) -> Option<f64> {
        unknowns.iter().position(|&s| s == sym).map(|i| self.values[i])
    }
}

/// A polynomial in the unknowns with the parameters folded into f64 coefficients.
struct Compiled {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl Compiled {
    fn new(p: &ParamPoly, params: &Bindings, unknowns: &[Symbol]) -> Result<Self> {
        let mut terms = Vec::new();
        for (mono, c) in p.terms() {
            let mut coef = num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN);
            let mut powers = Vec::new();
            for &(s, e) in mono.powers() {
                if let Some(i) = unknowns.iter().position(|&u| u == s) {
                    powers.push((i, e as i32));
                } else {
                    coef *= params.get(&s).ok_or(Error::Unbound(s))?.powi(e as i32);
                }
            }
            terms.push((coef, powers));
        }
        Ok(Compiled { terms })
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, pw)| pw.iter().fold(*c, |acc, &(i, e)| acc * x[i].powi(e)))
            .sum()
    }
}

struct Problem {
    residuals: Vec<Compiled>,
    jacobian: Vec<Vec<Compiled>>,
}

impl Problem {
    fn new(sys: &AlgebraicSystem, params: &Bindings) -> Result<Self> {
        let u = &sys.unknowns;
        let residuals = sys
            .polys()
            .map(|p| Compiled::new(p, params, u))
            .collect::<Result<Vec<_>>>()?;
        let jacobian = sys
            .polys()
            .map(|p| {
                u.iter()
                    .map(|&s| Compiled::new(&p.derivative(s), params, u))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Problem {
            residuals,
            jacobian,
        })
    }

    fn residual(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.residuals.len(), self.residuals.iter().map(|r| r.eval(x)))
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = x.len();
        DMatrix::from_fn(self.residuals.len(), n, |i, j| self.jacobian[i][j].eval(x))
    }

    fn levenberg_marquardt(&self, start: Vec<f64>, cfg: &NumericConfig) -> (Vec<f64>, f64) {
        let mut x = start;
        let mut r = self.residual(&x);
        let mut norm = r.norm();
        let mut lambda = 1e-3;
        for _ in 0..cfg.max_steps {
            if norm < cfg.residual_tol * 1e-3 || !norm.is_finite() {
                break;
            }
            let j = self.jacobian(&x);
            let jt = j.transpose();
            let g = &jt * &r;
            let h = &jt * &j;
            let mut improved = false;
            for _ in 0..30 {
                let mut damped = h.clone();
                for k in 0..damped.nrows() {
                    damped[(k, k)] += lambda * (h[(k, k)] + 1e-12);
                }
                let Some(step) = damped.lu().solve(&(-&g)) else {
                    lambda *= 4.0;
                    continue;
                };
                let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                let tr = self.residual(&trial);
                let tn = tr.norm();
                if tn.is_finite() && tn < norm {
                    x = trial;
                    r = tr;
                    norm = tn;
                    lambda = (lambda / 3.0).max(1e-15);
                    improved = true;
                    break;
                }
                lambda *= 4.0;
            }
            if !improved {
                break;
            }
        }
        (x, norm)
    }
}

fn sample_start(rng: &mut ChaCha8Rng, unknowns: &[Symbol], p: &PdeParams) -> Vec<f64> {
    let amp = 2.0 * (6.0 * p.d.abs() / p.b.abs().max(1e-12)).sqrt().max(1.0);
    let off = p.a.abs() / p.b.abs().max(1e-12) + 1.0;
    let spd = 3.0 * p.d.abs() + p.a * p.a / (4.0 * p.b.abs().max(1e-12)) + 1.0;
    unknowns
        .iter()
        .map(|s| {
            let scale = match s {
                Symbol::CnAmp(_) | Symbol::DnAmp(_) => amp,
                Symbol::Offset => off,
                _ => spd,
            };
            rng.random_range(-scale..scale)
        })
        .collect()
}

/// Real roots of `sys` at numeric parameters found from `seeds` random
/// starts. Trivial roots (all amplitudes zero, a continuum in `D, v`) are
/// discarded; the rest are deduplicated and sorted lexicographically.
pub fn solve_numeric(
    sys: &AlgebraicSystem,
    p: &PdeParams,
    cfg: &NumericConfig,
) -> Result<Vec<NumericRoot>> {
    if cfg.seeds < 16 {
        return Err(Error::Domain(format!("need at least 16 seeds, got {}", cfg.seeds)));
    }
    let problem = Problem::new(sys, &p.bindings())?;
    let unknowns = &sys.unknowns;
    let amp_idx: Vec<usize> = unknowns
        .iter()
        .enumerate()
        .filter(|(_, s)| matches!(s, Symbol::CnAmp(_) | Symbol::DnAmp(_)))
        .map(|(i, _)| i)
        .collect();

    let mut found: Vec<(Vec<f64>, f64)> = (0..cfg.seeds)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed.wrapping_add(i as u64));
            let start = sample_start(&mut rng, unknowns, p);
            let (x, norm) = problem.levenberg_marquardt(start, cfg);
            (norm < cfg.residual_tol).then_some((x, norm))
        })
        .filter(|(x, _)| amp_idx.iter().any(|&i| x[i].abs() > cfg.amplitude_floor))
        .collect();
    found.sort_by(|a, b| {
        a.0.iter()
            .zip(&b.0)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut roots: Vec<NumericRoot> = Vec::new();
    for (x, norm) in found {
        let near = roots.iter().any(|r| {
            r.values
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt()
                < cfg.dedup_tol
        });
        if near {
            continue;
        }
        let kind = if amp_idx.iter().all(|&i| x[i].abs() > cfg.amplitude_floor) {
            RootKind::ClosedForm
        } else {
            RootKind::OutsideClosedForms
        };
        roots.push(NumericRoot {
            values: x,
            residual_norm: norm,
            kind,
        });
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{derive_constant, AnsatzSpec};
    use crate::solver::solve_closed_form;

    fn system() -> AlgebraicSystem {
        derive_constant(&AnsatzSpec::new(1).unwrap())
    }

    fn closed_form_roots(roots: &[NumericRoot]) -> Vec<&NumericRoot> {
        roots
            .iter()
            .filter(|r| r.kind == RootKind::ClosedForm)
            .collect()
    }

    #[test]
    fn recovers_the_four_closed_form_families() {
        let sys = system();
        let p = PdeParams::new(0.0, 1.0, 1.0, 0.5).unwrap();
        let roots = solve_numeric(&sys, &p, &NumericConfig::default()).unwrap();
        let kernel = closed_form_roots(&roots);
        assert_eq!(kernel.len(), 4, "{roots:#?}");
        for fam in solve_closed_form(&p).unwrap() {
            let target = [fam.amp_cn, fam.amp_dn, fam.offset, fam.speed];
            assert!(
                kernel.iter().any(|r| r
                    .values
                    .iter()
                    .zip(&target)
                    .all(|(x, y)| (x - y).abs() < 1e-8)),
                "missing {target:?}"
            );
        }
        for r in &roots {
            assert!(r.residual_norm < 1e-10);
        }
    }

    #[test]
    fn pure_waves_are_tagged_outside() {
        let sys = system();
        let p = PdeParams::new(0.5, 1.0, 2.0, 0.6).unwrap();
        let roots = solve_numeric(&sys, &p, &NumericConfig::default()).unwrap();
        let u = &sys.unknowns;
        let outside: Vec<_> = roots
            .iter()
            .filter(|r| r.kind == RootKind::OutsideClosedForms)
            .collect();
        assert!(!outside.is_empty());
        assert_eq!(closed_form_roots(&roots).len(), 4);
        for r in outside {
            let a = r.get(u, Symbol::A).unwrap();
            let b = r.get(u, Symbol::B).unwrap();
            let v = r.get(u, Symbol::Speed).unwrap();
            let c = p.a * p.a / (4.0 * p.b);
            if a.abs() < 1e-6 {
                assert!((b * b - 6.0 * p.d / p.b).abs() < 1e-8);
                assert!((v - (p.d * (2.0 - p.m) - c)).abs() < 1e-8);
            } else {
                assert!((a * a - 6.0 * p.d * p.m / p.b).abs() < 1e-8);
                assert!((v - (p.d * (2.0 * p.m - 1.0) - c)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn opposite_signs_have_no_nontrivial_roots() {
        let sys = system();
        let p = PdeParams::new(0.0, 1.0, -1.0, 0.5).unwrap();
        let roots = solve_numeric(&sys, &p, &NumericConfig::default()).unwrap();
        assert!(roots.is_empty(), "{roots:#?}");
    }

    #[test]
    fn unit_modulus_speed() {
        let sys = system();
        let p = PdeParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let roots = solve_numeric(&sys, &p, &NumericConfig::default()).unwrap();
        assert!(!roots.is_empty());
        for r in &roots {
            let v = r.get(&sys.unknowns, Symbol::Speed).unwrap();
            assert!((v - 0.75).abs() < 1e-8, "{r:?}");
        }
    }

    #[test]
    fn too_few_seeds_rejected() {
        let cfg = NumericConfig {
            seeds: 4,
            ..NumericConfig::default()
        };
        let p = PdeParams::new(0.0, 1.0, 1.0, 0.5).unwrap();
        assert!(solve_numeric(&system(), &p, &cfg).is_err());
    }

    #[test]
    fn deterministic() {
        let p = PdeParams::new(0.3, 1.0, 1.0, 0.4).unwrap();
        let cfg = NumericConfig::default();
        let a = solve_numeric(&system(), &p, &cfg).unwrap();
        let b = solve_numeric(&system(), &p, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
