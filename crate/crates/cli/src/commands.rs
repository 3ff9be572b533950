//! The derive, solve and verify subcommands.

use cnoidal_core::ansatz::{derive_constant, derive_timedep};
use cnoidal_core::solver::{
    back_substitute_exact, numeric_residuals, solve_closed_form, solve_numeric, NumericConfig,
    Perturbation, RootKind,
};
use cnoidal_core::symexpr::{rational_from_f64, Symbol};
use cnoidal_core::{SolutionFamily, VelocityLaw};

use crate::config::RunConfig;
use crate::error::{CliError, OK, VERIFY_FAILED};
use crate::format::{render, Format, Record};

/// Constraint-residual bound for the velocity law.
pub const LAW_TOL: f64 = 1e-7;

/// Sample times for the velocity-law report.
pub const LAW_SAMPLES: usize = 50;

/// Output of one subcommand: text for stdout and an exit code.
pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

pub fn derive(cfg: &RunConfig, raw: bool) -> Result<Outcome, CliError> {
    let spec = cfg.ansatz()?;
    let sys = if cfg.timedep {
        derive_timedep(&spec)
    } else {
        derive_constant(&spec)
    };
    let unknowns: Vec<String> = sys.unknowns.iter().map(|s| s.to_string()).collect();
    let mut out = format!(
        "# order {} ({}), {} equations in {}\n",
        spec.order(),
        if cfg.timedep { "time-dependent" } else { "constant" },
        sys.len(),
        unknowns.join(", ")
    );
    if cfg.timedep {
        out.push_str("# h = 1/f(t), w = v + t*v_t\n");
    }
    out.push_str(&sys.show(!raw));
    Ok(Outcome {
        stdout: out,
        code: OK,
    })
}

fn family_record(i: usize, f: &SolutionFamily) -> Record {
    let class = f.class();
    Record::new()
        .text("family", i + 1)
        .text("class", class.label())
        .text("regime", class.regime().replace(" = ", "=").replace(' ', "_"))
        .text("sign_cn", f.sign_cn)
        .text("sign_dn", f.sign_dn)
        .num("A", f.amp_cn)
        .num("B", f.amp_dn)
        .num("D", f.offset)
        .num("v", f.speed)
}

pub fn solve(cfg: &RunConfig, numeric: bool) -> Result<Outcome, CliError> {
    let params = cfg.params()?;
    let families = solve_closed_form(&params)?;
    let records: Vec<Record> = families
        .iter()
        .enumerate()
        .map(|(i, f)| family_record(i, f))
        .collect();
    let mut out = render(&records, cfg.format);
    if numeric {
        let sys = derive_constant(&cfg.ansatz()?);
        let ncfg = NumericConfig {
            seeds: cfg.seeds,
            ..NumericConfig::default()
        };
        let roots = solve_numeric(&sys, &params, &ncfg)?;
        let records: Vec<Record> = roots
            .iter()
            .map(|r| {
                let kind = match r.kind {
                    RootKind::ClosedForm => "closed_form",
                    RootKind::OutsideClosedForms => "outside_closed_forms",
                };
                let mut rec = Record::new().text("root", kind);
                for (s, v) in sys.unknowns.iter().zip(&r.values) {
                    rec = rec.num(&s.to_string(), *v);
                }
                rec.num("residual", r.residual_norm)
            })
            .collect();
        out.push_str(&render(&records, cfg.format));
    }
    Ok(Outcome {
        stdout: out,
        code: OK,
    })
}

fn shifted(f: &SolutionFamily, perturb: &[(Symbol, f64)]) -> SolutionFamily {
    let mut g = *f;
    for &(s, delta) in perturb {
        match s {
            Symbol::Speed => g.speed += delta,
            Symbol::Offset => g.offset += delta,
            s if s == Symbol::A => g.amp_cn += delta,
            s if s == Symbol::B => g.amp_dn += delta,
            _ => {}
        }
    }
    g
}

fn law_report(cfg: &RunConfig, base: f64) -> Result<(Vec<Record>, bool), CliError> {
    let law = VelocityLaw::time_dependent(base, cfg.f.clone(), cfg.v0.unwrap_or(base), cfg.t_ref)?;
    let times: Vec<f64> = (0..LAW_SAMPLES)
        .map(|i| cfg.t_ref + 4.0 * i as f64 / (LAW_SAMPLES - 1) as f64)
        .collect();
    let mut constraint: f64 = 0.0;
    let mut kernel: f64 = 0.0;
    for &t in &times {
        constraint = constraint.max(law.constraint_residual(t)?.abs());
        kernel = kernel.max(law.kernel_form_residual(t)?.abs());
    }
    let ok = constraint < LAW_TOL;
    let rec = |form: &str, r: f64, status: &str| {
        Record::new()
            .text("law", form)
            .text("f", &cfg.f)
            .num("C", base)
            .num("v0", cfg.v0.unwrap_or(base))
            .num("t_ref", cfg.t_ref)
            .text("samples", LAW_SAMPLES)
            .num("max_residual", r)
            .text("status", status)
    };
    Ok((
        vec![
            rec("constraint", constraint, if ok { "PASS" } else { "FAIL" }),
            rec("kernel_form", kernel, "REPORTED"),
        ],
        ok,
    ))
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let params = cfg.params()?;
    let families = solve_closed_form(&params)?;
    let spec = cfg.ansatz()?;
    if spec.order() != 1 {
        return Err(CliError::usage("closed forms exist for order 1 only"));
    }
    let sys = if cfg.timedep {
        derive_timedep(&spec)
    } else {
        derive_constant(&spec)
    };
    let perturbations = cfg
        .perturb
        .iter()
        .map(|&(symbol, d)| {
            Ok(Perturbation {
                symbol,
                delta: rational_from_f64(d)?,
            })
        })
        .collect::<Result<Vec<_>, cnoidal_core::Error>>()?;
    let h = if cfg.timedep { cfg.f.inverse(cfg.t_ref)? } else { 1.0 };
    let mut records = Vec::new();
    let mut all_pass = true;
    for (i, fam) in families.iter().enumerate() {
        let symbolic = back_substitute_exact(fam, &sys, &perturbations)?;
        let numeric = numeric_residuals(&shifted(fam, &cfg.perturb), &sys, h)?;
        let scale = 1.0 + fam.amplitude_bound().powi(3) + fam.speed.abs();
        let numeric_max = numeric.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        let failing: Vec<usize> = (0..symbolic.len())
            .filter(|&j| !symbolic[j].is_zero())
            .collect();
        let pass = failing.is_empty() && numeric_max < 1e-12 * scale;
        all_pass &= pass;
        for &j in &failing {
            let involves: Vec<String> = sys
                .unknowns
                .iter()
                .filter(|&&u| sys.equations[j].poly.contains(u))
                .map(|u| u.to_string())
                .collect();
            records.push(
                Record::new()
                    .text("status", "FAIL")
                    .text("family", i + 1)
                    .text("equation", j + 1)
                    .text("source", sys.equations[j].source)
                    .text("involves", involves.join(","))
                    .num("numeric", numeric[j])
                    .text("residual", symbolic[j].to_string().replace(' ', "")),
            );
        }
        records.push(
            Record::new()
                .text("status", if pass { "PASS" } else { "FAIL" })
                .text("family", i + 1)
                .text("class", fam.class().label())
                .text("equations", sys.len())
                .text("symbolic_nonzero", failing.len())
                .num("numeric_max", numeric_max),
        );
    }
    let mut out = render(&records, Format::Record);
    if cfg.timedep {
        let (law, ok) = law_report(cfg, families[0].speed)?;
        all_pass &= ok;
        out.push_str(&render(&law, Format::Record));
    }
    let verdict = if all_pass { "PASS" } else { "FAIL" };
    out.push_str(&format!("verdict={verdict}\n"));
    Ok(Outcome {
        stdout: out,
        code: if all_pass { OK } else { VERIFY_FAILED },
    })
}
