//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cnoidal_core::ansatz::{derive_constant, AnsatzSpec, PdeParams};
use cnoidal_core::elliptic::jacobi;
use cnoidal_core::sim::{pde_residual, SimConfig, Simulation};
use cnoidal_core::solver::{back_substitute_symbolic, solve_closed_form, Sign};
use cnoidal_core::symexpr::{EllipticExpr, ParamPoly, Symbol};
use cnoidal_core::waves::{hyperbolic_limit, TimeCoefficient, VelocityLaw, WaveProfile};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

const REFERENCE_SYSTEM: [&str; 7] = [
    "a + 2*b*D + a*m + 2*b*D*m",
    "a + 2*b*D",
    "2*A^2*b*B + A^2*b*B*m + b*B^3*m - 4*B*d*m + a*B*D*m + b*B*D^2*m - B*d*m^2 - B*m*v",
    "3*A^2*b + b*B^2*m - 6*d*m",
    "A^2*b + b*B^2 - d + a*D + b*D^2 + 2*b*B^2*m - 4*d*m - v",
    "A^2*b + 3*b*B^2*m - 6*d*m",
    "a*A^2 + 2*A^2*b*D + a*B^2*m + 2*b*B^2*D*m",
];

fn cnoidal(args: &[&str]) -> Result<(String, i32), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cnoidal"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    let stdout = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    Ok((stdout, out.status.code().unwrap_or(-1)))
}

fn field(line: &str, key: &str) -> Result<f64, String> {
    line.split(' ')
        .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| format!("no `{key}` in `{line}`"))?
        .parse()
        .map_err(|e| format!("`{key}`: {e}"))
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    if elapsed.as_secs_f64() < limit {
        Ok(())
    } else {
        Err(format!("took {:.2} s, limit {limit} s", elapsed.as_secs_f64()))
    }
}

fn params(a: f64, b: f64, d: f64, m: f64) -> PdeParams {
    PdeParams::new(a, b, d, m).expect("valid parameters")
}

fn multiset(polys: impl IntoIterator<Item = ParamPoly>) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for p in polys {
        *counts.entry(p.normalized().to_string()).or_insert(0) += 1;
    }
    counts
}

fn symbolic_reproduction() -> Check {
    let start = Instant::now();
    let (out, code) = cnoidal(&["derive", "--order", "1"])?;
    let elapsed = start.elapsed();
    if code != 0 {
        return Err(format!("derive exited {code}"));
    }
    let golden = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/derive_order1.txt"),
    )
    .map_err(|e| e.to_string())?;
    if out != golden {
        return Err("output differs from the golden file".into());
    }
    let derived = out
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            l.strip_suffix(" = 0")
                .ok_or_else(|| format!("malformed line `{l}`"))?
                .parse::<ParamPoly>()
                .map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    if derived.len() != 7 {
        return Err(format!("{} equations", derived.len()));
    }
    let reference = REFERENCE_SYSTEM
        .iter()
        .map(|s| s.parse::<ParamPoly>().map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    if multiset(derived) != multiset(reference) {
        return Err("equations differ from the reference system".into());
    }
    within(elapsed, 1.0)?;
    Ok(format!("7 equations match the reference system in {:.3} s", elapsed.as_secs_f64()))
}

fn exact_zero() -> Check {
    let start = Instant::now();
    let sys = derive_constant(&AnsatzSpec::new(1).map_err(|e| e.to_string())?);
    let mut checked = 0;
    for sign_cn in [Sign::Plus, Sign::Minus] {
        for sign_dn in [Sign::Plus, Sign::Minus] {
            for (j, r) in back_substitute_symbolic(sign_cn, sign_dn, &sys, &[]).iter().enumerate() {
                if !r.is_zero() {
                    return Err(format!("signs ({sign_cn},{sign_dn}) equation {}: {r}", j + 1));
                }
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, 1.0)?;
    Ok(format!("{checked} residuals are the zero polynomial in {:.3} s", elapsed.as_secs_f64()))
}

fn numeric_residual() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let a = rng.random_range(-2.0..2.0);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let b = sign * rng.random_range(0.2..2.0);
        let d = sign * rng.random_range(0.2..2.0);
        let m = if i == 0 { 1.0 - 1e-6 } else { 1.0 - rng.random_range(0.0..1.0f64) };
        let fam = solve_closed_form(&params(a, b, d, m)).map_err(|e| e.to_string())?[i % 4];
        let r = pde_residual(&WaveProfile::new(fam), 256, 1).map_err(|e| e.to_string())?;
        if r.is_nan() || r >= 1e-8 {
            return Err(format!("a={a} b={b} d={d} m={m}: residual {r:e}"));
        }
        worst = worst.max(r);
    }
    let elapsed = start.elapsed();
    within(elapsed, 5.0)?;
    Ok(format!("20 random families, max residual {worst:.2e} in {:.3} s", elapsed.as_secs_f64()))
}

fn hyperbolic() -> Check {
    let families = solve_closed_form(&params(0.0, 1.0, 1.0, 1.0)).map_err(|e| e.to_string())?;
    let fam = families
        .iter()
        .find(|f| f.amp_cn > 0.0 && f.amp_dn > 0.0)
        .ok_or("no positive family")?;
    let sech = hyperbolic_limit(fam).map_err(|e| e.to_string())?;
    let profile = WaveProfile::new(*fam);
    let mut worst: f64 = 0.0;
    for t in [0.0, 0.5, 2.0] {
        for i in 0..=2000 {
            let x = -10.0 + 20.0 * i as f64 / 2000.0;
            let exact = 6f64.sqrt() / (x - t).cosh();
            let u = profile.evaluate(x, t).map_err(|e| e.to_string())?;
            worst = worst.max((u - exact).abs()).max((sech.evaluate(x, t) - exact).abs());
        }
    }
    if worst < 1e-12 {
        Ok(format!("max deviation from sqrt(6) sech(x - t) is {worst:.1e}"))
    } else {
        Err(format!("max deviation {worst:e}"))
    }
}

fn velocity_by_simulation() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (out, code) = cnoidal(&[
        "simulate", "-a", "0", "-b", "1", "-d", "1", "-m", "0.5", "--duration", "1",
        "--out", dir.path().to_str().ok_or("bad temp path")?,
    ])?;
    let v = field(&out, "v_measured")?;
    let mass = field(&out, "mass_drift")?;
    let quadratic = field(&out, "quadratic_drift")?;
    let summary = format!("v={v:.12} mass_drift={mass:.1e} quadratic_drift={quadratic:.1e}");
    if code == 0 && (v - 0.75).abs() < 1e-3 && mass < 1e-9 && quadratic < 1e-8 {
        Ok(summary)
    } else {
        Err(format!("{summary} exit={code}"))
    }
}

fn taxonomy() -> Check {
    let mut labels = Vec::new();
    for (a, b, d, expected_offset, regime) in [
        (1.0, 1.0, 1.0, "D<0", "a,b same sign"),
        (-1.0, -1.0, -1.0, "D<0", "a,b same sign"),
        (1.0, -1.0, -1.0, "D>0", "a,b different sign"),
        (-1.0, 1.0, 1.0, "D>0", "a,b different sign"),
    ] {
        let families = solve_closed_form(&params(a, b, d, 0.5)).map_err(|e| e.to_string())?;
        if families.len() != 4 {
            return Err(format!("a={a} b={b}: {} families", families.len()));
        }
        let mut signs: Vec<(Sign, Sign)> = families.iter().map(|f| (f.sign_cn, f.sign_dn)).collect();
        signs.sort();
        signs.dedup();
        if signs.len() != 4 {
            return Err(format!("a={a} b={b}: repeated sign pair"));
        }
        let mut found: Vec<&str> = families.iter().map(|f| f.class().label()).collect();
        found.sort();
        let want = [
            format!("AB<0,{expected_offset}"),
            format!("AB<0,{expected_offset}"),
            format!("AB>0,{expected_offset}"),
            format!("AB>0,{expected_offset}"),
        ];
        if found != want || families.iter().any(|f| f.class().regime() != regime) {
            return Err(format!("a={a} b={b}: labels {found:?}"));
        }
        labels.extend(found);
    }
    labels.sort();
    labels.dedup();
    Ok(format!("four families per regime, labels {}", labels.join(" ")))
}

fn time_dependent_law() -> Check {
    let c = solve_closed_form(&params(0.0, 1.0, 1.0, 0.5)).map_err(|e| e.to_string())?[0].speed;
    let err = |e: cnoidal_core::Error| e.to_string();
    let unit = VelocityLaw::time_dependent(c, TimeCoefficient::Unit, c, 1.0).map_err(err)?;
    let exp = VelocityLaw::time_dependent(c, TimeCoefficient::Exponential { rate: 1.0 }, c, 1.0)
        .map_err(err)?;
    let (mut unit_dev, mut constraint, mut printed): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..50 {
        let t = 1.0 + 4.0 * i as f64 / 49.0;
        unit_dev = unit_dev.max((unit.velocity_at(t).map_err(err)? - c).abs());
        constraint = constraint.max(exp.constraint_residual(t).map_err(err)?.abs());
        printed = printed.max(exp.kernel_form_residual(t).map_err(err)?.abs());
    }
    let summary = format!(
        "unit deviation {unit_dev:.1e}, exp constraint {constraint:.1e}, printed form residual {printed:.3e} (reported)"
    );
    if unit_dev < 1e-14 && constraint < 1e-7 && printed.is_finite() {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn elliptic_identities(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for _ in 0..2000 {
        let xi = rng.random_range(-10.0..10.0);
        let m = rng.random_range(0.0..0.99);
        let t = jacobi(xi, m).map_err(|e| e.to_string())?;
        worst = worst
            .max((t.sn * t.sn + t.cn * t.cn - 1.0).abs())
            .max((t.dn * t.dn + m * t.sn * t.sn - 1.0).abs());
    }
    if worst < 1e-12 {
        Ok(worst)
    } else {
        Err(format!("identity defect {worst:e}"))
    }
}

fn random_expr(rng: &mut ChaCha8Rng) -> EllipticExpr {
    let symbols = [Symbol::A, Symbol::B, Symbol::Offset, Symbol::Speed];
    let atoms = [EllipticExpr::sn(), EllipticExpr::cn(), EllipticExpr::dn()];
    let mut e = EllipticExpr::constant(ParamPoly::var(symbols[rng.random_range(0..4)]));
    for _ in 0..3 {
        let mut term = EllipticExpr::constant(ParamPoly::integer(rng.random_range(-3..=3)));
        for _ in 0..rng.random_range(1..=3) {
            term = &term * &atoms[rng.random_range(0..3)];
        }
        e = &e + &term.scale(&ParamPoly::var(symbols[rng.random_range(0..4)]));
    }
    e
}

fn fourth_order_factor() -> Result<f64, String> {
    let fam = solve_closed_form(&params(1.0, 1.0, 1.0, 0.5)).map_err(|e| e.to_string())?[0];
    let profile = WaveProfile::new(fam);
    let error_at = |dt: f64| -> Result<f64, String> {
        let sim = Simulation::new(SimConfig {
            n: 64,
            dt,
            ..SimConfig::new(fam.params)
        })
        .map_err(|e| e.to_string())?;
        let initial = sim.init_from_profile(&profile).map_err(|e| e.to_string())?;
        let end = sim
            .run(initial, usize::MAX)
            .map_err(|e| e.to_string())?
            .pop()
            .ok_or("empty trajectory")?;
        let mut worst: f64 = 0.0;
        for (x, u) in sim.grid().points().zip(sim.values(&end)) {
            worst = worst.max((u - profile.evaluate(x, 1.0).map_err(|e| e.to_string())?).abs());
        }
        Ok(worst)
    };
    Ok(error_at(0.0025)? / error_at(0.00125)?)
}

fn property_suites() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let identity = elliptic_identities(&mut rng)?;
    for _ in 0..100 {
        let (x, y) = (random_expr(&mut rng), random_expr(&mut rng));
        let lhs = (&x * &y).differentiate();
        let rhs = &(&x.differentiate() * &y) + &(&x * &y.differentiate());
        if lhs != rhs {
            return Err(format!("product rule fails for ({x}) * ({y})"));
        }
    }
    for _ in 0..200 {
        let a = rng.random_range(-3.0..3.0);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let b = sign * rng.random_range(0.1..3.0);
        let d = sign * rng.random_range(0.1..3.0);
        let m = rng.random_range(0.01..1.0);
        let plus = solve_closed_form(&params(a, b, d, m)).map_err(|e| e.to_string())?;
        let minus = solve_closed_form(&params(-a, b, d, m)).map_err(|e| e.to_string())?;
        for (f, g) in plus.iter().zip(&minus) {
            if f.speed != g.speed || f.offset != -g.offset || f.amp_cn != g.amp_cn || f.amp_dn != g.amp_dn {
                return Err(format!("sign symmetry fails at a={a} b={b} d={d} m={m}"));
            }
        }
    }
    let ratio = fourth_order_factor()?;
    if !(12.0..=20.0).contains(&ratio) {
        return Err(format!("temporal convergence factor {ratio:.2}"));
    }
    Ok(format!(
        "identity defect {identity:.1e}, product rule on 100 pairs, symmetry on 200 sets, convergence factor {ratio:.2}"
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("symbolic reproduction", symbolic_reproduction),
        ("exact-zero verification", exact_zero),
        ("numeric residual", numeric_residual),
        ("hyperbolic limit", hyperbolic),
        ("velocity by simulation", velocity_by_simulation),
        ("four-class taxonomy", taxonomy),
        ("time-dependent law", time_dependent_law),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
