//! The simulate and sweep subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use cnoidal_core::sim::{measure_velocity, positions};
use cnoidal_core::solver::solve_closed_form;
use cnoidal_core::{SimState, Simulation, WaveProfile};

use crate::commands::Outcome;
use crate::config::RunConfig;
use crate::error::{CliError, OK, VERIFY_FAILED};
use crate::format::{table, Record};

pub const SPEED_TOL: f64 = 1e-3;
pub const MASS_TOL: f64 = 1e-9;
pub const QUADRATIC_TOL: f64 = 1e-8;

/// `run-` followed by the first 16 hex digits of the SHA-256 of the config dump.
pub fn run_id(cfg: &RunConfig) -> String {
    let digest = Sha256::digest(cfg.to_text().as_bytes());
    let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    format!("run-{hex}")
}

fn default_out(cfg: &RunConfig) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from("runs"))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(CliError::io)
}

fn relative(delta: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        delta.abs()
    } else {
        (delta / reference).abs()
    }
}

/// Runs one simulation, writing its directory, and returns the summary record.
pub fn simulate_one(cfg: &RunConfig) -> Result<(Record, u8), CliError> {
    let sim_cfg = cfg.sim_config()?;
    let params = sim_cfg.params;
    let family = solve_closed_form(&params)?[cfg.family_index()?];
    let profile = if cfg.f.is_unit() {
        WaveProfile::new(family)
    } else {
        WaveProfile::with_coefficient(
            family,
            cfg.f.clone(),
            cfg.v0.unwrap_or(family.speed),
            cfg.t_ref,
        )?
    };
    let sim = Simulation::new(sim_cfg)?;
    let initial = sim.init_from_profile(&profile)?;
    let trajectory = sim.run(initial, cfg.snapshot_every)?;

    let displacement = positions(&trajectory, sim.grid())?;
    let x_start = profile.law.position(cfg.t_start())?;
    let mut rows = Vec::with_capacity(trajectory.len());
    let mut speed_error: f64 = 0.0;
    let v_measured;
    if cfg.f.is_unit() {
        let fit = measure_velocity(&trajectory, sim.grid())?;
        v_measured = fit.speed;
        speed_error = relative(fit.speed - family.speed, family.speed);
        let mut previous = displacement[0];
        for (i, &(t, x)) in displacement.iter().enumerate() {
            let secant = if i == 0 {
                fit.speed
            } else {
                (x - previous.1) / (t - previous.0)
            };
            previous = (t, x);
            rows.push(vec![t, secant, family.speed]);
        }
    } else {
        for &(t, x) in &displacement {
            let measured = (x_start + x) / t;
            let predicted = profile.law.velocity_at(t)?;
            speed_error = speed_error.max(relative(measured - predicted, predicted));
            rows.push(vec![t, measured, predicted]);
        }
        v_measured = rows.last().map(|r| r[1]).unwrap_or(f64::NAN);
    }

    let first = &trajectory[0];
    let last: &SimState = trajectory.last().unwrap_or(first);
    let length = sim.grid().length;
    let mass_scale = first.mass.abs().max((length * first.quadratic).sqrt());
    let mass_drift = relative(last.mass - first.mass, mass_scale);
    let quadratic_drift = relative(last.quadratic - first.quadratic, first.quadratic);
    let pass = speed_error < SPEED_TOL && mass_drift < MASS_TOL && quadratic_drift < QUADRATIC_TOL;
    let v_predicted = profile.law.velocity_at(last.t)?;

    let id = run_id(cfg);
    let dir = default_out(cfg).join(&id);
    fs::create_dir_all(&dir).map_err(CliError::io)?;
    write(&dir.join("config.txt"), &cfg.to_text())?;
    write(
        &dir.join("velocity.csv"),
        &table(&["t", "v_measured", "v_predicted"], rows),
    )?;
    let xs: Vec<f64> = sim.grid().points().collect();
    for (i, state) in trajectory.iter().enumerate() {
        let u = sim.values(state);
        let body = table(&["x", "u"], xs.iter().zip(&u).map(|(&x, &u)| vec![x, u]));
        write(&dir.join(format!("snapshot-{i:05}.csv")), &body)?;
    }
    let record = Record::new()
        .text("run", &id)
        .text("family", cfg.family)
        .text("class", family.class().label())
        .num("a", params.a)
        .num("b", params.b)
        .num("d", params.d)
        .num("m", params.m)
        .text("f", &cfg.f)
        .text("n", cfg.n)
        .num("dt", sim.dt())
        .text("steps", sim.steps())
        .text("snapshots", trajectory.len())
        .num("t_end", last.t)
        .num("v_predicted", v_predicted)
        .num("v_measured", v_measured)
        .num("speed_error", speed_error)
        .num("mass_drift", mass_drift)
        .num("quadratic_drift", quadratic_drift)
        .text("status", if pass { "PASS" } else { "FAIL" });
    write(&dir.join("summary.txt"), &format!("{}\n", record.to_line()))?;
    let code = if pass { OK } else { VERIFY_FAILED };
    Ok((record.text("dir", dir.display()), code))
}

pub fn simulate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (record, code) = simulate_one(cfg)?;
    Ok(Outcome {
        stdout: format!("{}\n", record.to_line()),
        code,
    })
}

/// Values of one `--vary` axis: `key=v1,v2,...` or `key=start:stop:count`.
pub fn parse_axis(spec: &str) -> Result<(String, Vec<String>), CliError> {
    let (key, values) = spec
        .split_once('=')
        .ok_or_else(|| CliError::usage(format!("--vary `{spec}` must look like m=0.1,0.5")))?;
    let parts: Vec<&str> = values.split(':').collect();
    let list = match parts.as_slice() {
        [start, stop, count] => {
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::usage(format!("bad number `{s}` in --vary")))
            };
            let (a, b) = (num(start)?, num(stop)?);
            let n: usize = count
                .trim()
                .parse()
                .map_err(|_| CliError::usage(format!("bad count `{count}` in --vary")))?;
            if n == 0 {
                return Err(CliError::usage("--vary count must be positive"));
            }
            (0..n)
                .map(|i| {
                    let x = if n == 1 {
                        a
                    } else {
                        let s = i as f64 / (n - 1) as f64;
                        a * (1.0 - s) + b * s
                    };
                    x.to_string()
                })
                .collect()
        }
        [_] => values.split(',').map(|s| s.trim().to_string()).collect(),
        _ => return Err(CliError::usage(format!("cannot parse --vary `{spec}`"))),
    };
    Ok((key.trim().to_string(), list))
}

/// Cartesian product of the axes applied to `base`, in row-major order.
pub fn sweep_points(base: &RunConfig, axes: &[String]) -> Result<Vec<RunConfig>, CliError> {
    let mut points = vec![base.clone()];
    for axis in axes {
        let (key, values) = parse_axis(axis)?;
        let mut next = Vec::with_capacity(points.len() * values.len());
        for p in &points {
            for v in &values {
                let mut q = p.clone();
                q.set(&key, v)?;
                next.push(q);
            }
        }
        points = next;
    }
    Ok(points)
}

pub fn sweep(base: &RunConfig, axes: &[String], jobs: Option<usize>) -> Result<Outcome, CliError> {
    let points = sweep_points(base, axes)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::usage(format!("cannot start workers: {e}")))?;
    let results: Vec<Result<(Record, u8), CliError>> =
        pool.install(|| points.par_iter().map(simulate_one).collect());
    let mut out = String::new();
    let mut code = OK;
    for (p, r) in points.iter().zip(results) {
        match r {
            Ok((record, c)) => {
                out.push_str(&record.to_line());
                out.push('\n');
                code = code.max(c);
            }
            Err(e) => {
                let record = Record::new()
                    .text("run", run_id(p))
                    .num("a", p.a)
                    .num("m", p.m)
                    .text("status", "ERROR")
                    .text("exit", e.code)
                    .text("error", e.message.replace(' ', "_"));
                out.push_str(&record.to_line());
                out.push('\n');
                code = code.max(e.code);
            }
        }
    }
    Ok(Outcome { stdout: out, code })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axes() {
        let (k, v) = parse_axis("m=0.1:0.5:3").unwrap();
        assert_eq!(k, "m");
        assert_eq!(v, ["0.1", "0.3", "0.5"]);
        let (_, v) = parse_axis("a=0,1").unwrap();
        assert_eq!(v, ["0", "1"]);
        assert!(parse_axis("m").is_err());
        let pts = sweep_points(&RunConfig::default(), &["a=0,1".into(), "m=0.3,0.6".into()]).unwrap();
        let pairs: Vec<(f64, f64)> = pts.iter().map(|p| (p.a, p.m)).collect();
        assert_eq!(pairs, [(0.0, 0.3), (0.0, 0.6), (1.0, 0.3), (1.0, 0.6)]);
        assert!(sweep_points(&RunConfig::default(), &["bogus=1".into()]).is_err());
    }

    #[test]
    fn run_ids_depend_on_config_only() {
        let a = RunConfig::default();
        let b = RunConfig {
            out: Some("elsewhere".into()),
            ..RunConfig::default()
        };
        assert_eq!(run_id(&a), run_id(&b));
        let c = RunConfig {
            m: 0.4,
            ..RunConfig::default()
        };
        assert_ne!(run_id(&a), run_id(&c));
        assert_eq!(run_id(&a).len(), 20);
    }
}
