//! Resolved run configuration: defaults, then a `key = value` file, then flags.

use std::path::PathBuf;

use cnoidal_core::sim::Domain;
use cnoidal_core::symexpr::Symbol;
use cnoidal_core::{AnsatzSpec, PdeParams, SimConfig, TimeCoefficient};

use crate::error::CliError;
use crate::format::{float, Format};

/// Keys accepted in a config file, in dump order.
pub const KEYS: &[&str] = &[
    "a",
    "b",
    "d",
    "m",
    "order",
    "timedep",
    "f",
    "v0",
    "t_ref",
    "n",
    "periods",
    "window",
    "dt",
    "duration",
    "dealias",
    "family",
    "snapshot_every",
    "perturb",
    "seeds",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub m: f64,
    pub order: u16,
    pub timedep: bool,
    pub f: TimeCoefficient,
    /// Initial speed of the time-dependent law; `None` means the base speed `C`.
    pub v0: Option<f64>,
    pub t_ref: f64,
    pub n: usize,
    pub periods: u32,
    /// Window length for `m = 1` runs.
    pub window: Option<f64>,
    pub dt: f64,
    pub duration: f64,
    pub dealias: bool,
    /// Family index 1..=4 in the order `(+,+), (+,−), (−,+), (−,−)`.
    pub family: usize,
    pub snapshot_every: usize,
    pub perturb: Vec<(Symbol, f64)>,
    pub seeds: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            a: 0.0,
            b: 1.0,
            d: 1.0,
            m: 0.5,
            order: 1,
            timedep: false,
            f: TimeCoefficient::Unit,
            v0: None,
            t_ref: 1.0,
            n: 256,
            periods: 1,
            window: None,
            dt: 1e-4,
            duration: 1.0,
            dealias: true,
            family: 1,
            snapshot_every: 100,
            perturb: Vec::new(),
            seeds: 64,
            out: None,
            format: Format::Record,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::usage(format!("invalid value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(CliError::usage(format!("invalid boolean `{value}` for `{key}`"))),
    }
}

/// `v=+0.1` style shift of one closed-form value.
pub fn parse_perturbation(s: &str) -> Result<(Symbol, f64), CliError> {
    let (sym, delta) = s
        .split_once('=')
        .ok_or_else(|| CliError::usage(format!("perturbation `{s}` must look like v=+0.1")))?;
    let symbol: Symbol = sym
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("unknown symbol `{sym}` in perturbation")))?;
    if !matches!(symbol, Symbol::Speed | Symbol::Offset) && symbol != Symbol::A && symbol != Symbol::B {
        return Err(CliError::usage(format!(
            "perturbation symbol must be one of A, B, D, v; got `{sym}`"
        )));
    }
    let delta: f64 = parse("perturb", delta.trim().trim_start_matches('+'))?;
    Ok((symbol, delta))
}

fn optional(value: &str) -> Option<&str> {
    (value != "none").then_some(value)
}

impl RunConfig {
    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        match key {
            "a" => self.a = parse(key, value)?,
            "b" => self.b = parse(key, value)?,
            "d" => self.d = parse(key, value)?,
            "m" => self.m = parse(key, value)?,
            "order" => self.order = parse(key, value)?,
            "timedep" => self.timedep = parse_bool(key, value)?,
            "f" => {
                self.f = value
                    .parse()
                    .map_err(|e| CliError::usage(format!("invalid f descriptor: {e}")))?
            }
            "v0" => self.v0 = optional(value).map(|v| parse(key, v)).transpose()?,
            "t_ref" => self.t_ref = parse(key, value)?,
            "n" => self.n = parse(key, value)?,
            "periods" => self.periods = parse(key, value)?,
            "window" => self.window = optional(value).map(|v| parse(key, v)).transpose()?,
            "dt" => self.dt = parse(key, value)?,
            "duration" | "T" => self.duration = parse(key, value)?,
            "dealias" => self.dealias = parse_bool(key, value)?,
            "family" => self.family = parse(key, value)?,
            "snapshot_every" => self.snapshot_every = parse(key, value)?,
            "perturb" => {
                self.perturb = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(parse_perturbation)
                    .collect::<Result<_, _>>()?
            }
            "seeds" => self.seeds = parse(key, value)?,
            _ => return Err(CliError::usage(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` text; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::usage(format!("config line {}: expected key = value", i + 1))
            })?;
            self.set(key.trim(), value)
                .map_err(|e| CliError::usage(format!("config line {}: {}", i + 1, e.message)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &std::path::Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    /// Canonical dump of every key; reading it back reproduces the config.
    pub fn to_text(&self) -> String {
        let opt = |v: Option<f64>| v.map(float).unwrap_or_else(|| "none".into());
        let perturb: Vec<String> = self
            .perturb
            .iter()
            .map(|(s, d)| format!("{s}={}", float(*d)))
            .collect();
        let values = [
            float(self.a),
            float(self.b),
            float(self.d),
            float(self.m),
            self.order.to_string(),
            self.timedep.to_string(),
            self.f.to_string(),
            opt(self.v0),
            float(self.t_ref),
            self.n.to_string(),
            self.periods.to_string(),
            opt(self.window),
            float(self.dt),
            float(self.duration),
            self.dealias.to_string(),
            self.family.to_string(),
            self.snapshot_every.to_string(),
            perturb.join(","),
            self.seeds.to_string(),
        ];
        KEYS.iter()
            .zip(values)
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn params(&self) -> Result<PdeParams, CliError> {
        PdeParams::new(self.a, self.b, self.d, self.m).map_err(CliError::usage_from)
    }

    pub fn ansatz(&self) -> Result<AnsatzSpec, CliError> {
        AnsatzSpec::new(self.order).map_err(CliError::usage_from)
    }

    pub fn family_index(&self) -> Result<usize, CliError> {
        if (1..=4).contains(&self.family) {
            Ok(self.family - 1)
        } else {
            Err(CliError::usage(format!(
                "family must be 1..4, got {}",
                self.family
            )))
        }
    }

    /// Start time of a run: `t_ref` for a time-dependent coefficient, else 0.
    pub fn t_start(&self) -> f64 {
        if self.f.is_unit() {
            0.0
        } else {
            self.t_ref
        }
    }

    pub fn sim_config(&self) -> Result<SimConfig, CliError> {
        let params = self.params()?;
        let domain = match (self.m == 1.0, self.window) {
            (true, Some(length)) => Domain::Window { length },
            (true, None) => {
                return Err(CliError::usage(
                    "m = 1 is the non-periodic limit; use --m 0.999999 or give --window <length>"
                        .to_string(),
                ))
            }
            (false, _) => Domain::Periodic {
                periods: self.periods,
            },
        };
        let cfg = SimConfig {
            n: self.n,
            domain,
            dt: self.dt,
            duration: self.duration,
            t_start: self.t_start(),
            dealias: self.dealias,
            params,
            coef: self.f.clone(),
        };
        cfg.validate().map_err(CliError::usage_from)?;
        Ok(cfg)
    }
}
