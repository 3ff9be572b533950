//! Command-line flags. Every flag maps onto a config key, so flags and
//! config files share one parser.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "cnoidal",
    version,
    about = "Jacobi-elliptic traveling waves of the combined KdV-mKdV equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the coefficient-matching system for an sn/cn/dn ansatz
    Derive(DeriveArgs),
    /// List the closed-form solution families and their classes
    Solve(SolveArgs),
    /// Back-substitute the closed forms exactly and numerically
    Verify(VerifyArgs),
    /// Integrate the PDE from a solution family and measure its speed
    Simulate(SimulateArgs),
    /// Run simulations over a parameter grid in parallel
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Quadratic nonlinearity coefficient a
    #[arg(short = 'a', long = "a", allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Cubic nonlinearity coefficient b
    #[arg(short = 'b', long = "b", allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Dispersion coefficient d
    #[arg(short = 'd', long = "d", allow_negative_numbers = true)]
    pub d: Option<f64>,
    /// Elliptic parameter m in [0, 1]
    #[arg(short = 'm', long = "m", allow_negative_numbers = true)]
    pub m: Option<f64>,
    /// Flat `key = value` config file; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format: record or csv
    #[arg(long)]
    pub format: Option<String>,
}

impl Common {
    pub fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut v = Vec::new();
        push(&mut v, "a", self.a);
        push(&mut v, "b", self.b);
        push(&mut v, "d", self.d);
        push(&mut v, "m", self.m);
        v
    }
}

fn push<T: ToString>(v: &mut Vec<(&'static str, String)>, key: &'static str, value: Option<T>) {
    if let Some(x) = value {
        v.push((key, x.to_string()));
    }
}

fn flag(v: &mut Vec<(&'static str, String)>, key: &'static str, set: bool, value: bool) {
    if set {
        v.push((key, value.to_string()));
    }
}

#[derive(Debug, Args)]
pub struct DeriveArgs {
    #[command(flatten)]
    pub common: Common,
    /// Ansatz order n (n = 1 is A cn + B dn + D)
    #[arg(long)]
    pub order: Option<u16>,
    /// Use the f(t) u_t equation with time-dependent coefficients
    #[arg(long)]
    pub timedep: bool,
    /// Print coefficients without normalization
    #[arg(long)]
    pub raw: bool,
}

impl DeriveArgs {
    pub fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut v = self.common.overrides();
        push(&mut v, "order", self.order);
        flag(&mut v, "timedep", self.timedep, true);
        v
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    /// Also run the multi-start numeric root search
    #[arg(long)]
    pub numeric: bool,
    /// Number of numeric starting points
    #[arg(long)]
    pub seeds: Option<usize>,
}

impl SolveArgs {
    pub fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut v = self.common.overrides();
        push(&mut v, "seeds", self.seeds);
        v
    }
}

#[derive(Debug, Args)]
pub struct LawFlags {
    /// Time coefficient f(t): unit, exp:<r>, poly:<c0>,<c1>,..., table:<t>:<f>,...
    #[arg(long)]
    pub f: Option<String>,
    /// Initial speed of the time-dependent law (default: the base speed)
    #[arg(long, allow_negative_numbers = true)]
    pub v0: Option<f64>,
    /// Reference time of the time-dependent law
    #[arg(long = "t-ref")]
    pub t_ref: Option<f64>,
}

impl LawFlags {
    fn extend(&self, v: &mut Vec<(&'static str, String)>) {
        push(v, "f", self.f.clone());
        push(v, "v0", self.v0);
        push(v, "t_ref", self.t_ref);
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub law: LawFlags,
    /// Verify against the time-dependent system and report the velocity law
    #[arg(long)]
    pub timedep: bool,
    /// Shift a closed-form value before substitution, e.g. v=+0.1
    #[arg(long, allow_hyphen_values = true)]
    pub perturb: Vec<String>,
}

impl VerifyArgs {
    pub fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut v = self.common.overrides();
        self.law.extend(&mut v);
        flag(&mut v, "timedep", self.timedep, true);
        if !self.perturb.is_empty() {
            v.push(("perturb", self.perturb.join(",")));
        }
        v
    }
}

#[derive(Debug, Args)]
pub struct SimFlags {
    #[command(flatten)]
    pub law: LawFlags,
    /// Grid points (power of two, at least 64)
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of 4K(m) periods in the domain
    #[arg(long)]
    pub periods: Option<u32>,
    /// Window length for m = 1 runs
    #[arg(long)]
    pub window: Option<f64>,
    /// Time step
    #[arg(long)]
    pub dt: Option<f64>,
    /// Integration time
    #[arg(long, short = 'T')]
    pub duration: Option<f64>,
    /// Evaluate the nonlinearity without zero-padding
    #[arg(long)]
    pub no_dealias: bool,
    /// Solution family 1..4
    #[arg(long)]
    pub family: Option<usize>,
    /// Keep every k-th step as a snapshot
    #[arg(long)]
    pub snapshot_every: Option<usize>,
}

impl SimFlags {
    fn extend(&self, v: &mut Vec<(&'static str, String)>) {
        self.law.extend(v);
        push(v, "n", self.n);
        push(v, "periods", self.periods);
        push(v, "window", self.window);
        push(v, "dt", self.dt);
        push(v, "duration", self.duration);
        flag(v, "dealias", self.no_dealias, false);
        push(v, "family", self.family);
        push(v, "snapshot_every", self.snapshot_every);
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub sim: SimFlags,
}

impl SimulateArgs {
    pub fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut v = self.common.overrides();
        self.sim.extend(&mut v);
        v
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub sim: SimFlags,
    /// Axis of the grid: key=v1,v2,... or key=start:stop:count
    #[arg(long, required = true)]
    pub vary: Vec<String>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    pub jobs: Option<usize>,
}

impl SweepArgs {
    pub fn overrides(&self) -> Vec<(&'static str, String)> {
        let mut v = self.common.overrides();
        self.sim.extend(&mut v);
        v
    }
}
