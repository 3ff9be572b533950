//! Descriptors for the time coefficient `f(t)` of `f(t)·u_t`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quad;

/// Samples of `f` with a monotone piecewise-cubic (Fritsch–Carlson) interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    times: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl Table {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(Error::Domain("table needs at least two (t, f) samples".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("table times must be strictly increasing".into()));
        }
        let n = times.len();
        let secant: Vec<f64> = (0..n - 1)
            .map(|i| (values[i + 1] - values[i]) / (times[i + 1] - times[i]))
            .collect();
        let mut slopes = vec![0.0; n];
        slopes[0] = secant[0];
        slopes[n - 1] = secant[n - 2];
        for i in 1..n - 1 {
            slopes[i] = if secant[i - 1] * secant[i] <= 0.0 {
                0.0
            } else {
                0.5 * (secant[i - 1] + secant[i])
            };
        }
        for i in 0..n - 1 {
            if secant[i] == 0.0 {
                slopes[i] = 0.0;
                slopes[i + 1] = 0.0;
                continue;
            }
            let alpha = slopes[i] / secant[i];
            let beta = slopes[i + 1] / secant[i];
            let r = alpha * alpha + beta * beta;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                slopes[i] = tau * alpha * secant[i];
                slopes[i + 1] = tau * beta * secant[i];
            }
        }
        Ok(Table {
            times,
            values,
            slopes,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let (first, last) = (self.times[0], self.times[self.times.len() - 1]);
        if !(first..=last).contains(&t) {
            return Err(Error::Domain(format!(
                "t = {t} outside tabulated range [{first}, {last}]"
            )));
        }
        let i = match self.times.partition_point(|&x| x <= t) {
            0 => 0,
            k => (k - 1).min(self.times.len() - 2),
        };
        let h = self.times[i + 1] - self.times[i];
        let s = (t - self.times[i]) / h;
        let (h00, h10) = ((1.0 + 2.0 * s) * (1.0 - s).powi(2), s * (1.0 - s).powi(2));
        let (h01, h11) = (s * s * (3.0 - 2.0 * s), s * s * (s - 1.0));
        Ok(h00 * self.values[i]
            + h10 * h * self.slopes[i]
            + h01 * self.values[i + 1]
            + h11 * h * self.slopes[i + 1])
    }
}

/// The coefficient `f(t)`; `h(t) = 1/f(t)` scales the spatial terms.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeCoefficient {
    /// `f ≡ 1`.
    Unit,
    /// `f(t) = e^{rate·t}`.
    Exponential { rate: f64 },
    /// `f(t) = Σ cₖ tᵏ`, coefficients in ascending order.
    Polynomial(Vec<f64>),
    Tabulated(Table),
}

impl TimeCoefficient {
    pub fn is_unit(&self) -> bool {
        matches!(self, TimeCoefficient::Unit)
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        match self {
            TimeCoefficient::Unit => Ok(1.0),
            TimeCoefficient::Exponential { rate } => Ok((rate * t).exp()),
            TimeCoefficient::Polynomial(c) => Ok(c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck)),
            TimeCoefficient::Tabulated(table) => table.eval(t),
        }
    }

    /// `h(t) = 1/f(t)`.
    pub fn inverse(&self, t: f64) -> Result<f64> {
        let f = self.value(t)?;
        if f == 0.0 || !f.is_finite() || !(1.0 / f).is_finite() {
            return Err(Error::CoefficientSingularity(t));
        }
        Ok(1.0 / f)
    }

    /// Fails if `f` vanishes on `[t0, t1]`. Exact for the unit and
    /// exponential kinds; sampled (sign change or near-zero) otherwise.
    pub fn check_nonvanishing(&self, t0: f64, t1: f64) -> Result<()> {
        match self {
            TimeCoefficient::Unit | TimeCoefficient::Exponential { .. } => Ok(()),
            _ => {
                let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
                let samples = 1024;
                let values = (0..=samples)
                    .map(|i| {
                        let t = lo + (hi - lo) * i as f64 / samples as f64;
                        self.value(t).map(|f| (t, f))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let scale = values.iter().map(|(_, f)| f.abs()).fold(0.0, f64::max);
                for w in values.windows(2) {
                    let ((ta, fa), (_, fb)) = (w[0], w[1]);
                    if fa.signum() != fb.signum() || fa.abs() <= 1e-12 * scale {
                        return Err(Error::CoefficientSingularity(ta));
                    }
                }
                Ok(())
            }
        }
    }

    /// `∫_{t0}^{t1} h(s) ds`.
    pub fn integral_inverse(&self, t0: f64, t1: f64) -> Result<f64> {
        match self {
            TimeCoefficient::Unit => Ok(t1 - t0),
            TimeCoefficient::Exponential { rate } if *rate == 0.0 => Ok(t1 - t0),
            TimeCoefficient::Exponential { rate } => {
                Ok(((-rate * t0).exp() - (-rate * t1).exp()) / rate)
            }
            _ => {
                self.check_nonvanishing(t0, t1)?;
                quad::integrate(|s| self.inverse(s).unwrap_or(f64::NAN), t0, t1, 1e-12)
            }
        }
    }
}

impl fmt::Display for TimeCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeCoefficient::Unit => f.write_str("unit"),
            TimeCoefficient::Exponential { rate } => write!(f, "exp:{rate:e}"),
            TimeCoefficient::Polynomial(c) => {
                let parts: Vec<String> = c.iter().map(|x| format!("{x:e}")).collect();
                write!(f, "poly:{}", parts.join(","))
            }
            TimeCoefficient::Tabulated(t) => {
                let parts: Vec<String> = t
                    .times
                    .iter()
                    .zip(&t.values)
                    .map(|(a, b)| format!("{a:e}:{b:e}"))
                    .collect();
                write!(f, "table:{}", parts.join(","))
            }
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{x}`")))
        })
        .collect()
}

/// `unit`, `exp:<rate>`, `poly:<c0>,<c1>,...`, `table:<t>:<f>,<t>:<f>,...`.
impl FromStr for TimeCoefficient {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "unit" || s == "1" {
            return Ok(TimeCoefficient::Unit);
        }
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("bad f descriptor `{s}`")))?;
        match kind {
            "exp" => {
                let rate = rest
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad rate `{rest}`")))?;
                Ok(TimeCoefficient::Exponential { rate })
            }
            "poly" => Ok(TimeCoefficient::Polynomial(parse_list(rest)?)),
            "table" => {
                let mut times = Vec::new();
                let mut values = Vec::new();
                for pair in rest.split(',') {
                    let (t, f) = pair
                        .split_once(':')
                        .ok_or_else(|| Error::Parse(format!("bad table entry `{pair}`")))?;
                    times.push(parse_list(t)?[0]);
                    values.push(parse_list(f)?[0]);
                }
                Ok(TimeCoefficient::Tabulated(Table::new(times, values)?))
            }
            _ => Err(Error::Parse(format!("unknown f kind `{kind}`"))),
        }
    }
}
