//! Index functions `κ`, their inverses `Φ` and the rate transform `ω`.

use std::fmt;

use crate::error::{param, DeconvError, Result};

/// Piecewise-linear index function through `(0, 0)` and the table points.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexTable {
    u: Vec<f64>,
    k: Vec<f64>,
}

impl IndexTable {
    /// `points` must have strictly increasing `u` in `(0, 1]` ending at 1 and
    /// strictly increasing positive values.
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.is_empty() {
            return Err(param("table", "needs at least one point"));
        }
        let mut u = vec![0.0];
        let mut k = vec![0.0];
        for &(x, y) in points {
            if !(x > *u.last().unwrap()) || !(y > *k.last().unwrap()) || !y.is_finite() {
                return Err(param("table", "points must increase strictly in both coordinates"));
            }
            u.push(x);
            k.push(y);
        }
        if *u.last().unwrap() != 1.0 {
            return Err(param("table", "last abscissa must be 1"));
        }
        Ok(Self { u, k })
    }

    fn eval(&self, t: f64) -> f64 {
        let i = self.u.partition_point(|&x| x < t).clamp(1, self.u.len() - 1);
        let (u0, u1, k0, k1) = (self.u[i - 1], self.u[i], self.k[i - 1], self.k[i]);
        k0 + (k1 - k0) * (t - u0) / (u1 - u0)
    }

    fn slopes_nonincreasing(&self) -> bool {
        let s: Vec<f64> = self.u.windows(2).zip(self.k.windows(2)).map(|(u, k)| (k[1] - k[0]) / (u[1] - u[0])).collect();
        s.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.u.iter().copied().zip(self.k.iter().copied()).skip(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IndexFunction {
    /// `κ(u) = u^β`.
    Polynomial { beta: f64 },
    /// `κ(u) = |ln(cu)|^{-β}` with `c = e^{-1-β}`.
    Logarithmic { beta: f64 },
    /// `κ(u) = exp(-β √|ln(cu)|)` with `c = e^{-max(β², 2)}`.
    SqrtLogExp { beta: f64 },
    Custom(IndexTable),
}

fn positive_beta(beta: f64) -> Result<f64> {
    if beta > 0.0 && beta.is_finite() {
        Ok(beta)
    } else {
        Err(param("beta", format!("must be positive, got {beta}")))
    }
}

const LN_LOWER: f64 = -700.0;

impl IndexFunction {
    pub fn polynomial(beta: f64) -> Result<Self> {
        Ok(Self::Polynomial { beta: positive_beta(beta)? })
    }

    pub fn logarithmic(beta: f64) -> Result<Self> {
        Ok(Self::Logarithmic { beta: positive_beta(beta)? })
    }

    pub fn sqrt_log_exp(beta: f64) -> Result<Self> {
        Ok(Self::SqrtLogExp { beta: positive_beta(beta)? })
    }

    pub fn custom(points: &[(f64, f64)]) -> Result<Self> {
        Ok(Self::Custom(IndexTable::new(points)?))
    }

    /// `ln c` for the logarithmic kinds.
    pub fn ln_c(&self) -> Option<f64> {
        match *self {
            Self::Logarithmic { beta } => Some(-1.0 - beta),
            Self::SqrtLogExp { beta } => Some(-(beta * beta).max(2.0)),
            _ => None,
        }
    }

    /// Analytic concavity on `(0, 1]`; for tables, nonincreasing slopes.
    pub fn is_concave(&self) -> bool {
        match self {
            Self::Polynomial { beta } => *beta <= 1.0,
            Self::Logarithmic { .. } | Self::SqrtLogExp { .. } => true,
            Self::Custom(t) => t.slopes_nonincreasing(),
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(DeconvError::OutOfDomain { value: t, domain: "(0, 1]" });
        }
        Ok(match self {
            Self::Custom(table) => table.eval(t),
            Self::Polynomial { beta } => t.powf(*beta),
            _ => self.ln_eval_of_ln(t.ln()).exp(),
        })
    }

    /// `ln κ(u)` from `ln u`, usable far below the smallest positive double.
    pub fn ln_eval_of_ln(&self, ln_u: f64) -> f64 {
        match self {
            Self::Polynomial { beta } => beta * ln_u,
            Self::Logarithmic { beta } => -beta * (-(self.ln_c().unwrap() + ln_u)).ln(),
            Self::SqrtLogExp { beta } => -beta * (-(self.ln_c().unwrap() + ln_u)).sqrt(),
            Self::Custom(table) => table.eval(ln_u.exp()).ln(),
        }
    }

    /// `κ(1)`, the top of the range.
    pub fn upper(&self) -> f64 {
        self.eval(1.0).expect("1 is in the domain")
    }

    /// `Φ(s)` with `κ(Φ(s)) = s`.
    pub fn inverse(&self, s: f64) -> Result<f64> {
        Ok(self.ln_inverse(s)?.exp())
    }

    /// `ln Φ(s)`; closed forms except for tables, which bisect.
    pub fn ln_inverse(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s <= self.upper()) {
            return Err(DeconvError::OutOfDomain { value: s, domain: "(0, κ(1)]" });
        }
        Ok(match self {
            Self::Polynomial { beta } => s.ln() / beta,
            Self::Logarithmic { beta } => -s.powf(-1.0 / beta) - self.ln_c().unwrap(),
            Self::SqrtLogExp { beta } => -(s.ln() / beta).powi(2) - self.ln_c().unwrap(),
            Self::Custom(_) => {
                let target = s.ln();
                bisect(LN_LOWER, 0.0, |x| self.ln_eval_of_ln(x) - target)?
            }
        })
    }

    /// `ω(δ)`: the `t` with `t·Φ(t) = δ`.
    pub fn omega(&self, delta: f64) -> Result<f64> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(DeconvError::OutOfDomain { value: delta, domain: "(0, ∞)" });
        }
        if let Self::SqrtLogExp { beta } = *self {
            let upper = self.upper();
            if delta > upper {
                return Err(DeconvError::OutOfDomain { value: delta, domain: "(0, κ(1)]" });
            }
            // ω(κ(1)) = κ(1); the closed form can land an ulp above it.
            return Ok(sqrt_log_exp_omega(beta, self.ln_c().unwrap(), delta)?.min(upper));
        }
        self.omega_bisect(delta)
    }

    /// Bisection on `ln t + ln Φ(t) = ln δ` over `t ∈ [1e-15, κ(1)]`.
    pub fn omega_bisect(&self, delta: f64) -> Result<f64> {
        let upper = self.upper();
        if delta > upper {
            return Err(DeconvError::OutOfDomain { value: delta, domain: "(0, κ(1)]" });
        }
        let target = delta.ln();
        let g = |x: f64| -> f64 { x + self.ln_inverse(x.exp().min(upper)).unwrap_or(f64::NEG_INFINITY) - target };
        Ok(bisect(OMEGA_FLOOR.ln(), upper.ln(), g)?.exp())
    }
}

const OMEGA_FLOOR: f64 = 1e-15;
const MAX_BISECTIONS: usize = 200;
const ENDPOINT_SLACK: f64 = 1e-13;

/// Root of an increasing function on `[lo, hi]`.
fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    // A root sitting on the upper end can evaluate a few ulps below zero.
    if fhi < 0.0 && fhi > -ENDPOINT_SLACK {
        return Ok(hi);
    }
    if flo > 0.0 || fhi < 0.0 {
        return Err(DeconvError::Bracketing(format!("[{lo}, {hi}] gives values {flo}, {fhi}")));
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if f(hi).abs() <= f(lo).abs() { hi } else { lo })
}

/// With `y = -ln t`, `ln(t Φ(t)) = ln c' - h(y)` where
/// `h(y) = (y/β + β/2)²` and `ln c' = β²/4 - ln c`. So
/// `ω(δ) = exp(-h⁻¹(ln c' - ln δ))` with `h⁻¹(z) = β√z - β²/2`.
fn sqrt_log_exp_omega(beta: f64, ln_c: f64, delta: f64) -> Result<f64> {
    let ln_c_prime = 0.25 * beta * beta - ln_c;
    let z = ln_c_prime - delta.ln();
    if z < 0.25 * beta * beta {
        return Err(DeconvError::OutOfDomain { value: delta, domain: "(0, κ(1)]" });
    }
    let y = beta * z.sqrt() - 0.5 * beta * beta;
    Ok((-y).exp())
}

impl fmt::Display for IndexFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Polynomial { beta } => write!(f, "polynomial:beta={beta}"),
            Self::Logarithmic { beta } => write!(f, "logarithmic:beta={beta}"),
            Self::SqrtLogExp { beta } => write!(f, "sqrt_log_exp:beta={beta}"),
            Self::Custom(t) => {
                f.write_str("custom:")?;
                let pts: Vec<String> = t.points().map(|(u, k)| format!("{u}/{k}")).collect();
                f.write_str(&pts.join(";"))
            }
        }
    }
}

impl std::str::FromStr for IndexFunction {
    type Err = DeconvError;

    /// `polynomial:beta=1`, `logarithmic:beta=2`, `sqrt_log_exp:beta=1`,
    /// or `custom:u1/k1;u2/k2;...`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |r: &str| param("kappa", format!("`{s}`: {r}"));
        let (name, rest) = s.trim().split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let beta = || -> Result<f64> {
            let v = rest.trim().strip_prefix("beta=").ok_or_else(|| bad("expected beta=<value>"))?;
            v.parse().map_err(|_| bad("beta is not a number"))
        };
        match name.trim() {
            "polynomial" => Self::polynomial(beta()?),
            "logarithmic" => Self::logarithmic(beta()?),
            "sqrt_log_exp" => Self::sqrt_log_exp(beta()?),
            "custom" => {
                let pts = rest
                    .split(';')
                    .map(|p| {
                        let (u, k) = p.split_once('/').ok_or_else(|| bad("points are u/k"))?;
                        Ok((u.trim().parse().map_err(|_| bad("bad abscissa"))?, k.trim().parse().map_err(|_| bad("bad value"))?))
                    })
                    .collect::<Result<Vec<(f64, f64)>>>()?;
                Self::custom(&pts)
            }
            other => Err(bad(&format!("unknown index kind `{other}`"))),
        }
    }
}

/// Geometric probe points from `1e-12` to 1.
pub fn probe_grid(count: usize) -> Vec<f64> {
    let lo: f64 = 1e-12f64.ln();
    (0..count).map(|i| (lo * (1.0 - i as f64 / (count - 1) as f64)).exp()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeReport {
    pub increasing: bool,
    pub midpoint_concave: bool,
}

/// Monotonicity and midpoint concavity of `κ` on the probe grid.
pub fn probe_index(k: &IndexFunction, count: usize) -> Result<ProbeReport> {
    let pts = probe_grid(count);
    let vals = pts.iter().map(|&u| k.eval(u)).collect::<Result<Vec<_>>>()?;
    let increasing = vals.windows(2).all(|w| w[1] > w[0]) && vals.iter().all(|&v| v > 0.0);
    let mut midpoint_concave = true;
    for i in 0..pts.len() - 1 {
        let mid = k.eval(0.5 * (pts[i] + pts[i + 1]))?;
        let chord = 0.5 * (vals[i] + vals[i + 1]);
        if mid < chord * (1.0 - 1e-14) {
            midpoint_concave = false;
        }
    }
    Ok(ProbeReport { increasing, midpoint_concave })
}
