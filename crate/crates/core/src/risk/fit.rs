use std::fmt;
use std::str::FromStr;

use crate::error::{param, DeconvError, Result};
use crate::risk::RiskReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    /// `log risk` against `log n`.
    PowerN,
    /// `log risk` against `log log n`.
    LogPowerN,
    PowerM,
    LogPowerM,
}

impl FitModel {
    pub const ALL: [FitModel; 4] = [Self::PowerN, Self::LogPowerN, Self::PowerM, Self::LogPowerM];

    pub fn name(&self) -> &'static str {
        match self {
            Self::PowerN => "power_n",
            Self::LogPowerN => "log_power_n",
            Self::PowerM => "power_m",
            Self::LogPowerM => "log_power_m",
        }
    }

    fn log_log(&self) -> bool {
        matches!(self, Self::LogPowerN | Self::LogPowerM)
    }

    fn uses_m(&self) -> bool {
        matches!(self, Self::PowerM | Self::LogPowerM)
    }
}

impl fmt::Display for FitModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FitModel {
    type Err = DeconvError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| param("fit", format!("unknown fit model `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub model: FitModel,
    pub exponent: f64,
    pub se: f64,
    pub r_squared: f64,
    pub points: usize,
    pub intercept: f64,
}

/// Ordinary least squares of `ys` on `xs`: `(slope, intercept, slope SE, R²)`.
pub fn fit_points(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64, f64)> {
    let k = xs.len();
    if k != ys.len() {
        return Err(param("points", "x and y lengths differ"));
    }
    if k < 4 {
        return Err(DeconvError::TooFewPoints(k));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(param("points", "non-finite coordinate"));
    }
    let kf = k as f64;
    let mx = xs.iter().sum::<f64>() / kf;
    let my = ys.iter().sum::<f64>() / kf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(param("points", "all x coordinates coincide"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let se = (rss / (kf - 2.0) / sxx).sqrt();
    let r2 = if syy == 0.0 { 1.0 } else { (1.0 - rss / syy).clamp(0.0, 1.0) };
    Ok((slope, intercept, se, r2))
}

/// Regresses `log mean` on `log n`, `log log n`, `log m` or `log log m`.
/// The `m` models read only cells with an error sample.
pub fn rate_fit(report: &RiskReport, model: FitModel) -> Result<RateFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for c in &report.cells {
        let size = if model.uses_m() {
            match c.m {
                Some(m) => m,
                None => continue,
            }
        } else {
            c.n
        };
        if c.mean <= 0.0 {
            return Err(param("risk", format!("cannot take the log of mean risk {}", c.mean)));
        }
        let mut x = (size as f64).ln();
        if model.log_log() {
            if size < 2 {
                return Err(param("n", "log-log fits need sizes above 1"));
            }
            x = x.ln();
        }
        xs.push(x);
        ys.push(c.mean.ln());
    }
    let (exponent, intercept, se, r_squared) = fit_points(&xs, &ys)?;
    Ok(RateFit { model, exponent, se, r_squared, points: xs.len(), intercept })
}
