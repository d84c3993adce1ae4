//! Source conditions linking the signal transform to the error transform.

use std::fmt;

use crate::error::{param, DeconvError, Result};
use crate::models::DensityModel;
use crate::regularization::IndexFunction;
use crate::spectral::{nested_probe, NestedIntegral, SobolevWeight, SpectralFunction, PROBE_DT, PROBE_HALF_WIDTHS};

#[derive(Debug, Clone, PartialEq)]
pub enum SourceCondition {
    /// Weight `u^{-β}`.
    Poly { beta: f64 },
    /// Weight `|ln u|^β`.
    Log { beta: f64 },
    /// Weight `1/κ(u)`.
    General(IndexFunction),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    Polynomial,
    Logarithmic,
    General,
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Polynomial => "polynomial",
            Self::Logarithmic => "logarithmic",
            Self::General => "general",
        })
    }
}

impl SourceCondition {
    pub fn poly(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(Self::Poly { beta })
    }

    pub fn log(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(Self::Log { beta })
    }

    pub fn kind(&self) -> SourceKind {
        match self {
            Self::Poly { .. } => SourceKind::Polynomial,
            Self::Log { .. } => SourceKind::Logarithmic,
            Self::General(_) => SourceKind::General,
        }
    }

    /// `ln g(u)` from `ln u`, where `g` is the condition's weight.
    pub fn ln_weight(&self, ln_u: f64) -> f64 {
        match self {
            Self::Poly { beta } => -beta * ln_u,
            Self::Log { beta } => beta * (-ln_u).ln(),
            Self::General(k) => -k.ln_eval_of_ln(ln_u),
        }
    }

    /// The rate factor at `α`: `α^β`, `|ln α|^{-β}` or `κ(α)`.
    pub fn rate(&self, alpha: f64) -> Result<f64> {
        match self {
            Self::Poly { beta } => Ok(alpha.powf(*beta)),
            Self::Log { beta } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(DeconvError::OutOfDomain { value: alpha, domain: "(0, 1)" });
                }
                Ok((-alpha.ln()).powf(-beta))
            }
            Self::General(k) => k.eval(alpha),
        }
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(param("beta", format!("must be positive, got {beta}")))
    }
}

impl fmt::Display for SourceCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Poly { beta } => write!(f, "poly:beta={beta}"),
            Self::Log { beta } => write!(f, "log:beta={beta}"),
            Self::General(k) => write!(f, "general:{k}"),
        }
    }
}

impl std::str::FromStr for SourceCondition {
    type Err = DeconvError;

    /// `poly:beta=1`, `log:beta=2` or `general:<index spec>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let beta_of = |rest: &str| -> Result<f64> {
            rest.strip_prefix("beta=")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| param("source", format!("`{s}`: expected beta=<value>")))
        };
        if let Some(rest) = s.strip_prefix("poly:") {
            Self::poly(beta_of(rest)?)
        } else if let Some(rest) = s.strip_prefix("log:") {
            Self::log(beta_of(rest)?)
        } else if let Some(rest) = s.strip_prefix("general:") {
            Ok(Self::General(rest.parse()?))
        } else {
            Err(param("source", format!("unknown source condition `{s}`")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceReport {
    pub condition: SourceCondition,
    pub s: f64,
    /// `ρ²`, or the nested partial integrals when they keep growing.
    pub rho_sq: NestedIntegral,
    pub probe_dt: f64,
    pub probe_half_widths: [f64; 3],
}

impl SourceReport {
    pub fn kind(&self) -> SourceKind {
        self.condition.kind()
    }
}

/// `ρ² = ∫ ℓ_s² |Ff_X|² g(|Ff_ε|²/ℓ_s²) dt` for closed-form models, on
/// nested windows so that divergence is detected rather than truncated.
pub fn rho_compute(x: &DensityModel, eps: &DensityModel, s: f64, cond: &SourceCondition) -> Result<SourceReport> {
    SobolevWeight::new(s)?;
    let rho_sq = nested_probe(|t| {
        let ln_l2 = s * (t * t).ln_1p();
        let ln_u = 2.0 * eps.ln_abs_cf(t) - ln_l2;
        (ln_l2 + 2.0 * x.ln_abs_cf(t) + cond.ln_weight(ln_u)).exp()
    });
    Ok(SourceReport {
        condition: cond.clone(),
        s,
        rho_sq,
        probe_dt: PROBE_DT,
        probe_half_widths: PROBE_HALF_WIDTHS,
    })
}

/// The same integral restricted to a grid; infinite when the error
/// transform vanishes at a node where the signal does not.
pub fn rho_on_grid(x_cf: &SpectralFunction, eps_cf: &SpectralFunction, s: f64, cond: &SourceCondition) -> Result<f64> {
    x_cf.ensure_same_grid(eps_cf)?;
    let w = SobolevWeight::new(s)?;
    let g = x_cf.grid();
    Ok((0..g.n_points())
        .map(|j| {
            let x2 = x_cf.at(j).norm_sqr();
            if x2 == 0.0 {
                return 0.0;
            }
            let l2 = w.eval_sq(g.node(j));
            let ln_u = (eps_cf.at(j).norm_sqr() / l2).ln();
            g.weight(j) * l2 * x2 * cond.ln_weight(ln_u).exp()
        })
        .sum())
}
