use rayon::prelude::*;

use crate::error::{param, Result};
use crate::estimators::ecf_at;
use crate::models::DensityModel;
use crate::regularization::IndexFunction;
use crate::risk::mean_se;
use crate::rng::{stream, stream_id, Purpose};
use crate::spectral::SpectralFunction;
use std::f64::consts::PI;

pub const MOMENT_PROBES: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 5.0];

#[derive(Debug, Clone, PartialEq)]
pub struct MomentRow {
    pub t: f64,
    pub m: usize,
    pub gamma: f64,
    /// Monte Carlo `m^γ·E|ECF(t) − cf(t)|^{2γ}`.
    pub scaled: f64,
    pub se: f64,
    /// Exact value of the scaled moment when `γ` is 1 or 2.
    pub exact: Option<f64>,
}

/// `c(t) = E exp(-itε)` for the symmetric catalog models.
fn unit_cf(model: &DensityModel, t: f64) -> f64 {
    (2.0 * PI).sqrt() * model.cf_re(t)
}

/// Exact `m·E|ECF − cf|²`.
pub fn scaled_variance(model: &DensityModel, t: f64) -> f64 {
    let c = unit_cf(model, t);
    (1.0 - c * c) / (2.0 * PI)
}

/// Exact `m²·E|ECF − cf|⁴`, from expanding the fourth moment of a mean of
/// i.i.d. centred phases.
pub fn scaled_fourth_moment(model: &DensityModel, t: f64, m: usize) -> f64 {
    let (c, c2) = (unit_cf(model, t), unit_cf(model, 2.0 * t));
    let sigma2 = 1.0 - c * c;
    let pseudo = c2 - c * c;
    let single = (1.0 + c * c).powi(2) - 4.0 * (1.0 + c * c) * c * c + 2.0 * c * c * c2 + 2.0 * c * c;
    let mf = m as f64;
    (single / mf + (1.0 - 1.0 / mf) * (2.0 * sigma2 * sigma2 + pseudo * pseudo)) / (4.0 * PI * PI)
}

/// Large-`m` limit of [`scaled_fourth_moment`]: `2σ⁴ + |ρ|²` with `ρ` the
/// pseudo-variance, since the error is not circularly symmetric.
pub fn fourth_moment_limit(model: &DensityModel, t: f64) -> f64 {
    let (c, c2) = (unit_cf(model, t), unit_cf(model, 2.0 * t));
    let sigma2 = 1.0 - c * c;
    let pseudo = c2 - c * c;
    (2.0 * sigma2 * sigma2 + pseudo * pseudo) / (4.0 * PI * PI)
}

/// Scaled central moments of the empirical transform at `probes`, for every
/// `m` and `γ`. All `γ` at one `m` share the same draws.
pub fn moment_bound_audit(
    model: &DensityModel,
    probes: &[f64],
    m_schedule: &[usize],
    gammas: &[f64],
    replicates: usize,
    seed: u64,
) -> Result<Vec<MomentRow>> {
    if gammas.iter().any(|&g| !(g > 0.0)) {
        return Err(param("gamma", "moment orders must be positive"));
    }
    if replicates < 2 || m_schedule.contains(&0) {
        return Err(param("replicates", "need at least 2 replicates and positive m"));
    }
    let cf: Vec<_> = probes.iter().map(|&t| model.cf(t)).collect();
    let mut rows = Vec::new();
    for &m in m_schedule {
        let sq: Vec<Vec<f64>> = (0..replicates)
            .into_par_iter()
            .map(|rep| {
                let mut rng = stream(seed, stream_id(Purpose::Moment, m as u32, rep as u32));
                let draws = model.sample(&mut rng, m);
                Ok(ecf_at(&draws, probes)?.iter().zip(&cf).map(|(e, c)| (e - c).norm_sqr()).collect())
            })
            .collect::<Result<_>>()?;
        for (i, &t) in probes.iter().enumerate() {
            for &gamma in gammas {
                let mf = m as f64;
                let col: Vec<f64> = sq.iter().map(|r| (mf * r[i]).powf(gamma)).collect();
                let (scaled, se) = mean_se(&col);
                let exact = if gamma == 1.0 {
                    Some(scaled_variance(model, t))
                } else if gamma == 2.0 {
                    Some(scaled_fourth_moment(model, t, m))
                } else {
                    None
                };
                rows.push(MomentRow { t, m, gamma, scaled, se, exact });
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub value: f64,
    pub argmax_t: f64,
}

/// Grid maximum of `κ(|Ff|²)·min(1/(m|Ff|²), 1)`. Near-ties (relative 1e-12)
/// resolve to the largest `t`, which for plateaus is the edge where
/// `m|Ff|² = 1`.
pub fn lower_bound_diagnostic(f_cf: &SpectralFunction, kappa: &IndexFunction, m: usize) -> Result<LowerBound> {
    if m == 0 {
        return Err(param("m", "must be at least 1"));
    }
    let mf = m as f64;
    let values: Vec<f64> = f_cf
        .values()
        .iter()
        .map(|v| {
            let u = v.norm_sqr();
            if u == 0.0 {
                return Ok(0.0);
            }
            Ok(kappa.eval(u.min(1.0))? * (1.0 / (mf * u)).min(1.0))
        })
        .collect::<Result<_>>()?;
    let max = values.iter().cloned().fold(0.0, f64::max);
    let cut = max * (1.0 - 1e-12);
    let j = (0..values.len()).rev().find(|&j| values[j] >= cut).unwrap_or(f_cf.grid().center());
    Ok(LowerBound { value: values[j], argmax_t: f_cf.grid().node(j) })
}
