//! Numerical audits of the truncation bias bounds.

use rayon::prelude::*;

use crate::error::{param, DeconvError, Result};
use crate::estimators::ecf_active;
use crate::models::DensityModel;
use crate::regularization::{rho_on_grid, SourceCondition, SourceKind};
use crate::risk::mean_se;
use crate::rng::{stream, stream_id, Purpose};
use crate::spectral::{SobolevWeight, SpectralFunction};

#[derive(Debug, Clone, PartialEq)]
pub struct BiasAudit {
    pub alpha: f64,
    /// `‖ℓ_s·Ff_X·1{|Ff_ε/ℓ_s|² < α}‖²` on the grid.
    pub lhs: f64,
    pub rho_sq: f64,
    /// `α^β`, `|ln α|^{-β}` or `κ(α)`.
    pub rate: f64,
    /// `lhs / (rate·ρ²)`.
    pub ratio: f64,
    /// Only the polynomial bound is free of unknown constants.
    pub holds: Option<bool>,
}

/// Weighted signal energy on the nodes the cut removes.
pub fn truncated_energy(x_cf: &SpectralFunction, e: &SpectralFunction, w: SobolevWeight, alpha: f64) -> f64 {
    let g = x_cf.grid();
    (0..g.n_points())
        .filter_map(|j| {
            let l2 = w.eval_sq(g.node(j));
            (e.at(j).norm_sqr() / l2 < alpha).then(|| g.weight(j) * l2 * x_cf.at(j).norm_sqr())
        })
        .sum()
}

pub fn bias_bound_audit(
    x_cf: &SpectralFunction,
    eps_cf: &SpectralFunction,
    s: f64,
    alpha: f64,
    cond: &SourceCondition,
) -> Result<BiasAudit> {
    if !(alpha > 0.0) {
        return Err(param("alpha", "must be positive"));
    }
    let rho_sq = rho_on_grid(x_cf, eps_cf, s, cond)?;
    if !rho_sq.is_finite() {
        return Err(DeconvError::DivergentSource);
    }
    let lhs = truncated_energy(x_cf, eps_cf, SobolevWeight::new(s)?, alpha);
    let rate = cond.rate(alpha)?;
    let holds = (cond.kind() == SourceKind::Polynomial).then(|| lhs <= rate * rho_sq);
    Ok(BiasAudit { alpha, lhs, rho_sq, rate, ratio: lhs / (rate * rho_sq), holds })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticAudit {
    pub alpha: f64,
    pub m: usize,
    /// Mean over replicates of the truncated energy under the empirical cut.
    pub lhs_mc: f64,
    pub se: f64,
    /// `α^β + m^{-β}`, `|ln(α + 1/m)|^{-β}` or `κ(α + 1/m)`.
    pub rate: f64,
    pub rho_sq: f64,
    pub ratio: f64,
}

pub fn stochastic_rate(cond: &SourceCondition, alpha: f64, m: usize) -> Result<f64> {
    let inv_m = 1.0 / m as f64;
    match cond {
        SourceCondition::Poly { beta } => Ok(alpha.powf(*beta) + inv_m.powf(*beta)),
        _ => cond.rate(alpha + inv_m),
    }
}

/// Monte Carlo version of the bias audit with the cut taken from the
/// empirical error transform of `m` fresh draws per replicate. All alphas
/// share the same draws.
#[allow(clippy::too_many_arguments)]
pub fn stochastic_bias_audit(
    x_cf: &SpectralFunction,
    eps_model: &DensityModel,
    s: f64,
    cond: &SourceCondition,
    alphas: &[f64],
    m: usize,
    replicates: usize,
    seed: u64,
) -> Result<Vec<StochasticAudit>> {
    if m == 0 || replicates == 0 {
        return Err(param("m", "sample size and replicate count must be positive"));
    }
    let w = SobolevWeight::new(s)?;
    let grid = *x_cf.grid();
    let rho_sq = rho_on_grid(x_cf, &eps_model.spectrum(grid), s, cond)?;
    if !rho_sq.is_finite() {
        return Err(DeconvError::DivergentSource);
    }
    let index = u32::try_from(m).unwrap_or(u32::MAX);
    let per_rep: Vec<Vec<f64>> = (0..replicates)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream(seed, stream_id(Purpose::Audit, index, rep as u32));
            let draws = eps_model.sample(&mut rng, m);
            let e = ecf_active(&draws, grid, grid.half())?;
            Ok(alphas.iter().map(|&a| truncated_energy(x_cf, &e, w, a)).collect())
        })
        .collect::<Result<_>>()?;
    alphas
        .iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let col: Vec<f64> = per_rep.iter().map(|r| r[i]).collect();
            let (lhs_mc, se) = mean_se(&col);
            let rate = stochastic_rate(cond, alpha, m)?;
            Ok(StochasticAudit { alpha, m, lhs_mc, se, rate, rho_sq, ratio: lhs_mc / (rate * rho_sq) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{laplace, sym_chi2};
    use crate::spectral::{weighted_l2_norm_sq, FrequencyGrid};

    #[test]
    fn large_alpha_removes_everything() {
        let g = FrequencyGrid::default_experiment();
        let x = sym_chi2(3).unwrap().spectrum(g);
        let e = sym_chi2(1).unwrap().spectrum(g);
        let cond = SourceCondition::poly(1.0).unwrap();
        let a = bias_bound_audit(&x, &e, 0.0, 0.2, &cond).unwrap();
        assert!((a.lhs - weighted_l2_norm_sq(&x, SobolevWeight::zero())).abs() < 1e-15);
        assert_eq!(a.holds, Some(true));
        let tiny = bias_bound_audit(&x, &e, 0.0, 1e-300, &cond).unwrap();
        assert_eq!(tiny.lhs, 0.0);
    }

    #[test]
    fn log_kind_reports_ratio_only() {
        let g = FrequencyGrid::default_experiment();
        let x = sym_chi2(3).unwrap().spectrum(g);
        let e = laplace(1.0).unwrap().spectrum(g);
        let a = bias_bound_audit(&x, &e, 0.0, 1e-3, &SourceCondition::log(1.0).unwrap()).unwrap();
        assert_eq!(a.holds, None);
        assert!(a.ratio > 0.0 && a.ratio.is_finite());
    }

    #[test]
    fn ecf_cut_bounded_by_modulus() {
        let g = FrequencyGrid::new(16.0, 1025).unwrap();
        let x = sym_chi2(3).unwrap().spectrum(g);
        let eps = sym_chi2(1).unwrap();
        let cond = SourceCondition::poly(1.0).unwrap();
        let full = weighted_l2_norm_sq(&x, SobolevWeight::zero());
        let rows = stochastic_bias_audit(&x, &eps, 0.0, &cond, &[0.2], 50, 4, 9).unwrap();
        assert_eq!(rows[0].lhs_mc, full);
        assert_eq!(rows[0].se, 0.0);
    }
}
