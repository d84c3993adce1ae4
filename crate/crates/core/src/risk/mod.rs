//! Monte Carlo risk experiments, rate regressions and the moment and
//! lower-bound diagnostics.
//!
//! Every risk is a Plancherel sum on the frequency grid. Replicate `r` of a
//! cell draws its `Y` sample from stream `(Y, n, r)` and its error sample
//! from `(Eps, m, r)`, so cells sharing `n` or `m` share draws.

mod fit;
mod moments;

pub use fit::{fit_points, rate_fit, FitModel, RateFit};
pub use moments::{
    fourth_moment_limit, lower_bound_diagnostic, moment_bound_audit, scaled_fourth_moment, scaled_variance, LowerBound, MomentRow,
    MOMENT_PROBES,
};

use rayon::prelude::*;

use crate::error::{param, Result};
use crate::estimators::{bandwidth_rule, ecf_active, kde_spectrum, kernel_active_half, keep_mask, KernelSpec};
use crate::models::ConvolutionPair;
use crate::regularization::{rho_compute, threshold, RuleId, SourceCondition, ThresholdInputs, ThresholdRule};
use crate::rng::{stream, stream_id, Purpose};
use crate::spectral::{FrequencyGrid, NestedIntegral, SobolevWeight, SpectralFunction, SQRT_2PI};
use num_complex::Complex64;

/// How `δ`, the proxy for the `Y`-estimate MISE, is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaProxy {
    /// Monte Carlo MISE from this many independent pilot replicates.
    Pilot { replicates: usize },
    /// `n^{-2r/(2r+1)}`.
    Theoretical,
}

impl DeltaProxy {
    pub fn theoretical(n: usize, r: f64) -> f64 {
        (n as f64).powf(-2.0 * r / (2.0 * r + 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// Every `n` against every `m`.
    Cross,
    /// `n_i` with `m_i`.
    Diagonal,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ErrorSampling {
    Known,
    Estimated { m_schedule: Vec<usize>, pairing: Pairing },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bandwidth {
    /// Smoothness order in `h = c·n^{-1/(2r+1)}`.
    pub r: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub pair: ConvolutionPair,
    pub kernel: KernelSpec,
    pub s: f64,
    pub rule: ThresholdRule,
    /// Fixed rule inputs (`beta`, `a`, `p`, `kappa`); `n`, `m`, `delta`, `s`
    /// and `r` are filled per cell.
    pub rule_inputs: ThresholdInputs,
    pub bandwidth: Bandwidth,
    pub n_schedule: Vec<usize>,
    pub eps: ErrorSampling,
    pub replicates: usize,
    pub seed: u64,
    pub grid: FrequencyGrid,
    pub delta: DeltaProxy,
    /// Use the exact `Y` transform, so only the error sample is random.
    pub oracle_y: bool,
}

const MAX_INDEX: usize = 0x00ff_ffff;

fn check_schedule(name: &'static str, v: &[usize]) -> Result<()> {
    if v.is_empty() {
        return Err(param(name, "schedule is empty"));
    }
    if v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(param(name, "schedule must be strictly increasing"));
    }
    if v[0] == 0 || *v.last().unwrap() > MAX_INDEX {
        return Err(param(name, format!("sizes must lie in 1..={MAX_INDEX}")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        check_schedule("n_schedule", &self.n_schedule)?;
        if let ErrorSampling::Estimated { m_schedule, pairing } = &self.eps {
            check_schedule("m_schedule", m_schedule)?;
            if *pairing == Pairing::Diagonal && m_schedule.len() != self.n_schedule.len() {
                return Err(param("m_schedule", "diagonal pairing needs as many m as n"));
            }
        }
        if self.replicates < 2 {
            return Err(param("replicates", "need at least 2"));
        }
        if let DeltaProxy::Pilot { replicates } = self.delta {
            if replicates < 2 {
                return Err(param("pilot_replicates", "need at least 2"));
            }
        }
        SobolevWeight::new(self.s)?;
        if !self.kernel.covers_order(self.bandwidth.r) {
            return Err(param("kernel", format!("{} does not reach order {}", self.kernel, self.bandwidth.r)));
        }
        bandwidth_rule(1, self.bandwidth.r, self.bandwidth.c)?;
        Ok(())
    }

    /// The `(n, m)` cells in report order.
    pub fn cells(&self) -> Vec<(usize, Option<usize>)> {
        match &self.eps {
            ErrorSampling::Known => self.n_schedule.iter().map(|&n| (n, None)).collect(),
            ErrorSampling::Estimated { m_schedule, pairing: Pairing::Cross } => self
                .n_schedule
                .iter()
                .flat_map(|&n| m_schedule.iter().map(move |&m| (n, Some(m))))
                .collect(),
            ErrorSampling::Estimated { m_schedule, pairing: Pairing::Diagonal } => {
                self.n_schedule.iter().zip(m_schedule).map(|(&n, &m)| (n, Some(m))).collect()
            }
        }
    }

    /// The source condition the rule is calibrated for, if any.
    pub fn source_condition(&self) -> Option<SourceCondition> {
        use RuleId::*;
        let i = &self.rule_inputs;
        match self.rule.id {
            PolySource | PolySourceEstimated => i.beta.and_then(|b| SourceCondition::poly(b).ok()),
            LogSource | LogSourceEstimated => i.beta.and_then(|b| SourceCondition::log(b).ok()),
            GeneralSource | GeneralSourceEstimated => i.kappa.clone().map(SourceCondition::General),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskCell {
    pub n: usize,
    /// `None` for the known-error column.
    pub m: Option<usize>,
    pub mean: f64,
    /// Sample standard deviation over `√replicates`.
    pub se: f64,
    pub replicates: usize,
    pub alpha: f64,
    pub delta: f64,
    /// Mean fraction of grid nodes kept by the cut.
    pub mask_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskReport {
    pub cells: Vec<RiskCell>,
    /// `ρ²` for source-condition rules; divergent values are allowed but flagged here.
    pub rho_sq: Option<NestedIntegral>,
}

pub(crate) fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 || v.iter().all(|&x| x == v[0]) {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

struct Prepared {
    x_cf: SpectralFunction,
    y_cf: SpectralFunction,
    eps_cf: SpectralFunction,
    w: SobolevWeight,
}

impl ExperimentConfig {
    fn prepare(&self) -> Result<Prepared> {
        self.validate()?;
        Ok(Prepared {
            x_cf: self.pair.x.spectrum(self.grid),
            y_cf: self.pair.y_spectrum(self.grid),
            eps_cf: self.pair.eps.spectrum(self.grid),
            w: SobolevWeight::new(self.s)?,
        })
    }

    fn y_estimate(&self, p: &Prepared, n: usize, purpose: Purpose, rep: usize) -> Result<(SpectralFunction, usize)> {
        if self.oracle_y {
            return Ok((p.y_cf.clone(), self.grid.half()));
        }
        let h = bandwidth_rule(n, self.bandwidth.r, self.bandwidth.c)?;
        let mut rng = stream(self.seed, stream_id(purpose, n as u32, rep as u32));
        let y = self.pair.sample_y(&mut rng, n);
        Ok((kde_spectrum(&y, self.kernel, h, self.grid)?, kernel_active_half(self.kernel, h, &self.grid)))
    }

    fn mise_replicates(&self, p: &Prepared, n: usize, purpose: Purpose, reps: usize) -> Result<Vec<f64>> {
        (0..reps)
            .into_par_iter()
            .map(|rep| {
                let (est, _) = self.y_estimate(p, n, purpose, rep)?;
                Ok(plancherel_distance(&est, &p.y_cf, SobolevWeight::zero()))
            })
            .collect()
    }

    fn delta_at(&self, p: &Prepared, n: usize) -> Result<f64> {
        if self.oracle_y {
            return Ok(0.0);
        }
        match self.delta {
            DeltaProxy::Theoretical => Ok(DeltaProxy::theoretical(n, self.bandwidth.r)),
            DeltaProxy::Pilot { replicates } => Ok(mean_se(&self.mise_replicates(p, n, Purpose::Pilot, replicates)?).0),
        }
    }

    fn alpha_at(&self, n: usize, m: Option<usize>, delta: f64) -> Result<f64> {
        let inputs = ThresholdInputs {
            delta: Some(delta),
            n: Some(n),
            m: m.or(self.rule_inputs.m),
            s: Some(self.s),
            r: Some(self.bandwidth.r),
            ..self.rule_inputs.clone()
        };
        threshold(&self.rule, &inputs)
    }

    fn cell(&self, p: &Prepared, n: usize, m: Option<usize>, delta: f64) -> Result<RiskCell> {
        let alpha = self.alpha_at(n, m, delta)?;
        let rows: Vec<(f64, f64)> = (0..self.replicates)
            .into_par_iter()
            .map(|rep| {
                let (y_hat, active) = self.y_estimate(p, n, Purpose::Y, rep)?;
                let e = match m {
                    None => p.eps_cf.clone(),
                    Some(m) => {
                        let mut rng = stream(self.seed, stream_id(Purpose::Eps, m as u32, rep as u32));
                        let draws = self.pair.eps.sample(&mut rng, m);
                        // Outside the band the estimate is zero whatever the mask says.
                        ecf_active(&draws, self.grid, active)?
                    }
                };
                let mask = keep_mask(&e, p.w, alpha);
                let risk = cut_off_risk(&y_hat, &e, &mask, &p.x_cf, p.w);
                let kept = mask.iter().filter(|&&k| k).count() as f64 / mask.len() as f64;
                Ok((risk, kept))
            })
            .collect::<Result<_>>()?;
        let risks: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let (mean, se) = mean_se(&risks);
        let mask_fraction = rows.iter().map(|r| r.1).sum::<f64>() / rows.len() as f64;
        Ok(RiskCell { n, m, mean, se, replicates: self.replicates, alpha, delta, mask_fraction })
    }
}

/// `Σ w_j ℓ_s² |f − g|²` without materialising the difference.
fn plancherel_distance(f: &SpectralFunction, g: &SpectralFunction, w: SobolevWeight) -> f64 {
    let grid = f.grid();
    f.values()
        .iter()
        .zip(g.values())
        .enumerate()
        .map(|(j, (a, b))| grid.weight(j) * w.eval_sq(grid.node(j)) * (a - b).norm_sqr())
        .sum()
}

fn cut_off_risk(y: &SpectralFunction, e: &SpectralFunction, mask: &[bool], x: &SpectralFunction, w: SobolevWeight) -> f64 {
    let g = x.grid();
    (0..g.n_points())
        .map(|j| {
            let est = if mask[j] {
                let ev = e.at(j);
                y.at(j) * ev.conj() / (SQRT_2PI * ev.norm_sqr())
            } else {
                Complex64::new(0.0, 0.0)
            };
            g.weight(j) * w.eval_sq(g.node(j)) * (est - x.at(j)).norm_sqr()
        })
        .sum()
}

/// Monte Carlo `E‖F f̂_Y − F f_Y‖²` at sample size `n`, from the same `Y`
/// draws the risk cells use.
pub fn mise_y(config: &ExperimentConfig, n: usize) -> Result<RiskCell> {
    let p = config.prepare()?;
    let risks = config.mise_replicates(&p, n, Purpose::Y, config.replicates)?;
    let (mean, se) = mean_se(&risks);
    Ok(RiskCell { n, m: None, mean, se, replicates: config.replicates, alpha: f64::NAN, delta: f64::NAN, mask_fraction: 1.0 })
}

/// Monte Carlo `E‖f̃ − f_X‖_s²` for one cell; `m = None` uses the true error transform.
pub fn hs_risk(config: &ExperimentConfig, n: usize, m: Option<usize>) -> Result<RiskCell> {
    let p = config.prepare()?;
    if n == 0 || n > MAX_INDEX || m.is_some_and(|m| m == 0 || m > MAX_INDEX) {
        return Err(param("n", format!("sizes must lie in 1..={MAX_INDEX}")));
    }
    let delta = config.delta_at(&p, n)?;
    config.cell(&p, n, m, delta)
}

/// Every cell of the configured schedule, in [`ExperimentConfig::cells`] order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RiskReport> {
    let p = config.prepare()?;
    let mut deltas: Vec<(usize, f64)> = Vec::new();
    let mut cells = Vec::new();
    for (n, m) in config.cells() {
        let delta = match deltas.iter().find(|d| d.0 == n) {
            Some(&(_, d)) => d,
            None => {
                let d = config.delta_at(&p, n)?;
                deltas.push((n, d));
                d
            }
        };
        cells.push(config.cell(&p, n, m, delta)?);
    }
    let rho_sq = match config.source_condition() {
        Some(cond) => Some(rho_compute(&config.pair.x, &config.pair.eps, config.s, &cond)?.rho_sq),
        None => None,
    };
    Ok(RiskReport { cells, rho_sq })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontierRow {
    pub n: usize,
    pub known: RiskCell,
    /// Smallest scheduled `m` within the inflation allowance, `None` when open.
    pub m: Option<usize>,
}

pub const FRONTIER_INFLATION: f64 = 0.1;

/// Whether an estimated-error cell is within 10% of the known-error risk,
/// allowing two combined standard errors.
pub fn within_inflation(estimated: &RiskCell, known: &RiskCell) -> bool {
    let k = 1.0 + FRONTIER_INFLATION;
    estimated.mean - k * known.mean <= 2.0 * estimated.se.hypot(k * known.se)
}

pub fn m_frontier(config: &ExperimentConfig) -> Result<Vec<FrontierRow>> {
    let ErrorSampling::Estimated { m_schedule, .. } = &config.eps else {
        return Err(param("m_schedule", "the frontier needs an error-sample schedule"));
    };
    let p = config.prepare()?;
    config
        .n_schedule
        .iter()
        .map(|&n| {
            let delta = config.delta_at(&p, n)?;
            let known = config.cell(&p, n, None, delta)?;
            let mut hit = None;
            for &m in m_schedule {
                if within_inflation(&config.cell(&p, n, Some(m), delta)?, &known) {
                    hit = Some(m);
                    break;
                }
            }
            Ok(FrontierRow { n, known, m: hit })
        })
        .collect()
}
