//! Typed views of a [`Config`] for each command.

use deconv_core::estimators::KernelSpec;
use deconv_core::models::{convolve, ConvolutionPair, DensityModel};
use deconv_core::regularization::{IndexFunction, RuleId, SourceCondition, ThresholdInputs, ThresholdRule};
use deconv_core::risk::{Bandwidth, DeltaProxy, ErrorSampling, ExperimentConfig, FitModel, Pairing, MOMENT_PROBES};
use deconv_core::spectral::FrequencyGrid;

use crate::config::{Config, Size};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// `E‖f̃ − f_X‖_s²`.
    HsRisk,
    /// `E‖f̂_Y − f_Y‖²`.
    MiseY,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaMode {
    Pilot,
    Theoretical,
    Oracle,
}

impl DeltaMode {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Pilot => "pilot",
            Self::Theoretical => "theoretical",
            Self::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub experiment: ExperimentConfig,
    pub quantity: Quantity,
    pub delta_mode: DeltaMode,
    pub fits: Vec<FitModel>,
}

fn sizes(c: &Config, section: &str, key: &str) -> Result<Option<Vec<usize>>, CliError> {
    Ok(c.list::<Size>(section, key)?.map(|v| v.into_iter().map(|s| s.0).collect()))
}

pub fn pair(c: &Config) -> Result<ConvolutionPair, CliError> {
    let x: DensityModel = c.require("model", "x")?;
    let eps: DensityModel = c.require("model", "eps")?;
    Ok(convolve(x, eps))
}

pub fn grid(c: &Config) -> Result<FrequencyGrid, CliError> {
    let t_max = c.get("grid", "t_max")?.unwrap_or(64.0);
    let n_points = c.get("grid", "n_points")?.unwrap_or(8193);
    Ok(FrequencyGrid::new(t_max, n_points)?)
}

pub fn sobolev_index(c: &Config) -> Result<f64, CliError> {
    Ok(c.get("estimator", "s")?.unwrap_or(0.0))
}

pub fn bandwidth(c: &Config) -> Result<(KernelSpec, Bandwidth), CliError> {
    let kernel = c.get("estimator", "kernel")?.unwrap_or(KernelSpec::Sinc);
    let r = c.require("estimator", "bandwidth_r")?;
    let bc = c.get("estimator", "bandwidth_c")?.unwrap_or(1.0);
    Ok((kernel, Bandwidth { r, c: bc }))
}

pub fn rule(c: &Config) -> Result<(ThresholdRule, ThresholdInputs), CliError> {
    let id: RuleId = c.require("threshold", "rule")?;
    let rule = ThresholdRule::new(id, c.get("threshold", "c")?.unwrap_or(1.0))?;
    let inputs = ThresholdInputs {
        beta: c.get("threshold", "beta")?,
        a: c.get("threshold", "a")?,
        p: c.get("threshold", "p")?,
        kappa: c.get::<IndexFunction>("threshold", "kappa")?,
        ..Default::default()
    };
    Ok((rule, inputs))
}

pub fn seed(c: &Config) -> Result<u64, CliError> {
    Ok(c.get("schedule", "seed")?.unwrap_or(1))
}

pub fn simulation(c: &Config) -> Result<Simulation, CliError> {
    let quantity = match c.raw("schedule", "quantity").unwrap_or("hs_risk") {
        "hs_risk" => Quantity::HsRisk,
        "mise_y" => Quantity::MiseY,
        q => return Err(CliError::Config(format!("schedule.quantity: unknown `{q}` (hs_risk or mise_y)"))),
    };
    let (kernel, bandwidth) = bandwidth(c)?;
    let (rule, rule_inputs) = match quantity {
        Quantity::HsRisk => rule(c)?,
        // The rule never enters a Y-only experiment.
        Quantity::MiseY => (ThresholdRule::new(RuleId::SuperSmooth, 1.0)?, ThresholdInputs::default()),
    };
    let n_schedule = sizes(c, "schedule", "n")?.ok_or_else(|| CliError::Config("missing schedule.n".into()))?;
    let eps = match c.raw("schedule", "m").unwrap_or("known") {
        "known" => ErrorSampling::Known,
        _ => {
            let pairing = match c.raw("schedule", "pairing").unwrap_or("cross") {
                "cross" => Pairing::Cross,
                "diagonal" => Pairing::Diagonal,
                p => return Err(CliError::Config(format!("schedule.pairing: unknown `{p}` (cross or diagonal)"))),
            };
            ErrorSampling::Estimated { m_schedule: sizes(c, "schedule", "m")?.unwrap_or_default(), pairing }
        }
    };
    let oracle_y = c.get("schedule", "oracle_y")?.unwrap_or(false);
    let (delta, delta_mode) = match c.raw("threshold", "delta").unwrap_or("pilot") {
        _ if oracle_y => (DeltaProxy::Theoretical, DeltaMode::Oracle),
        "pilot" => (DeltaProxy::Pilot { replicates: c.get("threshold", "pilot_replicates")?.unwrap_or(100) }, DeltaMode::Pilot),
        "theoretical" => (DeltaProxy::Theoretical, DeltaMode::Theoretical),
        d => return Err(CliError::Config(format!("threshold.delta: unknown `{d}` (pilot or theoretical)"))),
    };
    let fits = c.list::<FitModel>("schedule", "fits")?.unwrap_or_else(|| vec![FitModel::PowerN]);
    let experiment = ExperimentConfig {
        pair: pair(c)?,
        kernel,
        s: sobolev_index(c)?,
        rule,
        rule_inputs,
        bandwidth,
        n_schedule,
        eps,
        replicates: c.get("schedule", "replicates")?.unwrap_or(200),
        seed: seed(c)?,
        grid: grid(c)?,
        delta,
        oracle_y,
    };
    experiment.validate()?;
    Ok(Simulation { experiment, quantity, delta_mode, fits })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditPlan {
    pub pair: ConvolutionPair,
    pub s: f64,
    pub grid: FrequencyGrid,
    pub seed: u64,
    pub source: Option<SourceCondition>,
    pub alphas: Vec<f64>,
    pub m_schedule: Vec<usize>,
    pub stochastic_replicates: usize,
    pub gammas: Vec<f64>,
    pub probes: Vec<f64>,
    pub moment_replicates: usize,
    pub kappa: IndexFunction,
}

pub fn audit(c: &Config) -> Result<AuditPlan, CliError> {
    let alphas = c
        .list("audit", "alphas")?
        .unwrap_or_else(|| (0..12).map(|i| 10f64.powf(-4.0 + 3.0 * i as f64 / 11.0)).collect());
    if alphas.iter().any(|&a: &f64| !(a > 0.0)) {
        return Err(CliError::Config("audit.alphas must be positive".into()));
    }
    let m_schedule = sizes(c, "audit", "m")?.unwrap_or_else(|| vec![100, 1000, 10_000]);
    if m_schedule.is_empty() || m_schedule.contains(&0) {
        return Err(CliError::Config("audit.m must list positive sizes".into()));
    }
    Ok(AuditPlan {
        pair: pair(c)?,
        s: sobolev_index(c)?,
        grid: grid(c)?,
        seed: seed(c)?,
        source: c.get("audit", "source")?,
        alphas,
        m_schedule,
        stochastic_replicates: c.get("audit", "stochastic_replicates")?.unwrap_or(100),
        gammas: c.list("audit", "gammas")?.unwrap_or_else(|| vec![0.5, 1.0, 2.0]),
        probes: c.list("audit", "probes")?.unwrap_or_else(|| MOMENT_PROBES.to_vec()),
        moment_replicates: c.get("audit", "moment_replicates")?.unwrap_or(1000),
        kappa: c.get("audit", "kappa")?.unwrap_or(IndexFunction::polynomial(1.0)?),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatePlan {
    pub kernel: KernelSpec,
    pub bandwidth: Bandwidth,
    pub s: f64,
    pub rule: ThresholdRule,
    pub inputs: ThresholdInputs,
    pub grid: FrequencyGrid,
    pub x_points: Vec<f64>,
}

pub fn estimate(c: &Config) -> Result<EstimatePlan, CliError> {
    let (kernel, bandwidth) = bandwidth(c)?;
    let (rule, inputs) = rule(c)?;
    let x_min: f64 = c.get("estimate", "x_min")?.unwrap_or(-5.0);
    let x_max: f64 = c.get("estimate", "x_max")?.unwrap_or(5.0);
    let count: usize = c.get("estimate", "x_points")?.unwrap_or(201);
    if !(x_max > x_min) || count < 2 {
        return Err(CliError::Config("estimate needs x_min < x_max and x_points >= 2".into()));
    }
    let x_points = (0..count).map(|i| x_min + (x_max - x_min) * i as f64 / (count - 1) as f64).collect();
    Ok(EstimatePlan { kernel, bandwidth, s: sobolev_index(c)?, rule, inputs, grid: grid(c)?, x_points })
}
