//! Threshold rules for the cut-off level `α`.

use std::fmt;
use std::str::FromStr;

use crate::error::{param, DeconvError, Result};
use crate::regularization::IndexFunction;

/// Which formula produces `α`. The `*Estimated` rules add the penalty for
/// estimating the error transform from `m` draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleId {
    /// `c·δ^{1/(β+1)}`.
    PolySource,
    /// `c·δ^{1/2}`.
    LogSource,
    /// `c·δ / ω(c·δ)`.
    GeneralSource,
    /// `c·n^{-2(a+s)/(2(p+a)+1)}`.
    OrdinarySmooth,
    /// `c·n^{-r/(2r+1)}`.
    SuperSmooth,
    /// `c·(δ^{1/(β+1)} + 1/m)`.
    PolySourceEstimated,
    /// `c·(δ^{1/2} + m^{-1/2})`.
    LogSourceEstimated,
    /// `c·(δ/ω(δ) + 1/m)`.
    GeneralSourceEstimated,
    /// `c·(n^{-2(s+a)/(2(p+a)+1)} + 1/m)`.
    OrdinarySmoothEstimated,
    /// `c·(n^{-r/(2r+1)} + m^{-1/2})`.
    SuperSmoothEstimated,
}

impl RuleId {
    pub const ALL: [RuleId; 10] = [
        Self::PolySource,
        Self::LogSource,
        Self::GeneralSource,
        Self::OrdinarySmooth,
        Self::SuperSmooth,
        Self::PolySourceEstimated,
        Self::LogSourceEstimated,
        Self::GeneralSourceEstimated,
        Self::OrdinarySmoothEstimated,
        Self::SuperSmoothEstimated,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::PolySource => "poly-source",
            Self::LogSource => "log-source",
            Self::GeneralSource => "general-source",
            Self::OrdinarySmooth => "ordinary-smooth",
            Self::SuperSmooth => "supersmooth",
            Self::PolySourceEstimated => "poly-source-est",
            Self::LogSourceEstimated => "log-source-est",
            Self::GeneralSourceEstimated => "general-source-est",
            Self::OrdinarySmoothEstimated => "ordinary-smooth-est",
            Self::SuperSmoothEstimated => "supersmooth-est",
        }
    }

    /// Inputs the formula reads; nothing else is consulted.
    pub fn consumes(&self) -> &'static [&'static str] {
        match self {
            Self::PolySource => &["delta", "beta"],
            Self::LogSource => &["delta"],
            Self::GeneralSource => &["delta", "kappa"],
            Self::OrdinarySmooth => &["n", "a", "p", "s"],
            Self::SuperSmooth => &["n", "r"],
            Self::PolySourceEstimated => &["delta", "beta", "m"],
            Self::LogSourceEstimated => &["delta", "m"],
            Self::GeneralSourceEstimated => &["delta", "kappa", "m"],
            Self::OrdinarySmoothEstimated => &["n", "a", "p", "s", "m"],
            Self::SuperSmoothEstimated => &["n", "r", "m"],
        }
    }

    pub fn estimated_eps(&self) -> bool {
        self.consumes().contains(&"m")
    }

    pub fn uses_delta(&self) -> bool {
        self.consumes().contains(&"delta")
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = DeconvError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.name() == s.trim())
            .ok_or_else(|| param("rule", format!("unknown rule `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdRule {
    pub id: RuleId,
    pub c: f64,
}

impl ThresholdRule {
    pub fn new(id: RuleId, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(param("c", format!("rule constant must be positive, got {c}")));
        }
        Ok(Self { id, c })
    }
}

/// Everything a rule might read. Unused fields are ignored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ThresholdInputs {
    /// Proxy for the mean integrated squared error of the `Y` estimate.
    pub delta: Option<f64>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub beta: Option<f64>,
    pub a: Option<f64>,
    pub p: Option<f64>,
    pub s: Option<f64>,
    pub r: Option<f64>,
    pub kappa: Option<IndexFunction>,
}

fn need<T: Clone>(v: &Option<T>, rule: RuleId, input: &'static str) -> Result<T> {
    v.clone().ok_or(DeconvError::MissingInput { rule: rule.name(), input })
}

pub fn threshold(rule: &ThresholdRule, inputs: &ThresholdInputs) -> Result<f64> {
    use RuleId::*;
    let id = rule.id;
    let delta = || -> Result<f64> {
        let d = need(&inputs.delta, id, "delta")?;
        // The additive rules allow δ = 0 (exact Y spectrum).
        let ok = if id.estimated_eps() { d >= 0.0 } else { d > 0.0 };
        if !ok || !d.is_finite() {
            return Err(param("delta", format!("invalid proxy {d} for {id}")));
        }
        Ok(d)
    };
    let n = || -> Result<f64> { Ok(need(&inputs.n, id, "n")?.max(1) as f64) };
    let m = || -> Result<f64> {
        let m = need(&inputs.m, id, "m")?;
        if m == 0 {
            return Err(param("m", "error sample size must be positive"));
        }
        Ok(m as f64)
    };
    let beta = || -> Result<f64> {
        let b = need(&inputs.beta, id, "beta")?;
        if b > 0.0 {
            Ok(b)
        } else {
            Err(param("beta", "must be positive"))
        }
    };
    let concave_kappa = || -> Result<IndexFunction> {
        let k = need(&inputs.kappa, id, "kappa")?;
        if k.is_concave() {
            Ok(k)
        } else {
            Err(DeconvError::NotConcave)
        }
    };
    let ordinary_rate = || -> Result<f64> {
        let (a, p, s) = (need(&inputs.a, id, "a")?, need(&inputs.p, id, "p")?, need(&inputs.s, id, "s")?);
        Ok(n()?.powf(-2.0 * (a + s) / (2.0 * (p + a) + 1.0)))
    };
    let super_rate = || -> Result<f64> {
        let r = need(&inputs.r, id, "r")?;
        if !(r > 0.0) {
            return Err(param("r", "kernel order must be positive"));
        }
        Ok(n()?.powf(-r / (2.0 * r + 1.0)))
    };
    let c = rule.c;
    let alpha = match id {
        PolySource => c * delta()?.powf(1.0 / (beta()? + 1.0)),
        LogSource => c * delta()?.sqrt(),
        GeneralSource => {
            let k = concave_kappa()?;
            let cd = c * delta()?;
            cd / k.omega(cd)?
        }
        OrdinarySmooth => c * ordinary_rate()?,
        SuperSmooth => c * super_rate()?,
        PolySourceEstimated => c * (delta()?.powf(1.0 / (beta()? + 1.0)) + 1.0 / m()?),
        LogSourceEstimated => c * (delta()?.sqrt() + m()?.powf(-0.5)),
        GeneralSourceEstimated => {
            let k = concave_kappa()?;
            let d = delta()?;
            let term = if d == 0.0 { 0.0 } else { d / k.omega(d)? };
            c * (term + 1.0 / m()?)
        }
        OrdinarySmoothEstimated => c * (ordinary_rate()? + 1.0 / m()?),
        SuperSmoothEstimated => c * (super_rate()? + m()?.powf(-0.5)),
    };
    if alpha > 0.0 && alpha.is_finite() {
        Ok(alpha)
    } else {
        Err(param("alpha", format!("rule {id} produced {alpha}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rule(id: RuleId) -> ThresholdRule {
        ThresholdRule::new(id, 1.0).unwrap()
    }

    #[test]
    fn printed_examples() {
        let i = ThresholdInputs { p: Some(2.0), a: Some(1.0), s: Some(0.0), n: Some(128), ..Default::default() };
        assert!((threshold(&rule(RuleId::OrdinarySmooth), &i).unwrap() - 0.25).abs() < 1e-15);
        let i = ThresholdInputs { r: Some(2.0), n: Some(1024), ..Default::default() };
        assert!((threshold(&rule(RuleId::SuperSmooth), &i).unwrap() - 0.0625).abs() < 1e-15);
        let i = ThresholdInputs { delta: Some(1e-4), beta: Some(1.0), m: Some(100), ..Default::default() };
        assert!((threshold(&rule(RuleId::PolySourceEstimated), &i).unwrap() - 0.02).abs() < 1e-15);
    }

    #[test]
    fn missing_inputs_are_named() {
        let i = ThresholdInputs { n: Some(100), ..Default::default() };
        match threshold(&rule(RuleId::SuperSmooth), &i) {
            Err(DeconvError::MissingInput { input, .. }) => assert_eq!(input, "r"),
            other => panic!("{other:?}"),
        }
        let i = ThresholdInputs { delta: Some(0.01), ..Default::default() };
        assert!(matches!(
            threshold(&rule(RuleId::PolySource), &i),
            Err(DeconvError::MissingInput { input: "beta", .. })
        ));
    }

    #[test]
    fn general_rules_need_concave_index() {
        let mut i = ThresholdInputs { delta: Some(1e-3), m: Some(10), ..Default::default() };
        i.kappa = Some(IndexFunction::polynomial(2.0).unwrap());
        assert_eq!(threshold(&rule(RuleId::GeneralSource), &i), Err(DeconvError::NotConcave));
        i.kappa = Some(IndexFunction::polynomial(1.0).unwrap());
        // κ(u) = u gives ω(δ) = δ^{1/2}, so α = δ^{1/2}: the log-source value.
        let a = threshold(&rule(RuleId::GeneralSource), &i).unwrap();
        assert!((a - 1e-3f64.sqrt()).abs() < 1e-14);
        let b = threshold(&rule(RuleId::GeneralSourceEstimated), &i).unwrap();
        assert!((b - (1e-3f64.sqrt() + 0.1)).abs() < 1e-14);
    }

    #[test]
    fn delta_zero_only_for_additive_rules() {
        let i = ThresholdInputs { delta: Some(0.0), beta: Some(1.0), m: Some(50), ..Default::default() };
        assert_eq!(threshold(&rule(RuleId::PolySourceEstimated), &i).unwrap(), 0.02);
        assert!(threshold(&rule(RuleId::PolySource), &i).is_err());
        assert!(ThresholdRule::new(RuleId::PolySource, 0.0).is_err());
    }

    #[test]
    fn supersmooth_rules_never_read_p() {
        for id in [RuleId::SuperSmooth, RuleId::SuperSmoothEstimated] {
            assert!(!id.consumes().contains(&"p"));
            let base = ThresholdInputs { n: Some(4096), m: Some(512), r: Some(2.0), ..Default::default() };
            let with_p = ThresholdInputs { p: Some(7.5), ..base.clone() };
            assert_eq!(threshold(&rule(id), &base).unwrap(), threshold(&rule(id), &with_p).unwrap());
        }
        for id in RuleId::ALL {
            assert_eq!(id.name().parse::<RuleId>().unwrap(), id);
        }
    }

    proptest! {
        #[test]
        fn monotone_in_n_and_m(n in 1usize..100_000, m in 1usize..100_000, ld in -8.0f64..-1.0, c in 0.01f64..10.0) {
            let k = IndexFunction::logarithmic(1.0).unwrap();
            for id in RuleId::ALL {
                let r = ThresholdRule::new(id, c).unwrap();
                let i = ThresholdInputs {
                    delta: Some(10f64.powf(ld) * (1000.0 / n as f64)),
                    n: Some(n), m: Some(m), beta: Some(1.0), a: Some(2.0), p: Some(2.5), s: Some(0.5), r: Some(2.0),
                    kappa: Some(k.clone()),
                };
                let bigger_n = ThresholdInputs { n: Some(2 * n), delta: Some(i.delta.unwrap() / 2.0), ..i.clone() };
                let bigger_m = ThresholdInputs { m: Some(2 * m), ..i.clone() };
                let (a0, a1, a2) = match (threshold(&r, &i), threshold(&r, &bigger_n), threshold(&r, &bigger_m)) {
                    (Ok(x), Ok(y), Ok(z)) => (x, y, z),
                    _ => continue,
                };
                prop_assert!(a0 > 0.0);
                prop_assert!(a1 <= a0 * (1.0 + 1e-14));
                prop_assert!(a2 <= a0 * (1.0 + 1e-14));
            }
        }
    }
}
