//! Closed-form symmetric densities used as ground truth.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, Normal, Open01};

use crate::error::{param, DeconvError, Result};
use crate::spectral::{nested_probe, FrequencyGrid, NestedIntegral, SpectralFunction, INV_SQRT_2PI, SQRT_2PI};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// A catalog density. Every member is symmetric about 0, so its transform is
/// real and even.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityModel {
    /// `S1 - S2` with `S1, S2` independent `χ²(k)`.
    SymChi2 { k: u32 },
    Cauchy { gamma: f64 },
    Gaussian { sigma: f64 },
    Laplace { b: f64 },
    /// Uniform on `[-b, b]`; its transform has zeros.
    Uniform { b: f64 },
}

/// Decay class proposed by the catalog, before checking it on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayCandidate {
    Ordinary(f64),
    Super(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmoothnessTag {
    Ordinary { a: f64, d: f64 },
    Super { a: f64, d: f64 },
    Unclassified,
}

impl SmoothnessTag {
    pub fn a(&self) -> Option<f64> {
        match *self {
            Self::Ordinary { a, .. } | Self::Super { a, .. } => Some(a),
            Self::Unclassified => None,
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(param(name, format!("must be positive, got {v}")))
    }
}

pub fn sym_chi2(k: u32) -> Result<DensityModel> {
    if k == 0 {
        return Err(param("k", "degrees of freedom must be at least 1"));
    }
    Ok(DensityModel::SymChi2 { k })
}

pub fn cauchy(gamma: f64) -> Result<DensityModel> {
    Ok(DensityModel::Cauchy { gamma: positive("gamma", gamma)? })
}

pub fn gaussian(sigma: f64) -> Result<DensityModel> {
    Ok(DensityModel::Gaussian { sigma: positive("sigma", sigma)? })
}

pub fn laplace(b: f64) -> Result<DensityModel> {
    Ok(DensityModel::Laplace { b: positive("b", b)? })
}

pub fn uniform(b: f64) -> Result<DensityModel> {
    Ok(DensityModel::Uniform { b: positive("b", b)? })
}

/// `sin(πu)`, exactly zero at integers.
fn sin_pi(u: f64) -> f64 {
    if u == u.round() {
        return 0.0;
    }
    let r = u - 2.0 * (0.5 * u).round();
    (PI * r).sin()
}

/// `Γ(n/2)` for a positive integer `n`.
fn gamma_half(n: u32) -> f64 {
    let (mut g, mut x) = if n % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while 2.0 * x < f64::from(n) {
        g *= x;
        x += 1.0;
    }
    g
}

/// `K_ν(z) = ∫_0^∞ exp(-z cosh u) cosh(νu) du`; the integrand decays
/// doubly exponentially, so a plain trapezoid converges fast.
fn bessel_k(nu: f64, z: f64) -> f64 {
    const H: f64 = 0.02;
    let mut sum = 0.5 * (-z).exp();
    let mut i = 1;
    loop {
        let u = i as f64 * H;
        let term = (-z * u.cosh() + nu * u).exp() * 0.5 * (1.0 + (-2.0 * nu * u).exp());
        sum += term;
        if term < 1e-18 * sum && z * u.cosh() > nu * u + 40.0 {
            break;
        }
        i += 1;
    }
    sum * H
}

impl DensityModel {
    pub fn name(&self) -> &'static str {
        match self {
            Self::SymChi2 { .. } => "sym_chi2",
            Self::Cauchy { .. } => "cauchy",
            Self::Gaussian { .. } => "gaussian",
            Self::Laplace { .. } => "laplace",
            Self::Uniform { .. } => "uniform",
        }
    }

    /// Real value of the transform; the imaginary part is identically zero.
    pub fn cf_re(&self, t: f64) -> f64 {
        match *self {
            Self::SymChi2 { k } => {
                let base = 1.0 + 4.0 * t * t;
                let v = match k {
                    1 => 1.0 / base.sqrt(),
                    2 => 1.0 / base,
                    _ => base.powf(-0.5 * f64::from(k)),
                };
                INV_SQRT_2PI * v
            }
            Self::Cauchy { gamma } => INV_SQRT_2PI * (-gamma * t.abs()).exp(),
            Self::Gaussian { sigma } => INV_SQRT_2PI * (-0.5 * sigma * sigma * t * t).exp(),
            Self::Laplace { b } => INV_SQRT_2PI / (1.0 + b * b * t * t),
            Self::Uniform { b } => {
                if t == 0.0 {
                    return INV_SQRT_2PI;
                }
                let u = (b / PI) * t;
                INV_SQRT_2PI * sin_pi(u) / (PI * u)
            }
        }
    }

    pub fn cf(&self, t: f64) -> Complex64 {
        Complex64::new(self.cf_re(t), 0.0)
    }

    /// `ln |cf(t)|` in closed form, finite far beyond where `cf` underflows.
    pub fn ln_abs_cf(&self, t: f64) -> f64 {
        match *self {
            Self::SymChi2 { k } => -LN_SQRT_2PI - 0.5 * f64::from(k) * (4.0 * t * t).ln_1p(),
            Self::Cauchy { gamma } => -LN_SQRT_2PI - gamma * t.abs(),
            Self::Gaussian { sigma } => -LN_SQRT_2PI - 0.5 * sigma * sigma * t * t,
            Self::Laplace { b } => -LN_SQRT_2PI - (b * b * t * t).ln_1p(),
            Self::Uniform { .. } => self.cf_re(t).abs().ln(),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            Self::SymChi2 { k } => {
                // Variance-gamma with shape θ = k/2 and rate λ = 1/2.
                let lambda = 0.5;
                let nu = 0.5 * f64::from(k) - 0.5;
                let norm = lambda / (PI.sqrt() * gamma_half(k));
                let z = lambda * x.abs();
                if z == 0.0 {
                    return if k == 1 { f64::INFINITY } else { norm * 0.5 * gamma_half(k - 1) };
                }
                norm * (0.5 * z).powf(nu) * bessel_k(nu, z)
            }
            Self::Cauchy { gamma } => gamma / (PI * (gamma * gamma + x * x)),
            Self::Gaussian { sigma } => INV_SQRT_2PI / sigma * (-0.5 * (x / sigma).powi(2)).exp(),
            Self::Laplace { b } => (-x.abs() / b).exp() / (2.0 * b),
            Self::Uniform { b } => {
                if x.abs() <= b {
                    0.5 / b
                } else {
                    0.0
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(count);
        match *self {
            Self::SymChi2 { k } => {
                let chi = ChiSquared::new(f64::from(k)).expect("k >= 1");
                out.extend((0..count).map(|_| chi.sample(rng) - chi.sample(rng)));
            }
            Self::Cauchy { gamma } => {
                out.extend((0..count).map(|_| {
                    let u: f64 = Open01.sample(rng);
                    gamma * (PI * (u - 0.5)).tan()
                }));
            }
            Self::Gaussian { sigma } => {
                let n = Normal::new(0.0, sigma).expect("sigma > 0");
                out.extend((0..count).map(|_| n.sample(rng)));
            }
            Self::Laplace { b } => {
                out.extend((0..count).map(|_| {
                    let (e1, e2): (f64, f64) = (Exp1.sample(rng), Exp1.sample(rng));
                    b * (e1 - e2)
                }));
            }
            Self::Uniform { b } => {
                out.extend((0..count).map(|_| b * (2.0 * rng.random::<f64>() - 1.0)));
            }
        }
        out
    }

    pub fn decay_candidate(&self) -> DecayCandidate {
        match *self {
            Self::SymChi2 { k } => DecayCandidate::Ordinary(f64::from(k)),
            Self::Cauchy { .. } => DecayCandidate::Super(0.5),
            Self::Gaussian { .. } => DecayCandidate::Super(1.0),
            Self::Laplace { .. } => DecayCandidate::Ordinary(2.0),
            Self::Uniform { .. } => DecayCandidate::Ordinary(1.0),
        }
    }

    /// The transform sampled on `grid`, tagged hermitian.
    pub fn spectrum(&self, grid: FrequencyGrid) -> SpectralFunction {
        SpectralFunction::from_real_even(grid, |t| self.cf_re(t))
    }
}

impl fmt::Display for DensityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::SymChi2 { k } => write!(f, "sym_chi2:k={k}"),
            Self::Cauchy { gamma } => write!(f, "cauchy:gamma={gamma}"),
            Self::Gaussian { sigma } => write!(f, "gaussian:sigma={sigma}"),
            Self::Laplace { b } => write!(f, "laplace:b={b}"),
            Self::Uniform { b } => write!(f, "uniform:b={b}"),
        }
    }
}

impl FromStr for DensityModel {
    type Err = DeconvError;

    /// Grammar: `name ':' key=value (',' key=value)*`.
    fn from_str(spec: &str) -> Result<Self> {
        let bad = |reason: String| DeconvError::ModelSpec { spec: spec.to_string(), reason };
        let (name, args) = spec.trim().split_once(':').ok_or_else(|| bad("missing ':'".into()))?;
        let mut pairs = Vec::new();
        for item in args.split(',') {
            let (k, v) = item.split_once('=').ok_or_else(|| bad(format!("`{item}` is not key=value")))?;
            let v: f64 = v.trim().parse().map_err(|_| bad(format!("`{v}` is not a number")))?;
            pairs.push((k.trim(), v));
        }
        let single = |key: &str| -> Result<f64> {
            match pairs.as_slice() {
                [(k, v)] if *k == key => Ok(*v),
                _ => Err(bad(format!("{} takes exactly `{key}`", name.trim()))),
            }
        };
        let model = match name.trim() {
            "sym_chi2" => {
                let k = single("k")?;
                if k.fract() != 0.0 || !(1.0..=1e6).contains(&k) {
                    return Err(bad("k must be a positive integer".into()));
                }
                sym_chi2(k as u32)
            }
            "cauchy" => cauchy(single("gamma")?),
            "gaussian" => gaussian(single("sigma")?),
            "laplace" => laplace(single("b")?),
            "uniform" => uniform(single("b")?),
            other => return Err(bad(format!("unknown model `{other}`"))),
        };
        model.map_err(|e| bad(e.to_string()))
    }
}

/// Smallest `d` such that `d <= q(t) <= 1/d` for all sampled `q`.
fn envelope(qs: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = qs.fold((f64::INFINITY, 0.0f64), |(lo, hi), q| (lo.min(q), hi.max(q)));
    if !(lo > 0.0) || !hi.is_finite() {
        return 0.0;
    }
    lo.min(1.0 / hi).min(1.0)
}

const CLASSIFY_FLOOR: f64 = 1e-8;
/// Nodes with `|t|` below this are skipped for the supersmooth envelope.
const SUPER_EXCLUSION: f64 = 1.0;

/// Checks the catalog's decay candidate against the grid and reports the
/// tightest empirical constant `d`.
pub fn classify_smoothness(m: &DensityModel, grid: &FrequencyGrid) -> SmoothnessTag {
    let nonneg = (grid.center()..grid.n_points()).map(|j| grid.node(j));
    match m.decay_candidate() {
        DecayCandidate::Ordinary(a) => {
            let d = envelope(nonneg.map(|t| (a * (t * t).ln_1p() + 2.0 * m.ln_abs_cf(t)).exp()));
            if d > CLASSIFY_FLOOR {
                SmoothnessTag::Ordinary { a, d }
            } else {
                SmoothnessTag::Unclassified
            }
        }
        DecayCandidate::Super(a) => {
            let d = envelope(
                nonneg
                    .filter(|t| *t >= SUPER_EXCLUSION)
                    .map(|t| (1.0 + t * t).powf(a) / (2.0 * m.ln_abs_cf(t)).abs()),
            );
            if d > CLASSIFY_FLOOR {
                SmoothnessTag::Super { a, d }
            } else {
                SmoothnessTag::Unclassified
            }
        }
    }
}

/// `‖m‖_p²` on nested grids; `Divergent` when the integral keeps growing.
pub fn sobolev_membership(m: &DensityModel, p: f64) -> Result<NestedIntegral> {
    if !(p >= 0.0) {
        return Err(param("p", format!("must be nonnegative, got {p}")));
    }
    Ok(nested_probe(|t| (p * (t * t).ln_1p() + 2.0 * m.ln_abs_cf(t)).exp()))
}

/// Signal and noise models for `Y = X + ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvolutionPair {
    pub x: DensityModel,
    pub eps: DensityModel,
}

pub fn convolve(x: DensityModel, eps: DensityModel) -> ConvolutionPair {
    ConvolutionPair { x, eps }
}

impl ConvolutionPair {
    pub fn y_cf_re(&self, t: f64) -> f64 {
        SQRT_2PI * self.x.cf_re(t) * self.eps.cf_re(t)
    }

    pub fn y_cf(&self, t: f64) -> Complex64 {
        Complex64::new(self.y_cf_re(t), 0.0)
    }

    pub fn y_spectrum(&self, grid: FrequencyGrid) -> SpectralFunction {
        SpectralFunction::from_real_even(grid, |t| self.y_cf_re(t))
    }

    /// `n` draws of `X + ε`: all `X` first, then all `ε`, from the same stream.
    pub fn sample_y<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        let mut y = self.x.sample(rng, n);
        let e = self.eps.sample(rng, n);
        y.iter_mut().zip(e).for_each(|(a, b)| *a += b);
        y
    }
}
