//! Empirical transforms, kernel density spectra and the cut-off estimators.
//!
//! The kernel estimate `f̂_Y(y) = (nh)^{-1} Σ K((Y_j - y)/h)` has transform
//! `√(2π)·FK(ht)·ecf_Y(t)` when `K` is symmetric: substitute `u = (Y_j - y)/h`
//! in each term to get `(2π)^{-1/2} e^{-itY_j} ∫ e^{ithu} K(u) du
//! = e^{-itY_j} FK(ht)`, then average. No spatial grid is involved.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{param, DeconvError, Result};
use crate::spectral::{FrequencyGrid, SobolevWeight, SpectralFunction, INV_SQRT_2PI, SQRT_2PI};

/// Symmetric kernels with real transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelSpec {
    /// `FK = (2π)^{-1/2} 1[|t| <= 1]`.
    Sinc,
    /// `FK = (2π)^{-1/2} exp(-t²/2)`.
    Gaussian,
    /// `FK = (2π)^{-1/2} (1 - t⁴) 1[|t| <= 1]`.
    Quartic,
}

impl KernelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Sinc => "sinc",
            Self::Gaussian => "gaussian",
            Self::Quartic => "quartic",
        }
    }

    pub fn ft(&self, t: f64) -> f64 {
        INV_SQRT_2PI * (1.0 - self.one_minus_scaled_ft(t))
    }

    /// `1 - √(2π)·FK(t)` without cancellation near 0.
    pub fn one_minus_scaled_ft(&self, t: f64) -> f64 {
        match self {
            Self::Sinc => {
                if t.abs() <= 1.0 {
                    0.0
                } else {
                    1.0
                }
            }
            Self::Gaussian => -(-0.5 * t * t).exp_m1(),
            Self::Quartic => {
                if t.abs() <= 1.0 {
                    t.powi(4)
                } else {
                    1.0
                }
            }
        }
    }

    /// Class order `r`; the sinc kernel belongs to every class.
    pub fn order(&self) -> f64 {
        match self {
            Self::Sinc => f64::INFINITY,
            Self::Gaussian => 2.0,
            Self::Quartic => 4.0,
        }
    }

    /// `lim |1 - √(2π) FK(t)| / |t|^r` at the kernel's own order.
    pub fn kappa_r(&self) -> f64 {
        match self {
            Self::Sinc => 0.0,
            Self::Gaussian => 0.5,
            Self::Quartic => 1.0,
        }
    }

    pub fn support_radius(&self) -> Option<f64> {
        match self {
            Self::Sinc | Self::Quartic => Some(1.0),
            Self::Gaussian => None,
        }
    }

    /// Whether the kernel lies in the class of order `r`.
    pub fn covers_order(&self, r: f64) -> bool {
        r <= self.order()
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelSpec {
    type Err = DeconvError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sinc" => Ok(Self::Sinc),
            "gaussian" => Ok(Self::Gaussian),
            "quartic" => Ok(Self::Quartic),
            other => Err(param("kernel", format!("unknown kernel `{other}`"))),
        }
    }
}

/// `h = c·n^{-1/(2r+1)}`.
pub fn bandwidth_rule(n: usize, r: f64, c: f64) -> Result<f64> {
    if n == 0 {
        return Err(param("n", "sample size must be positive"));
    }
    if !(r > 0.0) {
        return Err(param("r", "kernel order must be positive"));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(param("c", "bandwidth constant must be positive"));
    }
    Ok(c * (n as f64).powf(-1.0 / (2.0 * r + 1.0)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EcfEstimate {
    pub spectrum: SpectralFunction,
    pub m: usize,
}

const RESYNC: usize = 32;

/// Phase sums `S_k = Σ_j exp(-i k dt x_j)` for `k = 0..len`.
///
/// Phases advance by complex multiplication and are reset from an exact
/// `sin_cos` every few steps, four samples at a time.
pub(crate) fn phase_sums(samples: &[f64], dt: f64, len: usize) -> Vec<Complex64> {
    let mut sums = vec![Complex64::new(0.0, 0.0); len];
    let exact = |x: f64, k: usize| {
        let (s, c) = (k as f64 * dt * x).sin_cos();
        Complex64::new(c, -s)
    };
    let mut chunks = samples.chunks_exact(4);
    for c in &mut chunks {
        let steps = [exact(c[0], 1), exact(c[1], 1), exact(c[2], 1), exact(c[3], 1)];
        let mut z = [Complex64::new(1.0, 0.0); 4];
        for (k, acc) in sums.iter_mut().enumerate() {
            if k % RESYNC == 0 && k > 0 {
                for i in 0..4 {
                    z[i] = exact(c[i], k);
                }
            }
            *acc += (z[0] + z[1]) + (z[2] + z[3]);
            for i in 0..4 {
                z[i] *= steps[i];
            }
        }
    }
    for &x in chunks.remainder() {
        let step = exact(x, 1);
        let mut z = Complex64::new(1.0, 0.0);
        for (k, acc) in sums.iter_mut().enumerate() {
            if k % RESYNC == 0 && k > 0 {
                z = exact(x, k);
            }
            *acc += z;
            z *= step;
        }
    }
    sums
}

/// Rounding can leave an average of unit phasors a few ulps outside the disk.
fn within_bound(mut v: Complex64) -> Complex64 {
    while v.norm() > INV_SQRT_2PI {
        v *= 1.0 - f64::EPSILON;
    }
    v
}

/// Empirical transform restricted to `|k| <= active`, zero beyond.
pub(crate) fn ecf_active(samples: &[f64], grid: FrequencyGrid, active: usize) -> Result<SpectralFunction> {
    if samples.is_empty() {
        return Err(DeconvError::EmptySample);
    }
    let active = active.min(grid.half());
    let scale = INV_SQRT_2PI / samples.len() as f64;
    let sums = phase_sums(samples, grid.dt(), active + 1);
    let c = grid.center();
    let mut values = vec![Complex64::new(0.0, 0.0); grid.n_points()];
    values[c] = Complex64::new(INV_SQRT_2PI, 0.0);
    for (k, s) in sums.iter().enumerate().skip(1) {
        let v = within_bound(s * scale);
        values[c + k] = v;
        values[c - k] = v.conj();
    }
    Ok(SpectralFunction::new(grid, values)?.assume_hermitian(true))
}

/// `(m√(2π))^{-1} Σ exp(-itε_j)` at every node.
pub fn ecf(samples: &[f64], grid: FrequencyGrid) -> Result<EcfEstimate> {
    Ok(EcfEstimate { spectrum: ecf_active(samples, grid, grid.half())?, m: samples.len() })
}

/// Empirical transform at arbitrary frequencies, by direct summation.
pub fn ecf_at(samples: &[f64], points: &[f64]) -> Result<Vec<Complex64>> {
    if samples.is_empty() {
        return Err(DeconvError::EmptySample);
    }
    let scale = INV_SQRT_2PI / samples.len() as f64;
    Ok(points
        .iter()
        .map(|&t| {
            if t == 0.0 {
                return Complex64::new(INV_SQRT_2PI, 0.0);
            }
            let s: Complex64 = samples
                .iter()
                .map(|&x| {
                    let (s, c) = (t * x).sin_cos();
                    Complex64::new(c, -s)
                })
                .sum();
            within_bound(s * scale)
        })
        .collect())
}

/// Largest `k` with `FK(h·k·dt) != 0`, capped at the grid half-count.
pub fn kernel_active_half(kernel: KernelSpec, h: f64, grid: &FrequencyGrid) -> usize {
    match kernel.support_radius() {
        None => grid.half(),
        Some(_) => (0..=grid.half())
            .take_while(|&k| kernel.ft(h * k as f64 * grid.dt()) != 0.0)
            .last()
            .unwrap_or(0),
    }
}

/// Transform of the kernel density estimate, `√(2π)·FK(ht)·ecf_Y(t)`.
pub fn kde_spectrum(samples: &[f64], kernel: KernelSpec, h: f64, grid: FrequencyGrid) -> Result<SpectralFunction> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(param("h", format!("bandwidth must be positive, got {h}")));
    }
    let active = kernel_active_half(kernel, h, &grid);
    let e = ecf_active(samples, grid, active)?;
    let values = e
        .values()
        .iter()
        .zip(grid.nodes())
        .map(|(v, t)| v * (1.0 - kernel.one_minus_scaled_ft(h * t)))
        .collect();
    Ok(SpectralFunction::new(grid, values)?.assume_hermitian(true))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    KnownEps,
    EstimatedEps,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::KnownEps => "known_eps",
            Self::EstimatedEps => "estimated_eps",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeconvEstimate {
    pub spectrum: SpectralFunction,
    pub s: f64,
    pub alpha: f64,
    pub keep_mask: Vec<bool>,
    pub provenance: Provenance,
}

impl DeconvEstimate {
    pub fn mask_fraction(&self) -> f64 {
        self.keep_mask.iter().filter(|&&k| k).count() as f64 / self.keep_mask.len() as f64
    }

    /// Largest kept `|t|` when the mask is one symmetric interval.
    pub fn interval_edge(&self) -> Option<f64> {
        let g = self.spectrum.grid();
        let c = g.center();
        let run = (0..=g.half()).take_while(|&k| self.keep_mask[c + k]).count();
        if run == 0 {
            return None;
        }
        let contiguous = (0..g.n_points()).all(|j| self.keep_mask[j] == ((j as isize - c as isize).unsigned_abs() < run));
        contiguous.then(|| g.node(c + run - 1))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(param("alpha", format!("threshold must be positive, got {alpha}")))
    }
}

/// Nodes where `|e(t)|² / ℓ_s(t)² >= α`; ties are kept.
pub fn keep_mask(e: &SpectralFunction, w: SobolevWeight, alpha: f64) -> Vec<bool> {
    let g = e.grid();
    e.values()
        .iter()
        .enumerate()
        .map(|(j, v)| v.norm_sqr() / w.eval_sq(g.node(j)) >= alpha)
        .collect()
}

/// The noiseless target: `Ff_X` cut where `|Ff_ε/ℓ_s|² < α`.
pub fn regularized_target(x_cf: &SpectralFunction, eps_cf: &SpectralFunction, s: f64, alpha: f64) -> Result<DeconvEstimate> {
    check_alpha(alpha)?;
    x_cf.ensure_same_grid(eps_cf)?;
    let mask = keep_mask(eps_cf, SobolevWeight::new(s)?, alpha);
    let values = x_cf
        .values()
        .iter()
        .zip(&mask)
        .map(|(v, &k)| if k { *v } else { Complex64::new(0.0, 0.0) })
        .collect();
    let spectrum = SpectralFunction::new(*x_cf.grid(), values)?.assume_hermitian(x_cf.is_hermitian() && eps_cf.is_hermitian());
    Ok(DeconvEstimate { spectrum, s, alpha, keep_mask: mask, provenance: Provenance::KnownEps })
}

fn cut_off_inverse(
    y: &SpectralFunction,
    e: &SpectralFunction,
    s: f64,
    alpha: f64,
    provenance: Provenance,
) -> Result<DeconvEstimate> {
    check_alpha(alpha)?;
    y.ensure_same_grid(e)?;
    let mask = keep_mask(e, SobolevWeight::new(s)?, alpha);
    let values = y
        .values()
        .iter()
        .zip(e.values())
        .zip(&mask)
        .map(|((yv, ev), &k)| {
            if k {
                yv * ev.conj() / (SQRT_2PI * ev.norm_sqr())
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let spectrum = SpectralFunction::new(*y.grid(), values)?.assume_hermitian(y.is_hermitian() && e.is_hermitian());
    Ok(DeconvEstimate { spectrum, s, alpha, keep_mask: mask, provenance })
}

/// Cut-off inversion with the true error transform.
pub fn deconv_known(y_spectrum: &SpectralFunction, eps_cf: &SpectralFunction, s: f64, alpha: f64) -> Result<DeconvEstimate> {
    cut_off_inverse(y_spectrum, eps_cf, s, alpha, Provenance::KnownEps)
}

/// Cut-off inversion with the empirical error transform in place of the true one.
pub fn deconv_unknown(y_spectrum: &SpectralFunction, eps_ecf: &EcfEstimate, s: f64, alpha: f64) -> Result<DeconvEstimate> {
    cut_off_inverse(y_spectrum, &eps_ecf.spectrum, s, alpha, Provenance::EstimatedEps)
}

/// Transform of the `k`-th derivative. Under the `exp(-itx)` forward kernel
/// integration by parts gives the multiplier `(it)^k`.
pub fn derivative_spectrum(est: &DeconvEstimate, k: u32) -> Result<SpectralFunction> {
    if f64::from(k) > est.s {
        return Err(DeconvError::DerivativeBeyondIndex { k, s: est.s });
    }
    let unit = match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    let g = *est.spectrum.grid();
    let values = est
        .spectrum
        .values()
        .iter()
        .zip(g.nodes())
        .map(|(v, t)| v * unit * t.powi(k as i32))
        .collect();
    Ok(SpectralFunction::new(g, values)?.assume_hermitian(est.spectrum.is_hermitian()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{gaussian, laplace, sym_chi2};
    use crate::spectral::{inverse_transform_at, make_grid};
    use proptest::prelude::*;

    fn direct_ecf(samples: &[f64], t: f64) -> Complex64 {
        let s: Complex64 = samples.iter().map(|&x| Complex64::new((t * x).cos(), -(t * x).sin())).sum();
        s * INV_SQRT_2PI / samples.len() as f64
    }

    #[test]
    fn single_point_samples() {
        let g = make_grid(8.0, 257).unwrap();
        let e = ecf(&[0.0], g).unwrap();
        assert!(e.spectrum.values().iter().all(|v| (v - INV_SQRT_2PI).norm() < 1e-15));
        let c = 1.7;
        let e = ecf(&[c], g).unwrap();
        for (j, t) in g.nodes().enumerate() {
            let v = e.spectrum.at(j);
            assert!((v.norm() - INV_SQRT_2PI).abs() < 1e-14);
            assert!((v - INV_SQRT_2PI * Complex64::new((t * c).cos(), -(t * c).sin())).norm() < 1e-13);
        }
        assert!(matches!(ecf(&[], g), Err(DeconvError::EmptySample)));
    }

    #[test]
    fn recurrence_matches_direct_sum() {
        let g = FrequencyGrid::default_experiment();
        let samples = [0.3, -12.5, 1e3, 7.25, -0.001, 44.4, 3.0];
        let e = ecf(&samples, g).unwrap();
        let c = g.center();
        for k in [0, 1, 31, 32, 33, 1000, 4095, 4096] {
            let t = g.node(c + k);
            assert!((e.spectrum.at(c + k) - direct_ecf(&samples, t)).norm() < 1e-12, "k={k}");
            assert_eq!(e.spectrum.at(c - k), e.spectrum.at(c + k).conj());
        }
        assert_eq!(e.spectrum.at(c), Complex64::new(INV_SQRT_2PI, 0.0));
        let at = ecf_at(&samples, &[0.0, 0.5, 2.0]).unwrap();
        assert_eq!(at[0], Complex64::new(INV_SQRT_2PI, 0.0));
        assert!((at[2] - e.spectrum.at(c + 128)).norm() < 1e-12);
    }

    #[test]
    fn kernels_class_limits() {
        for (k, r) in [(KernelSpec::Gaussian, 2.0), (KernelSpec::Quartic, 4.0)] {
            assert!((k.ft(0.0) - INV_SQRT_2PI).abs() < 1e-16);
            let ratios: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|&t: &f64| k.one_minus_scaled_ft(t) / t.powf(r)).collect();
            for q in &ratios {
                assert!((q / k.kappa_r() - 1.0).abs() < 0.05, "{k}: {ratios:?}");
            }
            // Same limit from the plain transform, away from cancellation.
            let t: f64 = 1e-2;
            assert!(((1.0 - SQRT_2PI * k.ft(t)).abs() / t.powf(r) / k.kappa_r() - 1.0).abs() < 0.05);
        }
        for t in [1e-2, 1e-3, 1e-4] {
            assert_eq!(KernelSpec::Sinc.one_minus_scaled_ft(t), 0.0);
        }
        assert_eq!(KernelSpec::Sinc.ft(0.0), INV_SQRT_2PI);
        assert!(KernelSpec::Sinc.covers_order(4.49));
        assert!(!KernelSpec::Gaussian.covers_order(4.0));
        assert_eq!("quartic".parse::<KernelSpec>().unwrap(), KernelSpec::Quartic);
        assert!("box".parse::<KernelSpec>().is_err());
    }

    #[test]
    fn bandwidths() {
        assert!((bandwidth_rule(1024, 2.0, 1.0).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(bandwidth_rule(1, 3.3, 0.7).unwrap(), 0.7);
        assert!(bandwidth_rule(2048, 2.0, 1.0).unwrap() < bandwidth_rule(1024, 2.0, 1.0).unwrap());
        assert!(bandwidth_rule(0, 2.0, 1.0).is_err());
        assert!(bandwidth_rule(10, 2.0, 0.0).is_err());
    }

    #[test]
    fn kde_spectrum_examples() {
        let g = make_grid(16.0, 1025).unwrap();
        let samples = [0.1, -0.4, 2.2, 0.9];
        let e = ecf(&samples, g).unwrap();
        let tiny = kde_spectrum(&samples, KernelSpec::Gaussian, 1e-9, g).unwrap();
        assert!(tiny.values().iter().zip(e.spectrum.values()).all(|(a, b)| (a - b).norm() < 1e-14));
        let sinc = kde_spectrum(&samples, KernelSpec::Sinc, 0.25, g).unwrap();
        for (j, t) in g.nodes().enumerate() {
            if t.abs() > 4.0 {
                assert_eq!(sinc.at(j), Complex64::new(0.0, 0.0));
            } else {
                assert_eq!(sinc.at(j), e.spectrum.at(j));
            }
        }
        assert!(kde_spectrum(&samples, KernelSpec::Sinc, 0.0, g).is_err());
        assert!(kde_spectrum(&[], KernelSpec::Sinc, 1.0, g).is_err());
    }

    #[test]
    fn target_extremes_and_gaussian_edge() {
        let g = FrequencyGrid::default_experiment();
        let x = laplace(1.0).unwrap().spectrum(g);
        let e = gaussian(1.0).unwrap().spectrum(g);
        let none = regularized_target(&x, &e, 0.0, 0.2).unwrap();
        assert!(none.keep_mask.iter().all(|k| !k));
        assert!(none.spectrum.values().iter().all(|v| v.norm() == 0.0));
        let l = sym_chi2(2).unwrap().spectrum(g);
        let all = regularized_target(&x, &l, 0.0, 1e-300).unwrap();
        assert_eq!(all.spectrum, x);
        // (2π)^{-1} exp(-t²) = α at the edge.
        let alpha = 1e-3;
        let est = regularized_target(&x, &e, 0.0, alpha).unwrap();
        let edge = (-(2.0 * std::f64::consts::PI * alpha).ln()).sqrt();
        let got = est.interval_edge().unwrap();
        assert!(got <= edge && edge - got < g.dt());
        assert!(regularized_target(&x, &e, 0.0, 0.0).is_err());
        let other = laplace(1.0).unwrap().spectrum(make_grid(64.0, 4097).unwrap());
        assert!(matches!(regularized_target(&other, &e, 0.0, 0.1), Err(DeconvError::GridMismatch)));
    }

    #[test]
    fn known_estimator_on_exact_spectrum() {
        let g = FrequencyGrid::default_experiment();
        let x = sym_chi2(3).unwrap();
        let eps = laplace(1.0).unwrap();
        let y = crate::models::convolve(x, eps).y_spectrum(g);
        let ec = eps.spectrum(g);
        for s in [0.0, 0.5, 1.0] {
            let a = deconv_known(&y, &ec, s, 1e-4).unwrap();
            let b = regularized_target(&x.spectrum(g), &ec, s, 1e-4).unwrap();
            assert_eq!(a.keep_mask, b.keep_mask);
            for (u, v) in a.spectrum.values().iter().zip(b.spectrum.values()) {
                assert!((u - v).norm() <= 1e-12 * v.norm());
            }
        }
        let zero = deconv_known(&SpectralFunction::zeros(g), &ec, 0.0, 1e-3).unwrap();
        assert!(zero.spectrum.values().iter().all(|v| v.norm() == 0.0));
        assert!(deconv_known(&y, &ec, 0.0, -1.0).is_err());
    }

    #[test]
    fn unknown_estimator_degenerate_cases() {
        let g = make_grid(32.0, 2049).unwrap();
        let y = crate::models::convolve(gaussian(1.0).unwrap(), gaussian(0.5).unwrap()).y_spectrum(g);
        let point = ecf(&[0.0; 5], g).unwrap();
        let est = deconv_unknown(&y, &point, 0.0, 1e-3).unwrap();
        assert!(est.keep_mask.iter().all(|&k| k));
        for (u, v) in est.spectrum.values().iter().zip(y.values()) {
            assert!((u - v).norm() < 1e-15);
        }
        let noisy = ecf(&[0.3, -1.0, 2.0], g).unwrap();
        let empty = deconv_unknown(&y, &noisy, 0.0, 0.16).unwrap();
        assert!(empty.keep_mask.iter().all(|k| !k));
        assert_eq!(empty.provenance, Provenance::EstimatedEps);
    }

    #[test]
    fn derivatives() {
        let g = make_grid(40.0, 4097).unwrap();
        let x = gaussian(1.0).unwrap().spectrum(g);
        let est = regularized_target(&x, &x, 1.0, 1e-40).unwrap();
        assert_eq!(derivative_spectrum(&est, 0).unwrap(), est.spectrum);
        let d1 = derivative_spectrum(&est, 1).unwrap();
        assert_eq!(d1.at(g.center()), Complex64::new(0.0, 0.0));
        let v = inverse_transform_at(&d1, &[0.0, 1.0]).unwrap();
        assert!(v[0].abs() < 1e-12);
        // φ'(1) = -φ(1).
        assert!((v[1] + INV_SQRT_2PI * (-0.5f64).exp()).abs() < 1e-9);
        assert!(matches!(derivative_spectrum(&est, 2), Err(DeconvError::DerivativeBeyondIndex { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn mask_zero_coupling(samples in prop::collection::vec(-20.0f64..20.0, 1..40), la in -12.0f64..-1.0, s in 0.0f64..2.0) {
            let g = make_grid(8.0, 513).unwrap();
            let e = ecf(&samples, g).unwrap();
            let y = crate::models::convolve(laplace(1.0).unwrap(), gaussian(1.0).unwrap()).y_spectrum(g);
            let alpha = 10f64.powf(la);
            let est = deconv_unknown(&y, &e, s, alpha).unwrap();
            let w = SobolevWeight::new(s).unwrap();
            for (j, t) in g.nodes().enumerate() {
                let keep = e.spectrum.at(j).norm_sqr() / w.eval_sq(t) >= alpha;
                prop_assert_eq!(est.keep_mask[j], keep);
                if !keep {
                    prop_assert_eq!(est.spectrum.at(j), Complex64::new(0.0, 0.0));
                }
            }
            prop_assert!(est.spectrum.hermitian_deviation() == 0.0);
        }

        #[test]
        fn ecf_modulus_bound(samples in prop::collection::vec(-1e4f64..1e4, 1..60)) {
            let g = make_grid(64.0, 8193).unwrap();
            let e = ecf(&samples, g).unwrap();
            prop_assert_eq!(e.spectrum.at(g.center()), Complex64::new(INV_SQRT_2PI, 0.0));
            for v in e.spectrum.values() {
                prop_assert!(v.norm() <= INV_SQRT_2PI + 1e-14);
            }
        }
    }
}
