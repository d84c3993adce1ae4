//! Frequency grids, Sobolev weights and trapezoid norms on the Fourier line.
//!
//! Transforms are unitary with forward kernel `exp(-itx)`:
//! `Fg(t) = (2π)^{-1/2} ∫ exp(-itx) g(x) dx`, so a density has `Fg(0) = (2π)^{-1/2}`.

use num_complex::Complex64;

use crate::error::{param, DeconvError, Result};

pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Symmetric uniform grid `t_k = k·dt`, `k = -half..=half`.
///
/// Nodes are produced from the integer offset, so `t(-k) == -t(k)` holds
/// bitwise and `t = 0` is always a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    dt: f64,
    half: usize,
}

impl FrequencyGrid {
    pub fn new(t_max: f64, n_points: usize) -> Result<Self> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(DeconvError::InvalidGrid(format!("t_max must be positive, got {t_max}")));
        }
        if n_points < 3 || n_points % 2 == 0 {
            return Err(DeconvError::InvalidGrid(format!(
                "n_points must be odd and at least 3, got {n_points}"
            )));
        }
        let half = (n_points - 1) / 2;
        Self::from_spacing(t_max / half as f64, half)
    }

    pub fn from_spacing(dt: f64, half: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(DeconvError::InvalidGrid(format!("spacing must be positive, got {dt}")));
        }
        if half == 0 {
            return Err(DeconvError::InvalidGrid("grid needs at least 3 nodes".into()));
        }
        Ok(Self { dt, half })
    }

    /// The experiment default: `T = 64`, `N = 8193`, `dt = 2^-6`.
    pub fn default_experiment() -> Self {
        Self { dt: 1.0 / 64.0, half: 4096 }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn half(&self) -> usize {
        self.half
    }

    pub fn n_points(&self) -> usize {
        2 * self.half + 1
    }

    pub fn t_max(&self) -> f64 {
        self.half as f64 * self.dt
    }

    /// Index of the `t = 0` node.
    pub fn center(&self) -> usize {
        self.half
    }

    pub fn node(&self, j: usize) -> f64 {
        (j as f64 - self.half as f64) * self.dt
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points()).map(move |j| self.node(j))
    }

    /// Composite trapezoid weight of node `j`.
    pub fn weight(&self, j: usize) -> f64 {
        if j == 0 || j + 1 == self.n_points() {
            0.5 * self.dt
        } else {
            self.dt
        }
    }

    /// Same spacing, fewer nodes: `|k| <= half`.
    pub fn truncated(&self, half: usize) -> Result<Self> {
        if half > self.half {
            return Err(DeconvError::InvalidGrid(format!(
                "cannot truncate {} half-nodes to {half}",
                self.half
            )));
        }
        Self::from_spacing(self.dt, half)
    }

    /// Same spacing, `factor` times the half-width.
    pub fn widened(&self, factor: usize) -> Self {
        Self { dt: self.dt, half: self.half * factor }
    }

    /// Index of the node equal to `t`, if `t` is a node.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let k = (t / self.dt).round();
        if k.abs() > self.half as f64 {
            return None;
        }
        let j = (k + self.half as f64) as usize;
        (self.node(j) == t).then_some(j)
    }
}

pub fn make_grid(t_max: f64, n_points: usize) -> Result<FrequencyGrid> {
    FrequencyGrid::new(t_max, n_points)
}

/// `ℓ_s(t) = (1 + t²)^{s/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevWeight(f64);

impl SobolevWeight {
    pub fn new(s: f64) -> Result<Self> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(param("s", format!("Sobolev index must be nonnegative, got {s}")));
        }
        Ok(Self(s))
    }

    pub fn zero() -> Self {
        Self(0.0)
    }

    pub fn s(&self) -> f64 {
        self.0
    }

    pub fn eval(&self, t: f64) -> f64 {
        if self.0 == 0.0 {
            1.0
        } else {
            (1.0 + t * t).powf(0.5 * self.0)
        }
    }

    /// `ℓ_s(t)²`, computed without a square root.
    pub fn eval_sq(&self, t: f64) -> f64 {
        if self.0 == 0.0 {
            1.0
        } else {
            (1.0 + t * t).powf(self.0)
        }
    }
}

pub fn sobolev_weight_eval(w: SobolevWeight, t: f64) -> f64 {
    w.eval(t)
}

/// Complex samples of a transform on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
    hermitian: bool,
}

const HERMITIAN_TOL: f64 = 1e-12;

impl SpectralFunction {
    pub fn new(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(DeconvError::InvalidGrid(format!(
                "{} values for {} nodes",
                values.len(),
                grid.n_points()
            )));
        }
        Ok(Self { grid, values, hermitian: false })
    }

    pub fn zeros(grid: FrequencyGrid) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.n_points()], hermitian: true }
    }

    pub fn from_fn(grid: FrequencyGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes().map(f).collect();
        Self { grid, values, hermitian: false }
    }

    /// Samples a real even function; the result is hermitian by construction.
    pub fn from_real_even(grid: FrequencyGrid, f: impl Fn(f64) -> f64) -> Self {
        let h = grid.half();
        let mut values = vec![Complex64::new(0.0, 0.0); grid.n_points()];
        for k in 0..=h {
            let v = Complex64::new(f(grid.node(h + k)), 0.0);
            values[h + k] = v;
            values[h - k] = v;
        }
        Self { grid, values, hermitian: true }
    }

    /// Marks the function as the transform of a real function after checking
    /// `f(-t) = conj f(t)` at every node.
    pub fn into_hermitian(mut self) -> Result<Self> {
        let dev = self.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(DeconvError::NonHermitian(dev));
        }
        self.hermitian = true;
        Ok(self)
    }

    pub(crate) fn assume_hermitian(mut self, flag: bool) -> Self {
        self.hermitian = flag;
        self
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.values.len();
        (0..n)
            .map(|j| (self.values[j] - self.values[n - 1 - j].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at(&self, j: usize) -> Complex64 {
        self.values[j]
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
            hermitian: self.hermitian,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.ensure_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(DeconvError::GridMismatch)
        }
    }

    /// Restriction to the nodes of a narrower grid with the same spacing.
    pub fn restrict(&self, grid: FrequencyGrid) -> Result<Self> {
        if grid.dt() != self.grid.dt() || grid.half() > self.grid.half() {
            return Err(DeconvError::GridMismatch);
        }
        let off = self.grid.half() - grid.half();
        Ok(Self {
            grid,
            values: self.values[off..off + grid.n_points()].to_vec(),
            hermitian: self.hermitian,
        })
    }
}

/// Trapezoid approximation of `∫ ℓ_s(t)² |f(t)|² dt` over the grid.
pub fn weighted_l2_norm_sq(f: &SpectralFunction, w: SobolevWeight) -> f64 {
    let g = f.grid();
    f.values()
        .iter()
        .enumerate()
        .map(|(j, v)| g.weight(j) * w.eval_sq(g.node(j)) * v.norm_sqr())
        .sum()
}

/// Richardson estimate `|I_h - I_2h| / 3` of the trapezoid error, using every
/// other node for the coarse rule. Needs an even half-count.
pub fn trapezoid_error_estimate(f: &SpectralFunction, w: SobolevWeight) -> Result<f64> {
    let g = f.grid();
    if g.half() % 2 != 0 {
        return Err(DeconvError::InvalidGrid("coarse rule needs an even half-count".into()));
    }
    let coarse = FrequencyGrid::from_spacing(2.0 * g.dt(), g.half() / 2)?;
    let coarse_sum: f64 = (0..coarse.n_points())
        .map(|j| {
            let v = f.at(2 * j);
            coarse.weight(j) * w.eval_sq(coarse.node(j)) * v.norm_sqr()
        })
        .sum();
    Ok((weighted_l2_norm_sq(f, w) - coarse_sum).abs() / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailCheck {
    pub passed: bool,
    /// Share of the weighted norm carried by nodes with `|t| >= 0.9 T`.
    pub fraction: f64,
}

pub fn tail_check(f: &SpectralFunction, w: SobolevWeight, tol: f64) -> Result<TailCheck> {
    if !(tol > 0.0) {
        return Err(param("tol", "must be positive"));
    }
    let g = f.grid();
    let edge = 0.9 * g.t_max();
    let (mut tail, mut total) = (0.0, 0.0);
    for (j, v) in f.values().iter().enumerate() {
        let t = g.node(j);
        let c = g.weight(j) * w.eval_sq(t) * v.norm_sqr();
        total += c;
        if t.abs() >= edge {
            tail += c;
        }
    }
    let fraction = if total > 0.0 { tail / total } else { 0.0 };
    Ok(TailCheck { passed: fraction < tol, fraction })
}

/// Half-widths of the nested divergence probe, all at spacing `2^-6`.
pub const PROBE_HALF_WIDTHS: [f64; 3] = [64.0, 128.0, 256.0];
pub const PROBE_DT: f64 = 1.0 / 64.0;
/// Relative growth over the last doubling above which an integral is divergent.
pub const DIVERGENCE_GROWTH: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NestedIntegral {
    Finite(f64),
    Divergent { partials: [f64; 3] },
}

impl NestedIntegral {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Self::Finite(v) => Some(v),
            Self::Divergent { .. } => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }
}

/// Trapezoid integrals of an even integrand over `[-T, T]` for each probe
/// half-width; divergent if the last doubling adds more than 1%.
pub fn nested_probe(f: impl Fn(f64) -> f64) -> NestedIntegral {
    let per_unit = (1.0 / PROBE_DT).round() as usize;
    let mut partials = [0.0; 3];
    let mut inner = 0.0;
    let mut k = 1usize;
    for (slot, &t_max) in PROBE_HALF_WIDTHS.iter().enumerate() {
        let last = per_unit * t_max as usize;
        while k < last {
            inner += f(k as f64 * PROBE_DT);
            k += 1;
        }
        let edge = f(last as f64 * PROBE_DT);
        partials[slot] = PROBE_DT * (f(0.0) + 2.0 * inner + edge);
        inner += edge;
        k = last + 1;
    }
    let [_, mid, last] = partials;
    if last.is_finite() && last <= mid * (1.0 + DIVERGENCE_GROWTH) {
        NestedIntegral::Finite(last)
    } else {
        NestedIntegral::Divergent { partials }
    }
}

const IMAG_RESIDUE_TOL: f64 = 1e-9;

/// `g(x) = (2π)^{-1/2} ∫ exp(itx) f(t) dt` by trapezoid sums at each point.
pub fn inverse_transform_at(f: &SpectralFunction, points: &[f64]) -> Result<Vec<f64>> {
    if !f.is_hermitian() {
        return Err(DeconvError::NonHermitian(f.hermitian_deviation()));
    }
    let g = f.grid();
    points
        .iter()
        .map(|&x| {
            let sum: Complex64 = f
                .values()
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let (s, c) = (g.node(j) * x).sin_cos();
                    v * Complex64::new(c, s) * g.weight(j)
                })
                .sum();
            let z = sum * INV_SQRT_2PI;
            if z.im.abs() > IMAG_RESIDUE_TOL {
                Err(DeconvError::ImaginaryResidue(z.im.abs()))
            } else {
                Ok(z.re)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss_cf(grid: FrequencyGrid, sigma: f64) -> SpectralFunction {
        SpectralFunction::from_real_even(grid, |t| INV_SQRT_2PI * (-0.5 * sigma * sigma * t * t).exp())
    }

    #[test]
    fn small_grids() {
        let g = make_grid(1.0, 3).unwrap();
        assert_eq!(g.nodes().collect::<Vec<_>>(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(g.dt(), 1.0);
        let g = make_grid(2.0, 5).unwrap();
        assert_eq!(g.nodes().collect::<Vec<_>>(), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(make_grid(64.0, 8193).unwrap().dt(), 0.015625);
        assert_eq!(make_grid(64.0, 8193).unwrap(), FrequencyGrid::default_experiment());
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(make_grid(1.0, 4).is_err());
        assert!(make_grid(0.0, 5).is_err());
        assert!(make_grid(-1.0, 5).is_err());
        assert!(make_grid(1.0, 1).is_err());
    }

    #[test]
    fn exact_symmetry() {
        let g = make_grid(37.3, 2049).unwrap();
        let n = g.n_points();
        for j in 0..n {
            assert_eq!(g.node(j), -g.node(n - 1 - j));
        }
        assert_eq!(g.node(g.center()), 0.0);
        assert_eq!(g.node(n - 1), g.t_max());
        assert!(g.nodes().zip(g.nodes().skip(1)).all(|(a, b)| b > a));
    }

    #[test]
    fn weights() {
        let w0 = SobolevWeight::zero();
        assert_eq!(sobolev_weight_eval(w0, 7.3), 1.0);
        assert_eq!(sobolev_weight_eval(SobolevWeight::new(2.0).unwrap(), 1.0), 2.0);
        let w1 = SobolevWeight::new(1.0).unwrap();
        assert!((sobolev_weight_eval(w1, 3f64.sqrt()) - 2.0).abs() < 1e-15);
        assert!(SobolevWeight::new(-0.1).is_err());
    }

    #[test]
    fn gaussian_norm_against_fine_oracle() {
        // Reference: the same integrand summed on a grid ten times finer.
        let f = gauss_cf(make_grid(40.0, 8193).unwrap(), 1.0);
        let fine = gauss_cf(make_grid(40.0, 81921).unwrap(), 1.0);
        let w = SobolevWeight::zero();
        let v = weighted_l2_norm_sq(&f, w);
        assert!((v - weighted_l2_norm_sq(&fine, w)).abs() < 1e-8);
        assert!((v - 0.5 / std::f64::consts::PI.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn norm_is_quadratic() {
        let f = gauss_cf(make_grid(10.0, 1025).unwrap(), 0.7);
        let w = SobolevWeight::new(1.5).unwrap();
        let a = weighted_l2_norm_sq(&f, w);
        let b = weighted_l2_norm_sq(&f.scale(3.0), w);
        assert!((b - 9.0 * a).abs() < 1e-13 * b);
        assert_eq!(weighted_l2_norm_sq(&SpectralFunction::zeros(*f.grid()), w), 0.0);
    }

    #[test]
    fn tails() {
        let g = make_grid(40.0, 8193).unwrap();
        let w = SobolevWeight::zero();
        let compact = SpectralFunction::from_real_even(g, |t| if t.abs() < 10.0 { 1.0 } else { 0.0 });
        let r = tail_check(&compact, w, 1e-6).unwrap();
        assert!(r.passed);
        assert_eq!(r.fraction, 0.0);
        assert!(tail_check(&gauss_cf(g, 1.0), w, 1e-6).unwrap().passed);
        let slow = SpectralFunction::from_real_even(make_grid(10.0, 2001).unwrap(), |t| {
            INV_SQRT_2PI / (1.0 + 4.0 * t * t).sqrt()
        });
        let r = tail_check(&slow, w, 1e-6).unwrap();
        assert!(!r.passed);
        // ∫_{9}^{10} dt / (1 + 4t²) over ∫_0^{10}, both sides.
        let expect = ((20f64).atan() - (18f64).atan()) / (20f64).atan();
        assert!((r.fraction - expect).abs() < 1e-2 * expect);
    }

    #[test]
    fn inverse_gaussian() {
        let f = gauss_cf(make_grid(40.0, 8193).unwrap(), 1.0);
        let v = inverse_transform_at(&f, &[0.0, 1.0]).unwrap();
        assert!((v[0] - INV_SQRT_2PI).abs() < 1e-8);
        assert!((v[1] - INV_SQRT_2PI * (-0.5f64).exp()).abs() < 1e-8);
        let z = SpectralFunction::zeros(*f.grid());
        assert_eq!(inverse_transform_at(&z, &[0.0, 2.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn inverse_needs_hermitian() {
        let g = make_grid(4.0, 65).unwrap();
        let odd = SpectralFunction::from_fn(g, |t| Complex64::new(t, 0.0));
        assert!(matches!(odd.clone().into_hermitian(), Err(DeconvError::NonHermitian(_))));
        assert!(inverse_transform_at(&odd, &[0.0]).is_err());
        let skew = SpectralFunction::from_fn(g, |t| Complex64::new(0.0, (-t * t).exp())).assume_hermitian(true);
        assert!(matches!(
            inverse_transform_at(&skew, &[0.0]),
            Err(DeconvError::ImaginaryResidue(_))
        ));
    }

    #[test]
    fn index_lookup_and_restriction() {
        let g = FrequencyGrid::default_experiment();
        assert_eq!(g.index_of(0.5), Some(g.center() + 32));
        assert_eq!(g.index_of(0.51), None);
        assert_eq!(g.index_of(65.0), None);
        let f = gauss_cf(g, 1.0);
        let r = f.restrict(g.truncated(100).unwrap()).unwrap();
        assert_eq!(r.at(r.grid().center()), f.at(g.center()));
        assert_eq!(r.grid().node(0), g.node(g.center() - 100));
    }

    #[test]
    fn nested_probe_tails() {
        // ∫ dt / (1 + t²) over the widest window is π - 2 atan(1/256).
        let v = nested_probe(|t| 1.0 / (1.0 + t * t)).value().unwrap();
        let exact = std::f64::consts::PI - 2.0 * (1.0f64 / 256.0).atan();
        assert!((v - exact).abs() < 1e-5);
        assert!(!nested_probe(|t| 1.0 / (1.0 + t.abs())).is_finite());
        assert!(!nested_probe(|_| 1.0).is_finite());
        assert!(nested_probe(|t| (-t * t).exp()).is_finite());
    }

    #[test]
    fn richardson_estimate_small_for_smooth() {
        let f = gauss_cf(make_grid(20.0, 1025).unwrap(), 1.0);
        assert!(trapezoid_error_estimate(&f, SobolevWeight::zero()).unwrap() < 1e-12);
    }
}
