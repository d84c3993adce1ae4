//! The Fourier-side KDE error must equal the spatial integrated squared error.

use deconv_core::estimators::{kde_spectrum, KernelSpec};
use deconv_core::models::{convolve, gaussian};
use deconv_core::rng::{stream, stream_id, Purpose};
use deconv_core::spectral::{weighted_l2_norm_sq, FrequencyGrid, SobolevWeight};
use std::f64::consts::PI;

#[test]
fn gaussian_kde_error_in_both_domains() {
    let pair = convolve(gaussian(1.0).unwrap(), gaussian(1.0).unwrap());
    let n = 10_000;
    let h = 0.3;
    let y = pair.sample_y(&mut stream(7, stream_id(Purpose::Data, 0, 0)), n);

    let grid = FrequencyGrid::new(32.0, 4097).unwrap();
    let spectral = weighted_l2_norm_sq(
        &kde_spectrum(&y, KernelSpec::Gaussian, h, grid).unwrap().sub(&pair.y_spectrum(grid)).unwrap(),
        SobolevWeight::zero(),
    );

    // f_Y is N(0, 2); the estimate is a mixture of N(Y_j, h²).
    let phi = |x: f64, v: f64| (-x * x / (2.0 * v)).exp() / (2.0 * PI * v).sqrt();
    let dx = 0.01;
    let spatial: f64 = (-1400..=1400)
        .map(|i| {
            let x = i as f64 * dx;
            let fhat = y.iter().map(|&yj| phi(x - yj, h * h)).sum::<f64>() / n as f64;
            (fhat - phi(x, 2.0)).powi(2)
        })
        .sum::<f64>()
        * dx;
    assert!((spectral - spatial).abs() < 1e-6 * spatial, "{spectral} vs {spatial}");
}
