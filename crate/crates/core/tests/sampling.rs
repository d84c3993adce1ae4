use deconv_core::estimators::ecf_at;
use deconv_core::models::{cauchy, gaussian, laplace, sym_chi2, uniform, DensityModel};
use deconv_core::rng::{stream, stream_id, Purpose};
use std::f64::consts::PI;

fn catalog() -> Vec<DensityModel> {
    vec![
        sym_chi2(1).unwrap(),
        sym_chi2(3).unwrap(),
        cauchy(1.0).unwrap(),
        gaussian(1.5).unwrap(),
        laplace(0.5).unwrap(),
        uniform(PI).unwrap(),
    ]
}

#[test]
fn sample_transform_tracks_closed_form() {
    let points: Vec<f64> = (0..50).map(|i| -5.0 + 10.0 * i as f64 / 49.0).collect();
    let m = 100_000;
    for (idx, model) in catalog().iter().enumerate() {
        let mut rng = stream(2024, stream_id(Purpose::Data, idx as u32, 0));
        let draws = model.sample(&mut rng, m);
        let e = ecf_at(&draws, &points).unwrap();
        for (t, v) in points.iter().zip(e) {
            let c = model.cf_re(*t);
            // Real part has variance (1 + c(2t) - 2c(t)²) / (4π m) in the unit scale.
            let c1 = (2.0 * PI).sqrt() * c;
            let c2 = (2.0 * PI).sqrt() * model.cf_re(2.0 * t);
            let var_re = (1.0 + c2 - 2.0 * c1 * c1) / (4.0 * PI * m as f64);
            let var_im = (1.0 - c2) / (4.0 * PI * m as f64);
            let tol_re = 4.0 * var_re.max(1e-18).sqrt();
            let tol_im = 4.0 * var_im.max(1e-18).sqrt();
            assert!((v.re - c).abs() <= tol_re, "{model} t={t}: re {} vs {c}", v.re);
            assert!(v.im.abs() <= tol_im, "{model} t={t}: im {}", v.im);
        }
    }
}

#[test]
fn sample_fractions_match_pdf_mass() {
    let m = 200_000;
    for (idx, model) in catalog().iter().enumerate() {
        let mut rng = stream(99, stream_id(Purpose::Data, idx as u32, 1));
        let draws = model.sample(&mut rng, m);
        for (a, b) in [(0.3, 1.1), (-2.0, -0.5), (1.5, 3.0)] {
            let steps = 4000;
            let h = (b - a) / steps as f64;
            // Simpson's rule on an interval away from the sym_chi2(1) pole.
            let mass: f64 = (0..=steps)
                .map(|i| {
                    let w = if i == 0 || i == steps { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                    w * model.pdf(a + i as f64 * h)
                })
                .sum::<f64>()
                * h
                / 3.0;
            let frac = draws.iter().filter(|&&x| x > a && x <= b).count() as f64 / m as f64;
            let se = (mass * (1.0 - mass) / m as f64).sqrt();
            assert!((frac - mass).abs() <= 4.0 * se + 1e-9, "{model} ({a},{b}]: {frac} vs {mass}");
        }
    }
}

#[test]
fn streams_are_reproducible() {
    let model = sym_chi2(3).unwrap();
    let draw = || model.sample(&mut stream(5, stream_id(Purpose::Y, 256, 3)), 64);
    assert_eq!(draw(), draw());
}
