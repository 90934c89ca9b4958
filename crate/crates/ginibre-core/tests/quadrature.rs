use core::f64::consts::{FRAC_PI_4, PI};

use ginibre_core::quadrature::{
    gauss_legendre, integrate_interval, integrate_path, ray_cutoff, truncate_ray, truncate_ray_with_power, ComplexPath,
    QuadError, QuadOptions, QuadWarning, Segment,
};
use ginibre_core::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn tight() -> QuadOptions {
    QuadOptions::new(1e-14, 1e-13)
}

#[test]
fn residue_of_inverse_on_unit_circle() {
    let path = ComplexPath::circle(c(0.0, 0.0), 1.0);
    let result = integrate_path(|y: Complex64| y.inv(), &path, &tight()).unwrap();
    assert!((result.value - c(0.0, 2.0 * PI)).norm() < 1e-12);
    assert!(result.abs_err >= 0.0 && result.evaluations >= 1);
}

#[test]
fn exponential_on_positive_ray() {
    let length = truncate_ray(1.0, 1e-18).unwrap();
    let path = ComplexPath::new(vec![Segment::ray(c(0.0, 0.0), c(1.0, 0.0), length, 0.5)]).unwrap();
    let result = integrate_path(|x: Complex64| (-x).exp(), &path, &tight()).unwrap();
    assert!((result.value - c(1.0, 0.0)).norm() < 1e-12);
    assert!(result.warnings.is_empty());
}

#[test]
fn quartic_gaussian_on_rotated_ray() {
    // x e^{x⁴/2} decays along e^{3iπ/4}; with x = t e^{3iπ/4} the integral
    // is e^{3iπ/2} ∫ t e^{−t⁴/2} dt.
    let direction = Complex64::from_polar(1.0, 3.0 * FRAC_PI_4);
    let length = truncate_ray_with_power(2f64.powf(0.25), 4.0, 1e-18).unwrap();
    let path = ComplexPath::new(vec![Segment::ray(c(0.0, 0.0), direction, length, 0.25)]).unwrap();
    let integrand = |x: Complex64| x * (x.powu(4) / 2.0).exp();
    let result = integrate_path(integrand, &path, &tight()).unwrap();

    let steps = 1_000_000usize;
    let h = length / steps as f64;
    let simpson: f64 = (0..=steps)
        .map(|k| {
            let t = k as f64 * h;
            let weight = if k == 0 || k == steps { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            weight * t * (-t.powi(4) / 2.0).exp()
        })
        .sum::<f64>()
        * h
        / 3.0;
    let oracle = c(0.0, -simpson);
    assert!((result.value - oracle).norm() < 1e-9, "{} vs {oracle}", result.value);
    let closed_form = c(0.0, -0.5 * (PI / 2.0).sqrt());
    assert!((result.value - closed_form).norm() < 1e-12);
}

#[test]
fn ray_truncation_lengths() {
    assert!((truncate_ray(1.0, (-40f64).exp()).unwrap() - 40.0).abs() < 1e-12);
    let (n, energy) = (1e4, 1e-3);
    let scale = 1.0 / (n * energy);
    assert!((truncate_ray(scale, (-40f64).exp()).unwrap() - 40.0 * scale).abs() < 1e-12);
    assert!(truncate_ray(0.0, 1e-10).is_err());
    assert!(truncate_ray(-1.0, 1e-10).is_err());
    assert!(truncate_ray(1.0, 0.0).is_err());
}

#[test]
fn gaussian_tail_cutoff_matches_erfc() {
    let cutoff = truncate_ray_with_power(2f64.sqrt(), 2.0, 1e-16).unwrap();
    assert!((cutoff - 8.58).abs() < 0.01, "cutoff {cutoff}");
    let tail = (PI / 2.0).sqrt() * statrs::function::erf::erfc(cutoff / 2f64.sqrt());
    assert!(tail < 1e-16 && tail > 1e-18, "tail {tail}");
}

#[test]
fn ray_cutoff_grows_until_threshold() {
    let length = ray_cutoff(|s| -s, 1.0, -40.0, 100);
    assert!(length >= 40.0 && length < 60.0);
    assert_eq!(ray_cutoff(|_| 0.0, 1.0, -40.0, 3), 1.5f64.powi(3));
}

#[test]
fn reversing_a_path_negates_the_integral() {
    let path = ComplexPath::new(vec![
        Segment::line(c(0.2, 0.0), c(1.0, 1.0)),
        Segment::arc(c(0.0, 0.0), 2f64.sqrt(), FRAC_PI_4, PI),
        Segment::line(c(-2f64.sqrt(), 0.0), c(-3.0, -1.0)),
    ])
    .unwrap();
    let f = |x: Complex64| (x * x).sin() / (x + c(0.0, 3.0));
    let forward = integrate_path(f, &path, &tight()).unwrap();
    let backward = integrate_path(f, &path.reversed(), &tight()).unwrap();
    assert!((forward.value + backward.value).norm() < 1e-13);
}

#[test]
fn quadrature_is_deterministic() {
    let path = ComplexPath::circle(c(0.3, 0.1), 0.7);
    let f = |x: Complex64| (x.exp() / (x - c(0.1, 0.0))).powu(2);
    let first = integrate_path(f, &path, &tight()).unwrap();
    let second = integrate_path(f, &path, &tight()).unwrap();
    assert_eq!(first.value.re.to_bits(), second.value.re.to_bits());
    assert_eq!(first.value.im.to_bits(), second.value.im.to_bits());
    assert_eq!(first.evaluations, second.evaluations);
}

proptest! {
    #[test]
    fn splitting_a_segment_is_additive(t in 0.01f64..0.99, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let (start, end) = (c(-1.0, -0.5), c(re, im + 3.0));
        let mid = start + (end - start) * t;
        let f = |x: Complex64| (x * c(0.3, 1.0)).cos() * x;
        let options = QuadOptions::new(1e-10, 0.0);
        let whole = integrate_path(f, &ComplexPath::new(vec![Segment::line(start, end)]).unwrap(), &options).unwrap();
        let split = integrate_path(
            f,
            &ComplexPath::new(vec![Segment::line(start, mid), Segment::line(mid, end)]).unwrap(),
            &options,
        )
        .unwrap();
        prop_assert!((whole.value - split.value).norm() <= 2.0 * options.abs_tol);
    }
}

#[test]
fn interval_integration_with_kink() {
    let options = QuadOptions::new(1e-14, 1e-13);
    let kink = |x: f64| c((x - 0.3).abs(), 0.0);
    let result = integrate_interval(kink, 0.0, 1.0, &[0.3], &options).unwrap().value;
    assert!((result - c(0.29, 0.0)).norm() < 1e-14);
    let reversed = integrate_interval(kink, 1.0, 0.0, &[0.3], &options).unwrap().value;
    assert!((reversed + c(0.29, 0.0)).norm() < 1e-14);
    let empty = integrate_interval(|x: f64| c(x, 0.0), 2.0, 2.0, &[], &options).unwrap().value;
    assert_eq!(empty, c(0.0, 0.0));
}

#[test]
fn gauss_legendre_is_exact_for_polynomials() {
    let rule = gauss_legendre(10);
    assert!((rule.iter().map(|&(_, w)| w).sum::<f64>() - 2.0).abs() < 1e-14);
    for degree in 0..20 {
        let approx: f64 = rule.iter().map(|&(x, w)| w * x.powi(degree)).sum();
        let exact = if degree % 2 == 0 { 2.0 / (degree as f64 + 1.0) } else { 0.0 };
        assert!((approx - exact).abs() < 1e-14, "degree {degree}");
    }
}

#[test]
fn invalid_paths_and_options_are_rejected() {
    assert_eq!(ComplexPath::new(vec![]), Err(QuadError::EmptyPath));
    assert!(matches!(
        ComplexPath::new(vec![Segment::line(c(0.0, 0.0), c(1.0, 0.0)), Segment::line(c(2.0, 0.0), c(3.0, 0.0))]),
        Err(QuadError::Discontinuous { index: 1, .. })
    ));
    let path = ComplexPath::circle(c(0.0, 0.0), 1.0);
    let zero_tolerance = QuadOptions::new(0.0, 0.0);
    assert!(matches!(
        integrate_path(|y: Complex64| y, &path, &zero_tolerance),
        Err(QuadError::InvalidParameter(_))
    ));
    let capped = QuadOptions {
        max_subdivisions: 2,
        ..QuadOptions::new(1e-15, 0.0)
    };
    let line = ComplexPath::new(vec![Segment::line(c(0.0, 0.0), c(1.0, 0.0))]).unwrap();
    assert!(matches!(
        integrate_path(|x: Complex64| (x * 200.0).sin(), &line, &capped),
        Err(QuadError::MaxSubdivisions { .. })
    ));
    assert!(matches!(
        integrate_path(|x: Complex64| (x - c(0.5, 0.0)).inv() * f64::INFINITY, &line, &tight()),
        Err(QuadError::NonFinite { .. })
    ));
}

#[test]
fn short_ray_reports_truncation() {
    let path = ComplexPath::new(vec![Segment::ray(c(0.0, 0.0), c(1.0, 0.0), 5.0, 0.5)]).unwrap();
    let result = integrate_path(|x: Complex64| (-x).exp(), &path, &tight()).unwrap();
    assert!(matches!(result.warnings.as_slice(), [QuadWarning::Truncation { segment: 0, .. }]));
    let QuadWarning::Truncation { tail_estimate, .. } = result.warnings[0];
    assert!((tail_estimate / (-5f64).exp() - 1.0).abs() < 0.05);
}
