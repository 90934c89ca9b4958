use ginibre_core::complex_onepoint::{trace_resolvent_complex, ContourOptions, Side};
use ginibre_core::statistics::{edelman_cdf, ks_distance, ks_two_sample, EmpiricalCdf, Symmetry};
use ginibre_core::{Complex64, ShiftParams};
use ginibre_lab::sampling::{
    derive_seed, empirical_resolvent, run_samples, sample_lambda1, worker_pool, EnsembleSpec, McError, McSide,
};

fn spec(n: usize, symmetry: Symmetry, z: Complex64, n_samples: usize, master_seed: u64) -> EnsembleSpec {
    EnsembleSpec {
        n,
        symmetry,
        z,
        n_samples,
        master_seed,
    }
}

fn lambda1_cdf(spec: &EnsembleSpec) -> EmpiricalCdf {
    let run = sample_lambda1(spec).unwrap();
    assert!(run.failures.is_empty());
    EmpiricalCdf::new(run.samples.iter().map(|s| s.lambda1).collect()).unwrap()
}

#[test]
fn fixed_seed_reproduces_samples_exactly() {
    let small = spec(2, Symmetry::Complex, Complex64::new(0.3, 0.1), 3, 42);
    let first = sample_lambda1(&small).unwrap();
    let second = sample_lambda1(&small).unwrap();
    assert_eq!(first, second);
    assert_eq!(first.samples.len(), 3);
    for (k, sample) in first.samples.iter().enumerate() {
        assert_eq!(sample.sample_index, k);
        assert_eq!(sample.seed, derive_seed(42, k, 0));
        assert!(sample.lambda1 >= 0.0);
    }
    let other_seed = sample_lambda1(&EnsembleSpec { master_seed: 43, ..small }).unwrap();
    assert_ne!(first.samples[0].lambda1, other_seed.samples[0].lambda1);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let ensemble = spec(12, Symmetry::Real, Complex64::new(0.7, 0.4), 300, 7);
    let single = worker_pool(Some(1)).unwrap().install(|| sample_lambda1(&ensemble).unwrap());
    let several = worker_pool(Some(4)).unwrap().install(|| sample_lambda1(&ensemble).unwrap());
    assert_eq!(single, several);
    let energies = [0.01, 1.0];
    let single = worker_pool(Some(1))
        .unwrap()
        .install(|| empirical_resolvent(&ensemble, &energies, McSide::NegativeAxis).unwrap());
    let several = worker_pool(Some(3))
        .unwrap()
        .install(|| empirical_resolvent(&ensemble, &energies, McSide::NegativeAxis).unwrap());
    assert_eq!(single, several);
}

#[test]
fn derived_seeds_are_distinct() {
    let mut seeds: Vec<u64> = (0..1000)
        .flat_map(|index| (0..4).map(move |attempt| derive_seed(9, index, attempt)))
        .collect();
    seeds.sort_unstable();
    seeds.dedup();
    assert_eq!(seeds.len(), 4000);
}

#[test]
fn mean_trace_of_y_matches_entry_variance() {
    // E Tr Y = N (1 + |z|²) when E|x|² = 1/N.
    for symmetry in [Symmetry::Real, Symmetry::Complex] {
        let z = Complex64::new(0.6, -0.3);
        let ensemble = spec(10, symmetry, z, 20_000, 3);
        let run = run_samples(&ensemble, |eigenvalues| eigenvalues.iter().sum::<f64>()).unwrap();
        let traces: Vec<f64> = run.samples.iter().map(|s| s.2).collect();
        let count = traces.len() as f64;
        let mean = traces.iter().sum::<f64>() / count;
        let variance = traces.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (count - 1.0);
        let expected = 10.0 * (1.0 + z.norm_sqr());
        assert!((mean - expected).abs() < 4.0 * (variance / count).sqrt(), "{symmetry:?}: {mean} vs {expected}");
    }
}

#[test]
fn unshifted_smallest_eigenvalue_follows_edelman() {
    for symmetry in [Symmetry::Complex, Symmetry::Real] {
        let n = 40;
        let run = sample_lambda1(&spec(n, symmetry, Complex64::new(0.0, 0.0), 3000, 11)).unwrap();
        let scaled = EmpiricalCdf::new(run.samples.iter().map(|s| s.lambda1 * (n * n) as f64).collect()).unwrap();
        let distance = ks_distance(&scaled, |x| edelman_cdf(x, symmetry).unwrap());
        assert!(distance < 0.05, "{symmetry:?}: KS {distance}");
        let wrong = match symmetry {
            Symmetry::Real => Symmetry::Complex,
            Symmetry::Complex => Symmetry::Real,
        };
        assert!(ks_distance(&scaled, |x| edelman_cdf(x, wrong).unwrap()) > 0.1);
    }
}

#[test]
fn complex_ensemble_is_rotation_invariant() {
    let z = Complex64::new(0.9, 0.0);
    let rotated = z * Complex64::from_polar(1.0, 1.1);
    let first = lambda1_cdf(&spec(16, Symmetry::Complex, z, 5000, 1));
    let second = lambda1_cdf(&spec(16, Symmetry::Complex, rotated, 5000, 2));
    assert!(ks_two_sample(&first, &second) < 0.05);
}

#[test]
fn real_ensemble_is_conjugation_invariant() {
    let z = Complex64::new(0.6, 0.5);
    let first = lambda1_cdf(&spec(16, Symmetry::Real, z, 5000, 1));
    let second = lambda1_cdf(&spec(16, Symmetry::Real, z.conj(), 5000, 2));
    assert!(ks_two_sample(&first, &second) < 0.05);
}

#[test]
fn empirical_resolvent_matches_contour_formula() {
    // Mean of Tr(Y + 10⁻²)⁻¹ over complex draws at N = 4, z = 0.8.
    let ensemble = spec(4, Symmetry::Complex, Complex64::new(0.8, 0.0), 100_000, 2024);
    let estimate = empirical_resolvent(&ensemble, &[0.01], McSide::NegativeAxis).unwrap()[0];
    let params = ShiftParams::new(4, Complex64::new(0.8, 0.0)).unwrap();
    let exact = trace_resolvent_complex(&params, 0.01, Side::NegativeAxis, &ContourOptions::default()).unwrap();
    assert_eq!(estimate.mean.im, 0.0);
    assert!((estimate.mean - exact.value).norm() < 3.0 * estimate.stderr, "{} vs {}", estimate.mean, exact.value);
}

#[test]
fn standard_error_halves_with_four_times_the_samples() {
    let base = spec(4, Symmetry::Complex, Complex64::new(0.5, 0.0), 4000, 5);
    let small = empirical_resolvent(&base, &[1.0], McSide::NegativeAxis).unwrap()[0];
    let large = empirical_resolvent(&EnsembleSpec { n_samples: 16_000, ..base }, &[1.0], McSide::NegativeAxis).unwrap()[0];
    let ratio = small.stderr / large.stderr;
    assert!((ratio / 2.0 - 1.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn unshifted_resolvent_is_real_and_positive() {
    let ensemble = spec(4, Symmetry::Real, Complex64::new(0.0, 0.0), 2000, 8);
    for estimate in empirical_resolvent(&ensemble, &[0.01, 0.1, 1.0], McSide::NegativeAxis).unwrap() {
        assert!(estimate.mean.re > 0.0 && estimate.mean.im == 0.0);
        assert!(estimate.mean.re < 4.0 / estimate.energy);
    }
    let regularized = empirical_resolvent(&ensemble, &[0.5], McSide::Regularized { kappa: 0.1 }).unwrap()[0];
    assert!(regularized.mean.im > 0.0);
}

#[test]
fn invalid_ensembles_are_rejected() {
    let z = Complex64::new(0.0, 0.0);
    assert!(matches!(sample_lambda1(&spec(1, Symmetry::Real, z, 10, 0)), Err(McError::InvalidSpec(_))));
    assert!(matches!(sample_lambda1(&spec(4, Symmetry::Real, z, 0, 0)), Err(McError::InvalidSpec(_))));
    let valid = spec(4, Symmetry::Real, z, 10, 0);
    assert!(empirical_resolvent(&valid, &[0.0], McSide::NegativeAxis).is_err());
    assert!(empirical_resolvent(&valid, &[1.0], McSide::Regularized { kappa: 0.0 }).is_err());
    assert_eq!(worker_pool(Some(2)).unwrap().current_num_threads(), 2);
}
