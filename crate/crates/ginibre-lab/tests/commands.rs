use ginibre_core::complex_onepoint::Side;
use ginibre_core::mde::edges;
use ginibre_core::quadrature::QuadOptions;
use ginibre_core::statistics::Symmetry;
use ginibre_core::{Complex64, ShiftParams};
use ginibre_lab::commands::{
    besselcheck_table, density_table, mc_tables, onepoint_table, parse_symmetry, CommandError, Grid, Method, BESSEL_GRID,
};
use ginibre_lab::sampling::EnsembleSpec;

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values[values.len() / 2]
}

#[test]
fn grids() {
    let linear = Grid { min: 0.0, max: 1.0, points: 5, log: false }.values().unwrap();
    assert_eq!(linear, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    let log = Grid { min: 1e-3, max: 10.0, points: 5, log: true }.values().unwrap();
    assert!((log[1] - 1e-2).abs() < 1e-15 && (log[4] - 10.0).abs() < 1e-12);
    assert_eq!(Grid { min: 2.0, max: 3.0, points: 1, log: true }.values().unwrap(), vec![2.0]);
    assert!(Grid { min: 0.0, max: 1.0, points: 3, log: true }.values().is_err());
    assert!(Grid { min: 1.0, max: 0.0, points: 3, log: false }.values().is_err());
    assert!(Grid { min: 0.0, max: 1.0, points: 0, log: false }.values().is_err());
}

#[test]
fn density_support_ends_at_the_upper_edge() {
    let energies = Grid { min: 0.0, max: 7.0, points: 7001, log: false }.values().unwrap();
    let report = density_table(0.0, &energies).unwrap();
    let rho = report.table.column("rho_Y").unwrap();
    let last_positive = energies
        .iter()
        .zip(&rho)
        .filter(|(_, &r)| r > 0.0)
        .map(|(&e, _)| e)
        .fold(0.0, f64::max);
    assert!(last_positive <= 6.75 && last_positive > 6.75 - 1e-3, "{last_positive}");
}

#[test]
fn density_has_a_gap_for_large_shift() {
    let lower = edges(-2.0).unwrap().lower.unwrap();
    let energies = Grid { min: 1e-6, max: 0.999 * lower, points: 200, log: false }.values().unwrap();
    let report = density_table(-2.0, &energies).unwrap();
    assert!(report.table.column("rho_Y").unwrap().iter().all(|&r| r < 1e-8));
}

#[test]
fn density_columns_are_normalized() {
    // ∫ρ_Y dE = 2 ∫ρ_H dζ with ζ = √E; the latter has a finite nonzero
    // limit as ζ → 0, so the grid starts just above zero.
    let delta = 0.25;
    let upper = edges(delta).unwrap().upper;
    let energies = Grid { min: 1e-12, max: upper, points: 20_001, log: false }.values().unwrap();
    let report = density_table(delta, &energies).unwrap();
    let rho_h = report.table.column("rho_H").unwrap();
    assert!(report.table.column("rho_Y").unwrap().iter().all(|&r| r >= 0.0));
    let zeta: Vec<f64> = energies.iter().map(|e| e.sqrt()).collect();
    let mass: f64 = (1..zeta.len())
        .map(|k| (zeta[k] - zeta[k - 1]) * (rho_h[k] + rho_h[k - 1]))
        .sum();
    assert!((mass - 1.0).abs() < 1e-4, "mass {mass}");
    assert!(density_table(1.0, &energies).is_err());
}

#[test]
fn contour_and_saddle_agree_in_the_bulk() {
    let params = ShiftParams::new(1000, Complex64::new(1.0, 0.0)).unwrap();
    let energies = [0.5, 1.0, 2.0];
    let quad = QuadOptions::new(1e-12, 1e-10);
    let contour = onepoint_table(&params, &energies, Method::Contour, Side::PlusI0, quad);
    let saddle = onepoint_table(&params, &energies, Method::Saddle, Side::PlusI0, quad);
    assert!(contour.warnings.is_empty() && saddle.warnings.is_empty());
    for (key, table) in [("contour", &contour), ("saddle", &saddle)] {
        assert_eq!(table.table.rows.len(), 3, "{key}");
    }
    let (cr, ci) = (contour.table.column("Re").unwrap(), contour.table.column("Im").unwrap());
    let (sr, si) = (saddle.table.column("Re").unwrap(), saddle.table.column("Im").unwrap());
    for k in 0..3 {
        let a = Complex64::new(cr[k], ci[k]);
        let b = Complex64::new(sr[k], si[k]);
        assert!((a - b).norm() / b.norm() < 1e-2, "E = {}: {a} vs {b}", energies[k]);
    }
}

#[test]
fn regime_errors_become_nan_rows() {
    let params = ShiftParams::new(100, Complex64::new(1.0, 0.0)).unwrap();
    let report = onepoint_table(&params, &[1e-4, 1.0], Method::Saddle, Side::PlusI0, QuadOptions::default());
    let re = report.table.column("Re").unwrap();
    assert!(re[0].is_nan() && re[1].is_finite());
    assert_eq!(report.warnings.len(), 1);
    assert_eq!(report.failed_rows, 0);
    let odd = ShiftParams::new(5, Complex64::new(0.5, 0.0)).unwrap();
    let report = onepoint_table(&odd, &[0.1], Method::Real, Side::NegativeAxis, QuadOptions::default());
    assert_eq!(report.failed_rows, 1);
}

#[test]
fn rescaled_method_shows_a_single_interior_maximum() {
    let n = 100;
    let params = ShiftParams::new(n, Complex64::new(1.0, 0.0)).unwrap();
    let scale = (n as f64).powf(-1.5);
    let lambdas = BESSEL_GRID.values().unwrap();
    let energies: Vec<f64> = lambdas.iter().map(|l| l * scale).collect();
    let report = onepoint_table(&params, &energies, Method::Rescaled, Side::PlusI0, QuadOptions::new(1e-12, 1e-10));
    let density: Vec<f64> = report
        .table
        .column("Im")
        .unwrap()
        .iter()
        .map(|im| im / (std::f64::consts::PI * (n as f64).powf(1.5)))
        .collect();
    let peaks: Vec<f64> = (1..density.len() - 1)
        .filter(|&k| density[k] > density[k - 1] && density[k] > density[k + 1])
        .map(|k| lambdas[k])
        .collect();
    assert_eq!(peaks.len(), 1, "{peaks:?}");
    assert!(peaks[0] > 4.0 && peaks[0] < 8.0);
}

#[test]
fn besselcheck_single_point_and_default_grid() {
    let quad = QuadOptions::new(1e-12, 1e-10);
    let single = besselcheck_table(&[1.0], quad).unwrap();
    assert_eq!(single.report.table.rows.len(), 1);
    let full = besselcheck_table(&BESSEL_GRID.values().unwrap(), quad).unwrap();
    assert!(full.max_rel_diff < 1e-3, "{}", full.max_rel_diff);
    assert!(besselcheck_table(&[0.0], quad).is_err());
}

#[test]
fn loosening_quadrature_tolerance_at_most_doubles_the_median_difference() {
    let lambdas = Grid { min: 0.2, max: 5.0, points: 7, log: true }.values().unwrap();
    let tight = besselcheck_table(&lambdas, QuadOptions::new(1e-9, 1e-7)).unwrap();
    let loose = besselcheck_table(&lambdas, QuadOptions::new(2e-9, 2e-7)).unwrap();
    let tight_median = median(&mut tight.report.table.column("rel_diff").unwrap());
    let loose_median = median(&mut loose.report.table.column("rel_diff").unwrap());
    assert!(loose_median <= 2.0 * tight_median, "{loose_median} vs {tight_median}");
}

#[test]
fn mc_summary_tracks_edelman_at_zero_shift() {
    let spec = EnsembleSpec {
        n: 30,
        symmetry: Symmetry::Complex,
        z: Complex64::new(0.0, 0.0),
        n_samples: 2000,
        master_seed: 99,
    };
    let x_grid = Grid { min: 1e-2, max: 10.0, points: 13, log: true }.values().unwrap();
    let report = mc_tables(&spec, &x_grid).unwrap();
    assert_eq!(report.samples.rows.len(), 2000);
    assert!(report.ks_distance.unwrap() < 0.05);
    let empirical = report.summary.column("empirical_cdf").unwrap();
    let reference = report.summary.column("reference_cdf").unwrap();
    assert!(empirical.windows(2).all(|w| w[0] <= w[1]));
    assert!(empirical.iter().zip(&reference).all(|(e, r)| (e - r).abs() < 0.05));

    let shifted = mc_tables(&EnsembleSpec { z: Complex64::new(1.0, 0.0), n_samples: 200, ..spec }, &x_grid).unwrap();
    assert!(shifted.ks_distance.is_none());
    assert!(shifted.summary.column("reference_cdf").unwrap().iter().all(|r| r.is_nan()));
}

#[test]
fn symmetry_names() {
    assert_eq!(parse_symmetry("real").unwrap(), Symmetry::Real);
    assert_eq!(parse_symmetry("complex").unwrap(), Symmetry::Complex);
    assert!(matches!(parse_symmetry("quaternion"), Err(CommandError::Usage(_))));
}
