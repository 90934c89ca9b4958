//! Table builders behind each command-line subcommand.
//!
//! Each builder is a pure function of its arguments. Per-row numerical
//! failures are reported as `NaN` cells plus a warning instead of aborting
//! the whole table.

use ginibre_core::bessel_kernel::{limiting_kernel, q0};
use ginibre_core::complex_onepoint::{
    critical_scale, rescaled_onepoint, saddle_asymptotics, trace_resolvent_complex, ContourOptions, OnePointError, Side,
};
use ginibre_core::mde::{density, density_h, edges, scale_c};
use ginibre_core::quadrature::{QuadOptions, QuadResult};
use ginibre_core::real_onepoint::{trace_resolvent_real, RealOptions};
use ginibre_core::statistics::{corollary_bound, edelman_cdf, ks_distance, EmpiricalCdf, Symmetry, BOUND_RANGE};
use ginibre_core::{Complex64, ShiftParams};

use crate::io::{Cell, Table};
use crate::sampling::{sample_lambda1, EnsembleSpec, FailedSample, McError};

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Mc(#[from] McError),
}

/// Linear or logarithmic grid of `points` values from `min` to `max`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log: bool,
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>, CommandError> {
        if self.points == 0 {
            return Err(CommandError::Usage("grid needs at least one point".into()));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min <= self.max) {
            return Err(CommandError::Usage("grid bounds must be finite with min ≤ max".into()));
        }
        if self.log && !(self.min > 0.0) {
            return Err(CommandError::Usage("a logarithmic grid needs min > 0".into()));
        }
        if self.points == 1 {
            return Ok(vec![self.min]);
        }
        let steps = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|k| {
                let t = k as f64 / steps;
                if self.log {
                    (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + t * (self.max - self.min)
                }
            })
            .collect())
    }
}

/// Table plus the warnings raised while filling it.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Table,
    pub warnings: Vec<String>,
    /// Rows that failed for reasons other than leaving a method's validity
    /// regime.
    pub failed_rows: usize,
}

/// Columns `E, rho_Y, rho_H`: the limiting density of `Y` at `E` and of the
/// Hermitization at `√E`.
pub fn density_table(delta: f64, energies: &[f64]) -> Result<Report, CommandError> {
    if !(delta < 1.0) {
        return Err(CommandError::Usage("δ must be below 1".into()));
    }
    let mut report = Report {
        table: Table::new(&["E", "rho_Y", "rho_H"]),
        warnings: Vec::new(),
        failed_rows: 0,
    };
    for &energy in energies {
        let row = density(energy, delta).and_then(|rho| Ok((rho, density_h(energy.max(0.0).sqrt(), delta)?)));
        let (rho_y, rho_h) = match row {
            Ok(values) => values,
            Err(e) => {
                report.warnings.push(format!("E = {energy}: {e}"));
                report.failed_rows += 1;
                (f64::NAN, f64::NAN)
            }
        };
        report.table.push(vec![energy.into(), rho_y.into(), rho_h.into()]);
    }
    Ok(report)
}

/// Evaluation method of the one-point function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Exact contour integral, complex entries.
    Contour,
    /// Leading saddle-point term `N m(E + i0)`.
    Saddle,
    /// Critical-scale formula with `λ = E/c(N, δ̃)` and `δ̃ = √N δ`.
    Rescaled,
    /// Exact integral for real entries at `w = −E`.
    Real,
}

/// Columns `E, Re, Im, abs_err` of `E Tr(Y − w)⁻¹` on an energy grid.
pub fn onepoint_table(
    params: &ShiftParams,
    energies: &[f64],
    method: Method,
    side: Side,
    quad: QuadOptions,
) -> Report {
    let mut report = Report {
        table: Table::new(&["E", "Re", "Im", "abs_err"]),
        warnings: Vec::new(),
        failed_rows: 0,
    };
    let n = params.n();
    let delta_tilde = (n as f64).sqrt() * params.delta();
    for &energy in energies {
        let outcome: Result<QuadResult, OnePointError> = match method {
            Method::Contour => trace_resolvent_complex(params, energy, side, &ContourOptions { quad, ..Default::default() }),
            Method::Saddle => saddle_asymptotics(params, energy).map(|s| QuadResult {
                value: s.value,
                abs_err: s.relative_error * s.value.norm(),
                evaluations: 1,
                warnings: Vec::new(),
            }),
            Method::Rescaled => {
                let lambda = energy / critical_scale(n, delta_tilde);
                rescaled_onepoint(lambda, delta_tilde, n, &quad)
            }
            Method::Real => trace_resolvent_real(params, energy, &RealOptions { quad, ..Default::default() }),
        };
        let (value, abs_err) = match outcome {
            Ok(result) => (result.value, result.abs_err),
            Err(e) => {
                if !matches!(e, OnePointError::Regime { .. }) {
                    report.failed_rows += 1;
                }
                report.warnings.push(format!("E = {energy}: {e}"));
                (Complex64::new(f64::NAN, f64::NAN), f64::NAN)
            }
        };
        report
            .table
            .push(vec![energy.into(), value.re.into(), value.im.into(), abs_err.into()]);
    }
    report
}

/// Default `λ` grid of the kernel cross-check: 25 logarithmic points on
/// `[0.1, 10]`.
pub const BESSEL_GRID: Grid = Grid {
    min: 0.1,
    max: 10.0,
    points: 25,
    log: true,
};

/// Besselcheck table and the largest relative difference over its rows.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselReport {
    pub report: Report,
    pub max_rel_diff: f64,
}

/// Columns `lambda, K_diag, Im_q0_over_pi, rel_diff` comparing the kernel
/// diagonal `K(λ, λ)` with `π⁻¹ Im q₀(λ)`.
pub fn besselcheck_table(lambdas: &[f64], quad: QuadOptions) -> Result<BesselReport, CommandError> {
    if lambdas.iter().any(|&l| !(l > 0.0)) {
        return Err(CommandError::Usage("λ must be positive".into()));
    }
    let mut report = Report {
        table: Table::new(&["lambda", "K_diag", "Im_q0_over_pi", "rel_diff"]),
        warnings: Vec::new(),
        failed_rows: 0,
    };
    let mut max_rel_diff = 0.0f64;
    for &lambda in lambdas {
        let row = limiting_kernel(lambda, lambda, &quad).and_then(|k| Ok((k.value.re, q0(lambda, &quad)?.value.im / core::f64::consts::PI)));
        let (kernel, density) = match row {
            Ok(values) => values,
            Err(e) => {
                report.warnings.push(format!("λ = {lambda}: {e}"));
                report.failed_rows += 1;
                (f64::NAN, f64::NAN)
            }
        };
        let rel_diff = (kernel - density).abs() / kernel.abs();
        if rel_diff.is_finite() {
            max_rel_diff = max_rel_diff.max(rel_diff);
        }
        report
            .table
            .push(vec![lambda.into(), kernel.into(), density.into(), rel_diff.into()]);
    }
    Ok(BesselReport { report, max_rel_diff })
}

/// Per-sample and summary tables of a tail sampling run.
#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    /// `sample_index, seed, lambda1, x` with `x = λ₁/c(N, z)`.
    pub samples: Table,
    /// `x, empirical_cdf, reference_cdf, corollary_bound, ks_distance`.
    pub summary: Table,
    /// Kolmogorov–Smirnov distance of `x` to the Edelman law; only defined
    /// for `z = 0`, where `x = N² λ₁`.
    pub ks_distance: Option<f64>,
    pub failures: Vec<FailedSample>,
}

/// Samples `λ₁` and tabulates its empirical distribution in the rescaled
/// variable `x = λ₁/c(N, z)` on `x_grid`.
pub fn mc_tables(spec: &EnsembleSpec, x_grid: &[f64]) -> Result<McReport, CommandError> {
    let params = ShiftParams::new(spec.n, spec.z).map_err(|e| CommandError::Usage(e.to_string()))?;
    let run = sample_lambda1(spec)?;
    let scale = scale_c(spec.n, params.delta());
    let mut samples = Table::new(&["sample_index", "seed", "lambda1", "x"]);
    for sample in &run.samples {
        samples.push(vec![
            sample.sample_index.into(),
            sample.seed.into(),
            sample.lambda1.into(),
            (sample.lambda1 / scale).into(),
        ]);
    }
    let rescaled: Vec<f64> = run.samples.iter().map(|s| s.lambda1 / scale).collect();
    let cdf = EmpiricalCdf::new(rescaled).map_err(|e| CommandError::Usage(format!("no usable samples: {e}")))?;
    let unshifted = spec.z == Complex64::new(0.0, 0.0);
    let ks = unshifted.then(|| ks_distance(&cdf, |x| edelman_cdf(x, spec.symmetry).unwrap_or(f64::NAN)));
    let mut summary = Table::new(&["x", "empirical_cdf", "reference_cdf", "corollary_bound", "ks_distance"]);
    for &x in x_grid {
        let reference = if unshifted {
            edelman_cdf(x, spec.symmetry).unwrap_or(f64::NAN)
        } else {
            f64::NAN
        };
        let bound = if x > 0.0 && x <= BOUND_RANGE {
            corollary_bound(x, &params, spec.symmetry).unwrap_or(f64::NAN)
        } else {
            f64::NAN
        };
        summary.push(vec![
            x.into(),
            cdf.eval(x).into(),
            reference.into(),
            bound.into(),
            Cell::Float(ks.unwrap_or(f64::NAN)),
        ]);
    }
    Ok(McReport {
        samples,
        summary,
        ks_distance: ks,
        failures: run.failures,
    })
}

/// Upper spectral edge of `Y` for `δ`, used by the density command to
/// choose a default grid.
pub fn upper_edge(delta: f64) -> Result<f64, CommandError> {
    edges(delta)
        .map(|e| e.upper)
        .map_err(|e| CommandError::Usage(e.to_string()))
}

/// Parses `real` or `complex`.
pub fn parse_symmetry(name: &str) -> Result<Symmetry, CommandError> {
    match name {
        "real" => Ok(Symmetry::Real),
        "complex" => Ok(Symmetry::Complex),
        other => Err(CommandError::Usage(format!("unknown symmetry class {other:?}"))),
    }
}
