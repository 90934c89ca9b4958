//! Expected resolvent trace `E Tr(Y + E)⁻¹` for shifted real Ginibre
//! matrices, and the bound on it near the hard edge.
//!
//! The exact finite-`N` representation is the triple integral
//! `N/(4πi) ∮dξ ∫₀^∞da ∫₀¹dτ (ξ² a/√τ) e^{N[f(ξ) − g(a, τ)]} G_N(a, τ, ξ)`
//! with `f` and `g` from [`RealPhase`] and the amplitude `G_N` of
//! [`GFunction`]. The product `Q = ξ²(ξ + 1)⁵ G_N` is a polynomial of degree
//! five in `ξ`, so with `τ = u²` the integral separates into
//! `N/(4πi) Σₙ Mₙ Aₙ`, where `Mₙ = ∮ ξⁿ (1 + ξ)⁻⁵ e^{N f(ξ)} dξ` and
//! `Aₙ = ∫da ∫₀¹du 2a e^{−N g(a, u²)} Cₙ(a, u²)` for the `ξ`-coefficients
//! `Cₙ` of `Q`.

use core::cell::Cell;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::complex_onepoint::{anchor, check_clearance, combine, exp_or_zero, saddle_loop, OnePointError, Side};
use crate::params::ShiftParams;
use crate::phase;
use crate::quadrature::{integrate_interval, integrate_path, QuadOptions, QuadResult};
use crate::statistics::BOUND_RANGE;

/// Decay `N (f(a) − f(ξ*))` at which the `a`-integration is cut off.
pub const A_DECAY: f64 = 45.0;

/// Index triples `(i, j, k)` of the polynomials `p_{i,j,k}` entering `G_N`.
pub const POLY_INDICES: [(u8, u8, u8); 8] = [
    (2, 0, 0),
    (1, 0, 0),
    (2, 0, 1),
    (1, 0, 1),
    (2, 0, 2),
    (2, 2, 0),
    (1, 2, 0),
    (2, 2, 1),
];

/// Coefficients of `ξ⁰, …, ξ⁴` in `p_{i,j,k}(a, τ, ξ)`.
pub fn poly_xi_coefficients(i: u8, j: u8, k: u8, a: Complex64, tau: f64) -> Result<[Complex64; 5], OnePointError> {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let d1 = (a * tau + 2.0) * a + 1.0;
    let coefficients = match (i, j, k) {
        (2, 0, 0) => [
            d1 * d1,
            (((a * tau + 4.0) * a + 5.0) * a + 2.0) * 2.0,
            (a * (4.0 - tau) + 8.0) * a + 6.0,
            (a + 2.0) * 2.0,
            one,
        ],
        (1, 0, 0) => [
            d1 * d1,
            (((-(a * tau * tau) - 2.0 * tau) * a + (4.0 - 2.0 * tau)) * a + 6.0) * a + 3.0,
            -(a * 2.0 + 3.0) * (a * a * tau - 1.0),
            one - a * a * tau,
            zero,
        ],
        (2, 0, 1) => [
            ((((a * tau * tau) + 4.0 * tau) * a + (3.0 * tau + 2.0)) * a + 2.0) * 2.0,
            ((a * (2.0 * tau) + (2.0 * tau + 4.0)) * a + 5.0) * 2.0,
            (a + 2.0) * 4.0,
            Complex64::new(2.0, 0.0),
            zero,
        ],
        (1, 0, 1) => [
            ((((a * tau * tau) + 4.0 * tau) * a + (3.0 * tau + 2.0)) * a + 2.0) * 2.0,
            (a * 2.0 + 3.0) * (a * tau + 1.0) * 2.0,
            (a * tau + 1.0) * 2.0,
            zero,
            zero,
        ],
        (2, 0, 2) => [(a * tau + 4.0) * a + 4.0, (a + 2.0) * 2.0, one, zero, zero],
        (2, 2, 0) => [
            (a + 1.0) * ((a * tau + 2.0 * tau) * a + 1.0) * 4.0,
            (a + 1.0) * (a * tau + 2.0) * 4.0,
            (a + 1.0) * 4.0,
            zero,
            zero,
        ],
        (1, 2, 0) => [
            (a + 1.0) * ((a * tau + 2.0 * tau) * a + 1.0) * 4.0,
            (a + 1.0) * (a * tau + 1.0) * 4.0,
            zero,
            zero,
            zero,
        ],
        (2, 2, 1) => [(a + 1.0) * (a + 2.0) * 4.0, (a + 1.0) * 4.0, zero, zero, zero],
        _ => return Err(OnePointError::UnknownIndex { i, j, k }),
    };
    Ok(coefficients)
}

/// `p_{i,j,k}(a, τ, ξ)`, by Horner's rule in `ξ` over
/// [`poly_xi_coefficients`].
pub fn eval_poly(i: u8, j: u8, k: u8, a: Complex64, tau: f64, xi: Complex64) -> Result<Complex64, OnePointError> {
    let coefficients = poly_xi_coefficients(i, j, k, a, tau)?;
    Ok(coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * xi + c))
}

/// Phase functions `f(ξ) = Eξ + log((1 + ξ)/ξ) − |z|²/(1 + ξ)` and
/// `g(a, τ) = E a + ½ log(1 + 2a + a²τ) − log a − ½ log τ
/// − (|z|²(1 + a) − 2η²a²(1 − τ))/(1 + 2a + a²τ)` at `w = −E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealPhase {
    abs_z_sq: f64,
    eta: f64,
    energy: f64,
}

impl RealPhase {
    pub fn new(params: &ShiftParams, energy: f64) -> Self {
        Self {
            abs_z_sq: params.abs_z_sq(),
            eta: params.eta(),
            energy,
        }
    }

    pub fn f(&self, xi: Complex64) -> Complex64 {
        phase::phase(xi, Complex64::new(-self.energy, 0.0), self.abs_z_sq)
    }

    pub fn f_second(&self, xi: Complex64) -> Complex64 {
        phase::phase_second_derivative(xi, self.abs_z_sq)
    }

    pub fn g(&self, a: Complex64, tau: f64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let d1 = (a * tau + 2.0) * a + 1.0;
        let coupling = (one + a) * self.abs_z_sq - a * a * (2.0 * self.eta * self.eta * (1.0 - tau));
        a * self.energy + d1.ln() * 0.5 - a.ln() - 0.5 * tau.ln() - coupling / d1
    }
}

/// Amplitude `G_N = G_{1,N} + G_{2,N}` of the real-case integral, built
/// from the polynomials `p_{i,j,k}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GFunction {
    n: f64,
    delta: f64,
    eta: f64,
}

/// Adds `scale · ξ^shift (ξ + 1)^power · p` to `acc`.
fn accumulate(acc: &mut XiCoefficients, p: &[Complex64; 5], scale: Complex64, shift: usize, power: usize) {
    let mut term = [Complex64::new(0.0, 0.0); 6];
    for (index, &c) in p.iter().enumerate() {
        if index + shift < 6 {
            term[index + shift] = c;
        }
    }
    for _ in 0..power {
        for index in (1..6).rev() {
            term[index] = term[index] + term[index - 1];
        }
    }
    for (slot, value) in acc.iter_mut().zip(term) {
        *slot += value * scale;
    }
}

impl GFunction {
    pub fn new(params: &ShiftParams) -> Self {
        Self {
            n: params.n() as f64,
            delta: params.delta(),
            eta: params.eta(),
        }
    }

    fn poly(i: u8, j: u8, k: u8, a: Complex64, tau: f64, xi: Complex64) -> Complex64 {
        eval_poly(i, j, k, a, tau, xi).expect("index triple is listed in POLY_INDICES")
    }

    /// `G_{1,N}(a, τ, ξ)`.
    pub fn g1(&self, a: Complex64, tau: f64, xi: Complex64) -> Complex64 {
        let (n, delta) = (self.n, self.delta);
        let xp = xi + 1.0;
        let d1 = (a * tau + 2.0) * a + 1.0;
        let p = |i, j, k| Self::poly(i, j, k, a, tau, xi);
        let sum = p(2, 0, 0) * (n * n) / (a * a * xi * xi * xp * xp * tau) - p(1, 0, 0) * n / (a * a * xi * xi * xp * tau)
            + p(2, 0, 1) * (delta * n * n) / (a * xi * xp * xp * tau)
            - p(1, 0, 1) * (n * delta) / (a * xi * xp * tau)
            + p(2, 0, 2) * (n * n * delta * delta) / (xp * xp);
        sum / (d1 * d1 * xp * xp)
    }

    /// `G_{2,N}(a, τ, ξ)`; identically zero for real `z`.
    pub fn g2(&self, a: Complex64, tau: f64, xi: Complex64) -> Complex64 {
        let (n, delta) = (self.n, self.delta);
        let eta_sq = self.eta * self.eta;
        let xp = xi + 1.0;
        let d1 = (a * tau + 2.0) * a + 1.0;
        let p = |i, j, k| Self::poly(i, j, k, a, tau, xi);
        let sum = p(2, 2, 0) * (n * n * eta_sq) / (a * xi * xp * tau) - p(1, 2, 0) * (n * eta_sq) / (a * xi * tau)
            + p(2, 2, 1) * (n * n * eta_sq * delta) / xp;
        sum / (d1 * d1 * xp * xp)
    }

    pub fn g_n(&self, a: Complex64, tau: f64, xi: Complex64) -> Complex64 {
        self.g1(a, tau, xi) + self.g2(a, tau, xi)
    }

    /// Coefficients of `ξ⁰, …, ξ⁵` in `Q = ξ²(ξ + 1)⁵ G_N(a, τ, ξ)`.
    pub fn q_coefficients(&self, a: Complex64, tau: f64) -> XiCoefficients {
        let (n, delta) = (self.n, self.delta);
        let eta_sq = self.eta * self.eta;
        let d1 = (a * tau + 2.0) * a + 1.0;
        let scale = (d1 * d1).inv();
        let hard = scale / (a * a * tau);
        let soft = scale / (a * tau);
        let c = |i, j, k| poly_xi_coefficients(i, j, k, a, tau).expect("index triple is listed in POLY_INDICES");
        let mut q = [Complex64::new(0.0, 0.0); 6];
        accumulate(&mut q, &c(2, 0, 0), hard * (n * n), 0, 1);
        accumulate(&mut q, &c(1, 0, 0), hard * (-n), 0, 2);
        accumulate(&mut q, &c(2, 0, 1), soft * (delta * n * n), 1, 1);
        accumulate(&mut q, &c(1, 0, 1), soft * (-n * delta), 1, 2);
        accumulate(&mut q, &c(2, 0, 2), scale * (n * n * delta * delta), 2, 1);
        if eta_sq != 0.0 {
            accumulate(&mut q, &c(2, 2, 0), soft * (n * n * eta_sq), 1, 2);
            accumulate(&mut q, &c(1, 2, 0), soft * (-n * eta_sq), 1, 3);
            accumulate(&mut q, &c(2, 2, 1), scale * (n * n * eta_sq * delta), 2, 2);
        }
        q
    }
}

/// `ξ`-coefficients of `ξ²(ξ + 1)⁵ G_N`, ascending.
pub type XiCoefficients = [Complex64; 6];

/// Radius of the `ξ`-loop around `0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XiContour {
    /// Through the saddle: radius `scale · ξ*` with `ξ* = m(−E)`.
    SaddleRadius(f64),
    /// The circle `|ξ| = 1/N`.
    InverseN,
}

/// Contour and quadrature settings for [`trace_resolvent_real`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealOptions {
    pub quad: QuadOptions,
    pub xi_contour: XiContour,
}

impl Default for RealOptions {
    fn default() -> Self {
        Self {
            quad: QuadOptions::new(1e-12, 1e-9),
            xi_contour: XiContour::SaddleRadius(1.0),
        }
    }
}

/// Exact `E Tr(Y + E)⁻¹` for `N × N` real Ginibre `X` and even `N`.
pub fn trace_resolvent_real(params: &ShiftParams, energy: f64, options: &RealOptions) -> Result<QuadResult, OnePointError> {
    let size = params.n();
    if size < 2 {
        return Err(OnePointError::Domain("the real formula needs N ≥ 2"));
    }
    if size % 2 == 1 {
        return Err(OnePointError::UnsupportedOddN(size));
    }
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(OnePointError::Domain("energy must be positive and finite"));
    }
    let n = size as f64;
    let phase = RealPhase::new(params, energy);
    let amplitude = GFunction::new(params);
    let saddle = anchor(params, energy, Side::NegativeAxis)?.re;
    let saddle_c = Complex64::new(saddle, 0.0);
    let f0 = phase.f(saddle_c).re;
    let width = (1.0 / (n * phase.f_second(saddle_c).norm()).sqrt()).min(0.5 * saddle);

    let radius = match options.xi_contour {
        XiContour::SaddleRadius(scale) => scale * saddle,
        XiContour::InverseN => 1.0 / n,
    };
    let loop_path = saddle_loop(radius, 0.0, width.min(0.5 * radius))?;
    check_clearance(&loop_path, &[0.0, -1.0], 1.0)?;
    let moments = integrate_path(
        |xi: Complex64| {
            let base = exp_or_zero((phase.f(xi) - f0) * n) / (xi + 1.0).powi(5);
            let mut powers = [base; 6];
            for index in 1..6 {
                powers[index] = powers[index - 1] * xi;
            }
            powers
        },
        &loop_path,
        &options.quad,
    )?;

    let mut a_max = saddle;
    for _ in 0..200 {
        if n * (phase.f(Complex64::new(a_max, 0.0)).re - f0) >= A_DECAY {
            break;
        }
        a_max *= 1.5;
    }
    let inner_options = QuadOptions {
        abs_tol: options.quad.abs_tol * 1e-2,
        rel_tol: options.quad.rel_tol * 1e-2,
        ..options.quad
    };
    let failure: Cell<Option<OnePointError>> = Cell::new(None);
    let inner_error = Cell::new(0.0f64);
    let inner_evaluations = Cell::new(0usize);
    let zero = [Complex64::new(0.0, 0.0); 6];
    let outer = integrate_interval(
        |a: f64| {
            let inner = integrate_interval(
                |u: f64| {
                    let tau = u * u;
                    let a_c = Complex64::new(a, 0.0);
                    let weight = 2.0 * a * (-n * (phase.g(a_c, tau).re - f0)).exp();
                    if weight == 0.0 {
                        return zero;
                    }
                    amplitude.q_coefficients(a_c, tau).map(|c| c * weight)
                },
                0.0,
                1.0,
                &[],
                &inner_options,
            );
            match inner {
                Ok(result) => {
                    inner_error.set(inner_error.get().max(result.abs_err));
                    inner_evaluations.set(inner_evaluations.get() + result.evaluations);
                    result.value
                }
                Err(e) => {
                    failure.set(Some(e.into()));
                    zero
                }
            }
        },
        0.0,
        a_max,
        &[saddle],
        &options.quad,
    )?;
    if let Some(error) = failure.take() {
        return Err(error);
    }

    let prefactor = Complex64::new(0.0, -n / (4.0 * PI));
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_err = 0.0;
    let inner_err = inner_error.get() * a_max;
    for (m, a) in moments.value.iter().zip(outer.value.iter()) {
        sum += m * a;
        abs_err += m.norm() * (outer.abs_err + inner_err) + a.norm() * moments.abs_err;
    }
    Ok(combine(
        sum * prefactor,
        abs_err * prefactor.norm(),
        moments.evaluations + outer.evaluations + inner_evaluations.get(),
        moments.warnings,
        outer.warnings,
    ))
}

/// The two terms of the bound on `|E Tr(Y + E)⁻¹|` for real matrices near
/// the hard edge, without their absolute constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealBoundTerms {
    /// `e^{−N η²/2} (N^{3/4} ∨ N |δ|^{1/2}) / √E`, the contribution of real
    /// eigenvalues.
    pub real_spectrum: f64,
    /// `(N^{3/2} ∨ N² |δ|)(1 + |log(N E^{2/3})|)`.
    pub complex_like: f64,
}

impl RealBoundTerms {
    pub fn total(&self) -> f64 {
        self.real_spectrum + self.complex_like
    }
}

/// Terms of the bound on `|E Tr(Y + E)⁻¹|`; requires `E > 0` and
/// `δ > −10/√N`.
pub fn real_tail_bound_terms(params: &ShiftParams, energy: f64) -> Result<RealBoundTerms, OnePointError> {
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(OnePointError::Domain("energy must be positive and finite"));
    }
    let n = params.n() as f64;
    let delta = params.delta();
    if !(delta > -BOUND_RANGE / n.sqrt()) {
        return Err(OnePointError::Domain("bound requires 1 − |z|² > −10/√N"));
    }
    let eta = params.eta();
    let suppression = (-n * eta * eta / 2.0).exp();
    let real_spectrum = suppression * n.powf(0.75).max(n * delta.abs().sqrt()) / energy.sqrt();
    let complex_like = n.powf(1.5).max(n * n * delta.abs()) * (1.0 + (n * energy.powf(2.0 / 3.0)).ln().abs());
    Ok(RealBoundTerms {
        real_spectrum,
        complex_like,
    })
}

/// Right-hand side of the bound on `|E Tr(Y + E)⁻¹|`, without its absolute
/// constant.
pub fn real_tail_bound_rhs(params: &ShiftParams, energy: f64) -> Result<f64, OnePointError> {
    Ok(real_tail_bound_terms(params, energy)?.total())
}
