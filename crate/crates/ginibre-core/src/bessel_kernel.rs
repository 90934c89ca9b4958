//! Bessel kernel and the limiting critical-scale kernel of `(X − z)(X − z)*`
//! at `|z| = 1`.
//!
//! The limiting kernel is the double contour integral
//! `K(λ, μ) = (i/π) ∫_{Γ'} dx ∫_γ dy K_B(2x√λ, 2y√μ) e^{x⁴/2 − y⁴/2} xy(x² + y²)`
//! where `Γ'` consists of the four half-lines `(e^{iπ/4}∞, 0]`,
//! `[0, e^{3iπ/4}∞)`, `(e^{5iπ/4}∞, 0]`, `[0, e^{7iπ/4}∞)` and `γ` of
//! `[0, i∞)` and `[0, −i∞)`. The integrand is odd in `x` and in `y`, so each
//! lower half-line contributes as much as its mirror image in the upper
//! half-plane.
//!
//! Its diagonal agrees with `π⁻¹ Im q₀(λ)`, where
//! `q₀(λ) = λ^{1/3}/(2πi) ∫dx ∮dy e^{λ^{2/3}(−y + 1/(2y²) + x − 1/(2x²))}
//! (x⁻³ + x⁻²y⁻¹ + x⁻¹y⁻²)` with `x` running from `0` along the positive axis
//! out to `e^{3iπ/4}∞` and `y` on a closed counter-clockwise contour through
//! the origin.

use alloc::vec::Vec;
use core::cell::Cell;
use core::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::bessel::{bessel_i01, BesselError};
use crate::complex_onepoint::{OnePointError, RescaledIntegrand};
use crate::quadrature::{
    gauss_legendre, integrate_interval, integrate_path, ray_cutoff, ComplexPath, QuadError, QuadOptions, QuadResult,
    Segment,
};

/// Logarithmic decay at which integration rays are cut off.
const RAY_DECAY: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error(transparent)]
    Bessel(#[from] BesselError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    OnePoint(#[from] OnePointError),
    #[error("kernel arguments must be positive")]
    Domain,
}

/// `K_B(x, y) = (x I₁(x) I₀(y) − y I₀(x) I₁(y))/(x² − y²)`.
///
/// Close to the diagonal `|x² − y²| < 10⁻⁴ (|x|² + |y|² + 1)` the equivalent
/// form `∫₀¹ t I₀(xt) I₀(yt) dt` is used instead of the quotient.
pub fn kernel_kb(x: Complex64, y: Complex64) -> Result<Complex64, BesselError> {
    let (i0x, i1x) = bessel_i01(x)?;
    kernel_kb_with(x, i0x, i1x, y)
}

/// [`kernel_kb`] with `I₀(x)` and `I₁(x)` supplied by the caller.
fn kernel_kb_with(x: Complex64, i0x: Complex64, i1x: Complex64, y: Complex64) -> Result<Complex64, BesselError> {
    let gap = x * x - y * y;
    if gap.norm() < 1e-4 * (x.norm_sqr() + y.norm_sqr() + 1.0) {
        return kernel_kb_integral(x, y);
    }
    let (i0y, i1y) = bessel_i01(y)?;
    Ok((x * i1x * i0y - y * i0x * i1y) / gap)
}

/// `∫₀¹ t I₀(xt) I₀(yt) dt` by Gauss–Legendre quadrature.
///
/// The integrand is entire in `t`, so a rule with `O(|x| + |y|)` nodes is
/// exact to rounding.
pub fn kernel_kb_integral(x: Complex64, y: Complex64) -> Result<Complex64, BesselError> {
    let nodes = 24 + 2 * (x.norm() + y.norm()).ceil() as usize;
    let mut sum = Complex64::new(0.0, 0.0);
    for (node, weight) in gauss_legendre(nodes) {
        let t = 0.5 * (node + 1.0);
        let (i0x, _) = bessel_i01(x * t)?;
        let (i0y, _) = bessel_i01(y * t)?;
        sum += i0x * i0y * (0.5 * weight * t);
    }
    Ok(sum)
}

/// Integrand `K_B(2x√λ, 2y√μ) e^{x⁴/2 − y⁴/2} xy(x² + y²)` of the limiting
/// kernel.
pub fn kernel_integrand(x: Complex64, y: Complex64, lambda: f64, mu: f64) -> Result<Complex64, BesselError> {
    let weight = (x.powi(4) * 0.5 - y.powi(4) * 0.5).exp() * x * y * (x * x + y * y);
    Ok(kernel_kb(x * (2.0 * lambda.sqrt()), y * (2.0 * mu.sqrt()))? * weight)
}

/// Radius beyond which `e^{−r⁴/2 + 2r√λ}` is below `e^{−RAY_DECAY}`.
fn x_ray_length(lambda: f64) -> f64 {
    ray_cutoff(
        |r| -r.powi(4) / 2.0 + 2.0 * r * lambda.sqrt() + 3.0 * (1.0 + r).ln(),
        1.0,
        -RAY_DECAY,
        60,
    )
}

/// Length beyond which `e^{−t⁴/2}` times polynomial growth is negligible.
fn y_ray_length() -> f64 {
    ray_cutoff(|t| -t.powi(4) / 2.0 + 4.0 * (1.0 + t).ln(), 1.0, -RAY_DECAY, 60)
}

/// Upper pair of `x` half-lines, `(e^{iπ/4}R, 0] ∪ [0, e^{3iπ/4}R)`.
pub fn upper_x_path(lambda: f64) -> Result<ComplexPath, QuadError> {
    let radius = x_ray_length(lambda);
    let zero = Complex64::new(0.0, 0.0);
    ComplexPath::new(Vec::from([
        Segment::line(Complex64::from_polar(radius, FRAC_PI_4), zero),
        Segment::line(zero, Complex64::from_polar(radius, 3.0 * FRAC_PI_4)),
    ]))
}

/// Upper `y` half-line `[0, iT)`.
pub fn upper_y_path() -> Result<ComplexPath, QuadError> {
    ComplexPath::new(Vec::from([Segment::line(
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, y_ray_length()),
    )]))
}

/// `[∫ x I₀(cx) e^{sign·x⁴/2} dx, ∫ x³ I₀(cx) e^{sign·x⁴/2} dx]` along `path`.
pub fn odd_moments(path: &ComplexPath, c: f64, sign: f64, options: &QuadOptions) -> Result<QuadResult<[Complex64; 2]>, KernelError> {
    let failure: Cell<Option<BesselError>> = Cell::new(None);
    let result = integrate_path(
        |x: Complex64| match bessel_i01(x * c) {
            Ok((i0, _)) => {
                let weight = (x.powi(4) * (0.5 * sign)).exp() * i0 * x;
                [weight, weight * x * x]
            }
            Err(e) => {
                failure.set(Some(e));
                [Complex64::new(0.0, 0.0); 2]
            }
        },
        path,
        options,
    )?;
    match failure.take() {
        Some(e) => Err(e.into()),
        None => Ok(result),
    }
}

/// Limiting kernel `K(λ, μ)`.
///
/// With `K_B(X, Y) = ∫₀¹ s I₀(Xs) I₀(Ys) ds` and `xy(x² + y²) = x³y + xy³`
/// the double contour integral factorizes for each `s`:
/// `K = (4i/π) ∫₀¹ s [A₃(s) B₁(s) + A₁(s) B₃(s)] ds` with
/// `A_k(s) = ∫_{Γ'₊} x^k I₀(2√λ s x) e^{x⁴/2} dx` and
/// `B_k(s) = ∫_{[0, i∞)} y^k I₀(2√μ s y) e^{−y⁴/2} dy`.
///
/// The value is real up to quadrature error; the imaginary part is kept so
/// callers can check it.
pub fn limiting_kernel(lambda: f64, mu: f64, options: &QuadOptions) -> Result<QuadResult, KernelError> {
    if !(lambda > 0.0 && mu > 0.0) {
        return Err(KernelError::Domain);
    }
    let x_path = upper_x_path(lambda)?;
    let y_path = upper_y_path()?;
    let inner_options = QuadOptions {
        abs_tol: options.abs_tol * 1e-2,
        rel_tol: options.rel_tol * 1e-2,
        ..*options
    };
    let failure: Cell<Option<KernelError>> = Cell::new(None);
    let inner_error = Cell::new(0.0f64);
    let inner_evaluations = Cell::new(0usize);
    let integrand = |s: f64| -> Complex64 {
        let moments = odd_moments(&x_path, 2.0 * lambda.sqrt() * s, 1.0, &inner_options)
            .and_then(|a| Ok((a, odd_moments(&y_path, 2.0 * mu.sqrt() * s, -1.0, &inner_options)?)));
        match moments {
            Ok((a, b)) => {
                let [a1, a3] = a.value;
                let [b1, b3] = b.value;
                let scale = a1.norm().max(a3.norm()) * b.abs_err + b1.norm().max(b3.norm()) * a.abs_err;
                inner_error.set(inner_error.get().max(2.0 * s * scale));
                inner_evaluations.set(inner_evaluations.get() + a.evaluations + b.evaluations);
                (a3 * b1 + a1 * b3) * s
            }
            Err(e) => {
                failure.set(Some(e));
                Complex64::new(0.0, 0.0)
            }
        }
    };
    let result = integrate_interval(integrand, 0.0, 1.0, &[], options)?;
    if let Some(error) = failure.take() {
        return Err(error);
    }
    let scale = Complex64::new(0.0, 4.0 / PI);
    Ok(QuadResult {
        value: result.value * scale,
        abs_err: (result.abs_err + inner_error.get()) * 4.0 / PI,
        evaluations: result.evaluations + inner_evaluations.get(),
        warnings: result.warnings,
    })
}

/// `q₀(λ)`, the critical one-point function at `|z| = 1`.
///
/// Equals [`RescaledIntegrand::one_point`] at `δ̃ = 0`, whose `y`-contour
/// passes through the origin; see there for the contours.
pub fn q0(lambda: f64, options: &QuadOptions) -> Result<QuadResult, KernelError> {
    if !(lambda > 0.0) {
        return Err(KernelError::Domain);
    }
    Ok(RescaledIntegrand::new(lambda, 0.0)?.one_point(options)?)
}
