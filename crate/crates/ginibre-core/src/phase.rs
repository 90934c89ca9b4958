//! Phase function and amplitude of the contour-integral representation of
//! the resolvent trace for complex Ginibre matrices.
//!
//! With `w` the spectral parameter, `f(x) = log((1 + x)/x) − |z|²/(1 + x) − w x`.
//! Its critical points solve the same cubic as the Stieltjes transform `m(w)`,
//! so `m(E + i0)` is the saddle point of the contour integral.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::mde::{self, MdeError};

/// `f(x) = log((1 + x)/x) − |z|²/(1 + x) − w x` on the principal branch.
///
/// Only `exp(±N f)` with integer `N` enters the integrals, which is
/// independent of the logarithm branch.
pub fn phase(x: Complex64, w: Complex64, abs_z_sq: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    (one + x).ln() - x.ln() - abs_z_sq / (one + x) - w * x
}

/// First derivative of [`phase`].
pub fn phase_derivative(x: Complex64, w: Complex64, abs_z_sq: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let xp = one + x;
    one / xp - one / x + abs_z_sq / (xp * xp) - w
}

/// Second derivative of [`phase`]; it does not depend on `w`.
pub fn phase_second_derivative(x: Complex64, abs_z_sq: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let xp = one + x;
    one / (x * x) - one / (xp * xp) - 2.0 * abs_z_sq / (xp * xp * xp)
}

/// Amplitude `G(x, y) = 1/(xy) − [1 + |z|²/(1 + x) + |z|²/(1 + y)]/((1 + x)(1 + y))`.
///
/// On the diagonal `G(x, x) = f''(x)`.
pub fn amplitude(x: Complex64, y: Complex64, abs_z_sq: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let xp = one + x;
    let yp = one + y;
    one / (x * y) - (one + abs_z_sq / xp + abs_z_sq / yp) / (xp * yp)
}

/// Position of the energy relative to the limiting spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaddleRegime {
    /// Inside the spectral gap `0 < E < 𝔢₋` (only for `δ < 0`).
    BelowLowerEdge,
    Bulk,
    AboveUpperEdge,
}

/// Saddle point of the phase at `w = E + i0` and the second derivative there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Saddle {
    /// `x* = m(E + i0)`.
    pub point: Complex64,
    /// `f''(x*)`.
    pub second_derivative: Complex64,
    pub regime: SaddleRegime,
    /// Set when `E` is within rounding distance of a spectral edge, where
    /// `f''(x*)` vanishes.
    pub degenerate: bool,
}

/// Saddle point `x* = m(E + i0)` and `f''(x*)` for `E ≥ 0`.
pub fn saddle_point(energy: f64, delta: f64) -> Result<Saddle, MdeError> {
    if !(energy >= 0.0) {
        return Err(MdeError::Domain("saddle point requires E ≥ 0"));
    }
    let value = mde::solve_mde_y(energy, delta)?;
    let edges = mde::edges(delta)?;
    let regime = if energy > edges.upper {
        SaddleRegime::AboveUpperEdge
    } else if edges.lower.is_some_and(|lower| energy < lower) {
        SaddleRegime::BelowLowerEdge
    } else {
        SaddleRegime::Bulk
    };
    Ok(Saddle {
        point: value.m,
        second_derivative: phase_second_derivative(value.m, 1.0 - delta),
        regime,
        degenerate: value.near_edge,
    })
}
