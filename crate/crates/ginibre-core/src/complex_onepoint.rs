//! Expected resolvent trace `E Tr(Y − w)⁻¹` for shifted complex Ginibre
//! matrices.
//!
//! Three evaluators are provided:
//!
//! * [`trace_resolvent_complex`] evaluates the exact finite-`N` double contour
//!   integral `N²/(2πi) ∫_Λ dx ∮_Γ dy e^{−N f(x) + N f(y)} y G(x, y)`, which
//!   separates into products of one-dimensional integrals.
//! * [`saddle_asymptotics`] returns the leading term `N m(E + i0)` together
//!   with its relative error bound.
//! * [`RescaledIntegrand`] and [`rescaled_onepoint`] evaluate the `N`-free
//!   double integral describing the critical regime `E ≈ c(N, z)`.
//!
//! The `x`-contour runs from `0` (where `e^{−N f}` vanishes) to the anchor
//! `x* = m(w)` and leaves along the steepest-descent ray. The `y`-contour encloses `0` but not `−1`: a circle through `|x*|` when that
//! radius is below `3/4`, otherwise the arc of that circle closed by the
//! vertical line `Re y = −2/3`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::mde::{self, MdeError};
use crate::params::ShiftParams;
use crate::phase;
use crate::quadrature::{integrate_path, ray_cutoff, ComplexPath, QuadError, QuadOptions, QuadResult, QuadWarning, Segment};

/// Decay `N Re(f − f(x*))` at which rays are truncated.
pub const RAY_DECAY: f64 = 45.0;

/// Largest `λ` and `−δ̃` accepted by [`rescaled_onepoint`].
pub const RESCALED_RANGE: f64 = 10.0;

/// Smallest distance the contours keep from the singular points `0` and `−1`.
pub const POLE_CLEARANCE: f64 = 1e-8;

/// Arguments below which `exp` underflows to zero.
const EXP_FLOOR: f64 = -745.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OnePointError {
    #[error(transparent)]
    Mde(#[from] MdeError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("contour passes within {distance:e} of the singular point {pole}")]
    ContourCrossesPole { pole: f64, distance: f64 },
    #[error("argument out of range: {0}")]
    Domain(&'static str),
    #[error("saddle-point expansion is not valid here (relative error bound {bound:e})")]
    Regime { bound: f64 },
    #[error("the real formula requires an even matrix size, got N = {0}")]
    UnsupportedOddN(usize),
    #[error("no polynomial p_{{{i},{j},{k}}} in the real-case amplitude")]
    UnknownIndex { i: u8, j: u8, k: u8 },
}

/// Where the spectral parameter sits relative to the positive real axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// `w = E + i0`, the boundary value from the upper half-plane.
    PlusI0,
    /// `w = −E`, giving the trace of `(Y + E)⁻¹`.
    NegativeAxis,
}

impl Side {
    /// Spectral parameter `w` for the energy `E > 0`.
    pub fn spectral_parameter(self, energy: f64) -> Complex64 {
        match self {
            Side::PlusI0 => Complex64::new(energy, 0.0),
            Side::NegativeAxis => Complex64::new(-energy, 0.0),
        }
    }
}

/// Shape of the `x`-contour after the anchor point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XContour {
    /// From `0` to the anchor `x*` either straight or along `[0, |x*|]` and
    /// the arc of radius `|x*|`, whichever keeps `|e^{−N(f − f(x*))}|`
    /// smaller, then the steepest-descent ray of `e^{−N f}` at `x*`.
    Steepest,
    /// `[0, |x*|]` along the real axis, then the line `|x*| − q s + i s`
    /// through `x*` with `q = (|x*| − Re x*)/Im x*`. Requires `Im x* > 0`.
    Reference,
}

/// Contour and quadrature settings for [`trace_resolvent_complex`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourOptions {
    pub quad: QuadOptions,
    /// Radius of the `y`-contour relative to `|x*|`.
    pub y_radius_scale: f64,
    /// Rotation in radians applied to the steepest-descent `x`-ray.
    pub x_ray_rotation: f64,
    pub x_contour: XContour,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self {
            quad: QuadOptions::new(1e-13, 1e-10),
            y_radius_scale: 1.0,
            x_ray_rotation: 0.0,
            x_contour: XContour::Steepest,
        }
    }
}

/// Phase `f(x) = log((1 + x)/x) − |z|²/(1 + x) − w x` and amplitude
/// `G(x, y)` of the exact contour integral at a fixed spectral parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPhase {
    abs_z_sq: f64,
    w: Complex64,
}

impl ComplexPhase {
    pub fn new(params: &ShiftParams, w: Complex64) -> Self {
        Self {
            abs_z_sq: params.abs_z_sq(),
            w,
        }
    }

    pub fn spectral_parameter(&self) -> Complex64 {
        self.w
    }

    pub fn f(&self, x: Complex64) -> Complex64 {
        phase::phase(x, self.w, self.abs_z_sq)
    }

    pub fn f_prime(&self, x: Complex64) -> Complex64 {
        phase::phase_derivative(x, self.w, self.abs_z_sq)
    }

    pub fn f_second(&self, x: Complex64) -> Complex64 {
        phase::phase_second_derivative(x, self.abs_z_sq)
    }

    pub fn g(&self, x: Complex64, y: Complex64) -> Complex64 {
        phase::amplitude(x, y, self.abs_z_sq)
    }
}

pub(crate) fn exp_or_zero(z: Complex64) -> Complex64 {
    if z.re < EXP_FLOOR {
        Complex64::new(0.0, 0.0)
    } else {
        z.exp()
    }
}

/// Splits the line `start → end` at the given interior parameters.
fn split_line(start: Complex64, end: Complex64, cuts: &[f64]) -> Vec<Segment> {
    let mut ts: Vec<f64> = cuts.iter().copied().filter(|&t| t > 0.0 && t < 1.0).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut points = Vec::with_capacity(ts.len() + 2);
    points.push(start);
    points.extend(ts.iter().map(|&t| start + (end - start) * t));
    points.push(end);
    points.windows(2).map(|p| Segment::line(p[0], p[1])).collect()
}

/// Splits the arc of radius `radius` about `0` from `from` to `to` at the
/// given interior angles.
fn split_arc(radius: f64, from: f64, to: f64, cuts: &[f64]) -> Vec<Segment> {
    let (lo, hi) = if from <= to { (from, to) } else { (to, from) };
    let mut angles: Vec<f64> = cuts.iter().copied().filter(|&a| a > lo && a < hi).collect();
    angles.sort_by(f64::total_cmp);
    if from > to {
        angles.reverse();
    }
    angles.dedup();
    let mut points = Vec::with_capacity(angles.len() + 2);
    points.push(from);
    points.extend(angles);
    points.push(to);
    let zero = Complex64::new(0.0, 0.0);
    points.windows(2).map(|p| Segment::arc(zero, radius, p[0], p[1])).collect()
}

/// Multiples of the saddle width used to place breakpoints.
const WIDTHS: [f64; 5] = [1.0, 3.0, 10.0, 30.0, 100.0];

/// Anchor point of the contours: `m(w)` on the chosen side, moved off the
/// real axis when `w = E + i0` lies outside the support.
pub(crate) fn anchor(params: &ShiftParams, energy: f64, side: Side) -> Result<Complex64, OnePointError> {
    let delta = params.delta();
    match side {
        Side::NegativeAxis => {
            let m = mde::solve_mde_y(-energy, delta)?.m;
            Ok(Complex64::new(m.re, 0.0))
        }
        Side::PlusI0 => {
            let m = mde::solve_mde_y(energy, delta)?.m;
            let lift = 0.2 * m.norm();
            Ok(if m.im < lift { Complex64::new(m.re, lift) } else { m })
        }
    }
}

/// Largest sampled value of `log_magnitude` along `segments`.
fn peak_exponent<L: Fn(Complex64) -> f64>(segments: &[Segment], log_magnitude: L) -> f64 {
    const SAMPLES: usize = 256;
    segments
        .iter()
        .flat_map(|segment| (1..=SAMPLES).map(move |k| segment.point(k as f64 / SAMPLES as f64)))
        .map(|x| log_magnitude(x))
        .map(|v| if v.is_nan() { f64::INFINITY } else { v })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn x_path(
    phase: &ComplexPhase,
    n: f64,
    p: Complex64,
    width: f64,
    side: Side,
    options: &ContourOptions,
) -> Result<ComplexPath, OnePointError> {
    let radius = p.norm();
    let f0 = phase.f(p);
    let zero = Complex64::new(0.0, 0.0);
    let cuts: Vec<f64> = WIDTHS.iter().map(|k| 1.0 - k * width / radius).collect();
    let (mut segments, start, direction) = match options.x_contour {
        XContour::Steepest => {
            let mut direction = Complex64::from_polar(1.0, -0.5 * phase.f_second(p).arg());
            match side {
                Side::PlusI0 if direction.re > 0.0 => direction = -direction,
                Side::NegativeAxis => direction = Complex64::new(1.0, 0.0),
                _ => {}
            }
            direction *= Complex64::from_polar(1.0, options.x_ray_rotation);
            let straight = split_line(zero, p, &cuts);
            let mut around = split_line(zero, Complex64::new(radius, 0.0), &cuts);
            let angle = p.arg();
            if angle != 0.0 {
                let arc_cuts: Vec<f64> = WIDTHS.iter().map(|k| angle - k * width / radius).collect();
                around.extend(split_arc(radius, 0.0, angle, &arc_cuts));
            }
            let peak = |segments: &[Segment]| peak_exponent(segments, |x| -n * (phase.f(x) - f0).re);
            let segments = if peak(&around) < peak(&straight) { around } else { straight };
            (segments, p, direction)
        }
        XContour::Reference => {
            if !(p.im > 0.0) {
                return Err(OnePointError::Domain("reference contour needs an anchor with Im x* > 0"));
            }
            let q = (radius - p.re) / p.im;
            let corner = Complex64::new(radius, 0.0);
            (split_line(zero, corner, &cuts), corner, Complex64::new(-q, 1.0))
        }
    };
    let unit = direction / direction.norm();
    let length = ray_cutoff(|s| -n * (phase.f(start + unit * s) - f0).re, width, -RAY_DECAY, 200);
    segments.push(Segment::ray(start, unit, length, width));
    Ok(ComplexPath::new(segments)?)
}

fn y_path(p: Complex64, width: f64, options: &ContourOptions) -> Result<ComplexPath, OnePointError> {
    saddle_loop(options.y_radius_scale * p.norm(), p.arg(), width)
}

/// Counter-clockwise loop around `0` that avoids `−1`: the circle of the
/// given radius when it is below `3/4`, otherwise its arc to the right of
/// the vertical line `Re y = −2/3` closed by that line. Breakpoints cluster
/// around the angles `±theta` on the scale `width`.
pub(crate) fn saddle_loop(radius: f64, theta: f64, width: f64) -> Result<ComplexPath, OnePointError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(OnePointError::Domain("contour radius must be positive"));
    }
    let cuts: Vec<f64> = [theta, -theta]
        .iter()
        .flat_map(|&c| WIDTHS.iter().flat_map(move |&k| [c - k * width / radius, c + k * width / radius]))
        .chain([theta, -theta])
        .collect();
    if radius < 0.75 {
        return Ok(ComplexPath::new(split_arc(radius, -PI, PI, &cuts))?);
    }
    let opening = (-2.0 / (3.0 * radius)).acos();
    let height = radius * opening.sin();
    let mut segments = split_arc(radius, -opening, opening, &cuts);
    let top = Complex64::new(-2.0 / 3.0, height);
    let bottom = Complex64::new(-2.0 / 3.0, -height);
    segments.extend(split_line(top, bottom, &[0.5]));
    Ok(ComplexPath::new(segments)?)
}

pub(crate) fn check_clearance(path: &ComplexPath, poles: &[f64], scale: f64) -> Result<(), OnePointError> {
    for &pole in poles {
        let distance = path.distance_to(Complex64::new(pole, 0.0));
        if distance < POLE_CLEARANCE * scale {
            return Err(OnePointError::ContourCrossesPole { pole, distance });
        }
    }
    Ok(())
}

/// Exact `E Tr(Y − w)⁻¹` for `N × N` complex Ginibre `X`, with `w = E + i0`
/// or `w = −E` according to `side`.
pub fn trace_resolvent_complex(
    params: &ShiftParams,
    energy: f64,
    side: Side,
    options: &ContourOptions,
) -> Result<QuadResult, OnePointError> {
    if params.n() < 2 {
        return Err(OnePointError::Domain("the contour formula needs N ≥ 2"));
    }
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(OnePointError::Domain("energy must be positive and finite"));
    }
    let n = params.n() as f64;
    let abs_z_sq = params.abs_z_sq();
    let phase = ComplexPhase::new(params, side.spectral_parameter(energy));
    let p = anchor(params, energy, side)?;
    let curvature = phase.f_second(p).norm();
    let width = if curvature > 0.0 {
        (1.0 / (n * curvature).sqrt()).min(0.5 * p.norm())
    } else {
        0.1 * p.norm()
    };
    let xs = x_path(&phase, n, p, width, side, options)?;
    let ys = y_path(p, width, options)?;
    check_clearance(&xs, &[-1.0], 1.0)?;
    check_clearance(&ys, &[0.0, -1.0], 1.0)?;

    let f0 = phase.f(p);
    let one = Complex64::new(1.0, 0.0);
    let x_int = integrate_path(
        |x: Complex64| {
            let e = exp_or_zero(-(phase.f(x) - f0) * n);
            let inv = (one + x).inv();
            [e / x, e * inv, e * inv * inv]
        },
        &xs,
        &options.quad,
    )?;
    let y_int = integrate_path(
        |y: Complex64| {
            let e = exp_or_zero((phase.f(y) - f0) * n);
            let ratio = y / (one + y);
            [e, e * ratio, e * ratio / (one + y)]
        },
        &ys,
        &options.quad,
    )?;
    let [x1, x2, x3] = x_int.value;
    let [y1, y2, y3] = y_int.value;
    let prefactor = Complex64::new(0.0, -n * n / (2.0 * PI));
    let value = prefactor * (x1 * y1 - x2 * y2 - abs_z_sq * (x3 * y2 + x2 * y3));
    let x_norm = x1.norm().max(x2.norm()).max(x3.norm());
    let y_norm = y1.norm().max(y2.norm()).max(y3.norm());
    let abs_err = prefactor.norm() * (2.0 + 2.0 * abs_z_sq) * (x_int.abs_err * y_norm + y_int.abs_err * x_norm);
    Ok(combine(value, abs_err, x_int.evaluations + y_int.evaluations, x_int.warnings, y_int.warnings))
}

pub(crate) fn combine(
    value: Complex64,
    abs_err: f64,
    evaluations: usize,
    mut first: Vec<QuadWarning>,
    second: Vec<QuadWarning>,
) -> QuadResult {
    first.extend(second);
    QuadResult {
        value,
        abs_err,
        evaluations,
        warnings: first,
    }
}

/// Leading saddle-point term of the resolvent trace with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleAsymptotics {
    /// `N m(E + i0)`.
    pub value: Complex64,
    /// Size of the relative correction, without its absolute constant.
    pub relative_error: f64,
}

/// Relative error bound of the saddle-point expansion at `E > 0`:
/// `1/(N|E₊|^{3/2}) + min(1/(N E^{2/3}), D)` with `E± = E − e±`,
/// `D = 1/(N E^{1/2} δ^{1/2})` for `δ ≥ 0` and
/// `D = |δ|^{5/2}/(N |E₋|^{3/2})` for `δ < 0`.
pub fn saddle_relative_error(params: &ShiftParams, energy: f64) -> Result<f64, OnePointError> {
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(OnePointError::Domain("energy must be positive and finite"));
    }
    let n = params.n() as f64;
    let delta = params.delta();
    let edges = mde::edges(delta)?;
    let upper = 1.0 / (n * (energy - edges.upper).abs().powf(1.5));
    let hard_edge = 1.0 / (n * energy.powf(2.0 / 3.0));
    let soft = match edges.lower {
        None => 1.0 / (n * energy.sqrt() * delta.sqrt()),
        Some(lower) => delta.abs().powf(2.5) / (n * (energy - lower).abs().powf(1.5)),
    };
    Ok(upper + hard_edge.min(soft))
}

/// `N m(E + i0)`, valid when [`saddle_relative_error`] is below one.
pub fn saddle_asymptotics(params: &ShiftParams, energy: f64) -> Result<SaddleAsymptotics, OnePointError> {
    let relative_error = saddle_relative_error(params, energy)?;
    if !(relative_error < 1.0) {
        return Err(OnePointError::Regime { bound: relative_error });
    }
    let m = mde::solve_mde_y(energy, params.delta())?.m;
    Ok(SaddleAsymptotics {
        value: m * params.n() as f64,
        relative_error,
    })
}

/// `N`-free double integral of the critical regime, in the rescaled
/// variables `λ = E/c(N)` and `δ̃ = N^{1/2} δ`.
///
/// With `s = z̃*` and `κ = 1 ∧ δ̃⁻¹` (equal to one for `δ̃ ≤ 1`),
/// `h(x) = −κ λ s x + δ̃/(s x) + 1/(2 s² x²)` and
/// `H̃(x, y) = x⁻³ + x⁻²y⁻¹ + x⁻¹y⁻² + δ̃ s (x⁻¹y⁻¹ + x⁻²)`.
///
/// The `x`-contour leaves `0` along the positive axis, follows the unit
/// circle to the saddle `ẑ = Ψ/|Ψ|` of `h` and continues along the
/// steepest-descent ray. The `y`-contour is the right half of the unit
/// circle from `−i` to `i` closed through `0` along the imaginary axis. It
/// must pass through `0`: for finite `N` the `y`-contour separates the
/// singular points `0` and `−1`, which merge at the origin under the
/// rescaling, and `e^{h(y)}` vanishes as `y → 0` along the imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaledIntegrand {
    lambda: f64,
    delta_tilde: f64,
    coupling: f64,
    z_tilde_star: f64,
    saddle: Complex64,
}

impl RescaledIntegrand {
    pub fn new(lambda: f64, delta_tilde: f64) -> Result<Self, OnePointError> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(OnePointError::Domain("λ must be positive and finite"));
        }
        if !delta_tilde.is_finite() {
            return Err(OnePointError::Domain("δ̃ must be finite"));
        }
        let coupling = if delta_tilde > 1.0 { 1.0 / delta_tilde } else { 1.0 };
        let stretch = if delta_tilde > 1.0 { delta_tilde.cbrt() } else { 1.0 };
        let base = lambda.cbrt().recip() * stretch;
        let (z_tilde_star, saddle) = match mde::psi(delta_tilde * base) {
            Ok(psi) => (base * psi.norm(), psi / psi.norm()),
            Err(_) => (base, Complex64::from_polar(1.0, PI / 3.0)),
        };
        Ok(Self {
            lambda,
            delta_tilde,
            coupling,
            z_tilde_star,
            saddle,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn delta_tilde(&self) -> f64 {
        self.delta_tilde
    }

    /// `1 ∧ δ̃⁻¹`, taken as one for `δ̃ ≤ 1`.
    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// `z̃* = λ^{−1/3}(1 ∨ δ̃^{1/3}) |Ψ(δ̃ λ^{−1/3}(1 ∨ δ̃^{1/3}))|`.
    pub fn z_tilde_star(&self) -> f64 {
        self.z_tilde_star
    }

    /// Unit-modulus turning point of the `x`-contour, the saddle of `h`
    /// whenever `Ψ` is defined.
    pub fn saddle(&self) -> Complex64 {
        self.saddle
    }

    pub fn h(&self, x: Complex64) -> Complex64 {
        let s = self.z_tilde_star;
        let inv = (x * s).inv();
        -x * (self.coupling * self.lambda * s) + inv * self.delta_tilde + inv * inv * 0.5
    }

    pub fn h_second(&self, x: Complex64) -> Complex64 {
        let s = self.z_tilde_star;
        let inv = x.inv();
        inv.powi(3) * (2.0 * self.delta_tilde / s) + inv.powi(4) * (3.0 / (s * s))
    }

    /// `H̃(x, y)`.
    pub fn amplitude(&self, x: Complex64, y: Complex64) -> Complex64 {
        let (xi, yi) = (x.inv(), y.inv());
        let mixed = self.delta_tilde * self.z_tilde_star;
        xi.powi(3) + xi * xi * yi + xi * yi * yi + (xi * yi + xi * xi) * mixed
    }

    fn x_path(&self) -> Result<ComplexPath, OnePointError> {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let width = (1.0 / self.h_second(self.saddle).norm().sqrt()).min(0.5);
        let mut direction = Complex64::from_polar(1.0, -0.5 * self.h_second(self.saddle).arg());
        if direction.re > 0.0 {
            direction = -direction;
        }
        if direction.re > -0.1 {
            direction = Complex64::from_polar(1.0, 3.0 * FRAC_PI_4);
        }
        let angle = self.saddle.arg();
        let cuts: Vec<f64> = WIDTHS.iter().map(|k| angle - k * width).collect();
        let mut segments = split_line(zero, one, &WIDTHS.map(|k| 1.0 - k * width));
        segments.extend(split_arc(1.0, 0.0, angle, &cuts));
        let anchor = self.h(self.saddle).re;
        let length = ray_cutoff(|s| anchor - self.h(self.saddle + direction * s).re, width, -RAY_DECAY, 200);
        segments.push(Segment::ray(self.saddle, direction, length, width));
        Ok(ComplexPath::new(segments)?)
    }

    fn y_path(&self) -> Result<ComplexPath, OnePointError> {
        let width = (1.0 / self.h_second(self.saddle).norm().sqrt()).min(0.5);
        let angle = self.saddle.arg();
        let cuts: Vec<f64> = [angle, -angle]
            .iter()
            .flat_map(|&c| WIDTHS.iter().flat_map(move |&k| [c - k * width, c + k * width]))
            .chain([angle, -angle])
            .collect();
        let mut segments = split_arc(1.0, -FRAC_PI_2, FRAC_PI_2, &cuts);
        let zero = Complex64::new(0.0, 0.0);
        segments.push(Segment::line(Complex64::new(0.0, 1.0), zero));
        segments.push(Segment::line(zero, Complex64::new(0.0, -1.0)));
        Ok(ComplexPath::new(segments)?)
    }

    /// The double integral `∫dx ∮dy e^{h(y) − h(x)} H̃(x, y)`.
    pub fn integral(&self, options: &QuadOptions) -> Result<QuadResult, OnePointError> {
        let anchor = self.h(self.saddle).re;
        let x_int = integrate_path(
            |x: Complex64| {
                let e = exp_or_zero(Complex64::new(anchor, 0.0) - self.h(x));
                let inv = x.inv();
                [e * inv, e * inv * inv, e * inv * inv * inv]
            },
            &self.x_path()?,
            options,
        )?;
        let y_int = integrate_path(
            |y: Complex64| {
                if y == Complex64::new(0.0, 0.0) {
                    return [Complex64::new(0.0, 0.0); 3];
                }
                let e = exp_or_zero(self.h(y) - anchor);
                let inv = y.inv();
                [e, e * inv, e * inv * inv]
            },
            &self.y_path()?,
            options,
        )?;
        let [x1, x2, x3] = x_int.value;
        let [y0, y1, y2] = y_int.value;
        let mixed = self.delta_tilde * self.z_tilde_star;
        let value = x3 * y0 + x2 * y1 + x1 * y2 + (x1 * y1 + x2 * y0) * mixed;
        let x_norm = x1.norm().max(x2.norm()).max(x3.norm());
        let y_norm = y0.norm().max(y1.norm()).max(y2.norm());
        let abs_err = (3.0 + 2.0 * mixed.abs()) * (x_int.abs_err * y_norm + y_int.abs_err * x_norm);
        Ok(combine(value, abs_err, x_int.evaluations + y_int.evaluations, x_int.warnings, y_int.warnings))
    }

    /// `Φ = (2πi z̃*)⁻¹ ∫dx ∮dy e^{h(y) − h(x)} H̃(x, y)`, so that
    /// `E Tr(Y − λ c(N, δ̃) − i0)⁻¹ ≈ N^{3/2} Φ`.
    pub fn one_point(&self, options: &QuadOptions) -> Result<QuadResult, OnePointError> {
        let mut result = self.integral(options)?;
        let scale = Complex64::new(0.0, -1.0 / (2.0 * PI * self.z_tilde_star));
        result.value *= scale;
        result.abs_err *= scale.norm();
        Ok(result)
    }

    /// `|(1 ∧ δ̃⁻¹)/z̃* · ∫dx ∮dy e^{h(y) − h(x)} H̃(x, y)|`, the quantity
    /// controlled by [`critical_bound_shape`] for small `λ`.
    pub fn bounded_magnitude(&self, options: &QuadOptions) -> Result<f64, OnePointError> {
        Ok(self.coupling / self.z_tilde_star * self.integral(options)?.value.norm())
    }
}

/// Small-`λ` growth of the critical one-point function: `|log λ|` for
/// `λ ≥ δ̃³` and `|log(λ δ̃)|` for `λ < δ̃³`.
pub fn critical_bound_shape(lambda: f64, delta_tilde: f64) -> f64 {
    if lambda >= delta_tilde.powi(3) {
        lambda.ln().abs()
    } else {
        (lambda * delta_tilde).ln().abs()
    }
}

/// `c(N, δ̃) = N^{−3/2}(1 ∧ δ̃⁻¹)`.
pub fn critical_scale(n: usize, delta_tilde: f64) -> f64 {
    let coupling = if delta_tilde > 1.0 { 1.0 / delta_tilde } else { 1.0 };
    (n as f64).powf(-1.5) * coupling
}

/// Leading term `N^{3/2} Φ(λ, δ̃)` of `E Tr(Y − λ c(N, δ̃) − i0)⁻¹`.
pub fn rescaled_onepoint(
    lambda: f64,
    delta_tilde: f64,
    n: usize,
    options: &QuadOptions,
) -> Result<QuadResult, OnePointError> {
    if n == 0 {
        return Err(OnePointError::Domain("N must be positive"));
    }
    if !(lambda > 0.0 && lambda <= RESCALED_RANGE) {
        return Err(OnePointError::Domain("rescaled formula requires 0 < λ ≤ 10"));
    }
    if !(delta_tilde >= -RESCALED_RANGE) {
        return Err(OnePointError::Domain("rescaled formula requires δ̃ ≥ −10"));
    }
    let mut result = RescaledIntegrand::new(lambda, delta_tilde)?.one_point(options)?;
    let scale = (n as f64).powf(1.5);
    result.value *= scale;
    result.abs_err *= scale;
    Ok(result)
}
