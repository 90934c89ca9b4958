//! Adaptive Gauss–Kronrod quadrature along piecewise-smooth complex paths.
//!
//! A [`ComplexPath`] is an ordered chain of [`Segment`]s (straight lines,
//! circular arcs and truncated rays). [`integrate_path`] applies a globally
//! adaptive 15-point Gauss–Kronrod rule over all segments at once: the panel
//! with the largest error estimate is bisected until the requested tolerance
//! is met. The integrand may be scalar or a fixed-size vector of complex
//! values sharing the same path, see [`QuadValue`].

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Kronrod abscissae on `[0, 1]`; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

/// Kronrod weights matching [`XGK`].
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Errors raised while building paths or integrating along them.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    /// Consecutive segments do not join.
    #[error("path segment {index} starts {gap:e} away from the end of the previous segment")]
    Discontinuous { index: usize, gap: f64 },
    /// The adaptive refinement exceeded the configured number of bisections.
    #[error("adaptive refinement exceeded {limit} subdivisions (error estimate {abs_err:e})")]
    MaxSubdivisions { limit: usize, abs_err: f64 },
    /// The integrand returned a NaN or infinite value.
    #[error("integrand is not finite at {re} + {im}i")]
    NonFinite { re: f64, im: f64 },
    /// Tolerances or truncation parameters are out of range.
    #[error("invalid quadrature parameter: {0}")]
    InvalidParameter(&'static str),
    /// The path has no segments.
    #[error("path is empty")]
    EmptyPath,
}

/// Non-fatal conditions reported alongside a converged result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadWarning {
    /// The integrand at the end of a truncated ray suggests a neglected tail
    /// larger than the absolute tolerance.
    Truncation { segment: usize, tail_estimate: f64 },
}

/// One smooth piece of an integration path, parameterized by `t ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    /// Straight line from `start` to `end`.
    Line { start: Complex64, end: Complex64 },
    /// Arc `center + radius·e^{iθ}` for θ running from `start_angle` to
    /// `end_angle`; the sweep sign sets the orientation.
    Arc {
        center: Complex64,
        radius: f64,
        start_angle: f64,
        end_angle: f64,
    },
    /// Ray `start + s·direction` for `s ∈ [0, length]`, where `direction` has
    /// unit modulus. The ray is initially split into geometrically growing
    /// panels, the first of length `first_panel`.
    Ray {
        start: Complex64,
        direction: Complex64,
        length: f64,
        first_panel: f64,
    },
}

impl Segment {
    /// Straight line segment.
    pub fn line(start: Complex64, end: Complex64) -> Self {
        Segment::Line { start, end }
    }

    /// Circular arc between two angles.
    pub fn arc(center: Complex64, radius: f64, start_angle: f64, end_angle: f64) -> Self {
        Segment::Arc {
            center,
            radius,
            start_angle,
            end_angle,
        }
    }

    /// Truncated ray; `direction` is normalized here.
    pub fn ray(start: Complex64, direction: Complex64, length: f64, first_panel: f64) -> Self {
        Segment::Ray {
            start,
            direction: direction / direction.norm(),
            length,
            first_panel,
        }
    }

    /// Point at parameter `t`.
    pub fn point(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line { start, end } => start + (end - start) * t,
            Segment::Arc {
                center,
                radius,
                start_angle,
                end_angle,
            } => {
                let theta = start_angle + (end_angle - start_angle) * t;
                center + Complex64::from_polar(radius, theta)
            }
            Segment::Ray {
                start,
                direction,
                length,
                ..
            } => start + direction * (length * t),
        }
    }

    /// Derivative of [`Segment::point`] with respect to `t`.
    pub fn derivative(&self, t: f64) -> Complex64 {
        match *self {
            Segment::Line { start, end } => end - start,
            Segment::Arc {
                radius,
                start_angle,
                end_angle,
                ..
            } => {
                let sweep = end_angle - start_angle;
                let theta = start_angle + sweep * t;
                Complex64::i() * Complex64::from_polar(radius, theta) * sweep
            }
            Segment::Ray {
                direction, length, ..
            } => direction * length,
        }
    }

    /// First point of the segment.
    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    /// Last point of the segment.
    pub fn end(&self) -> Complex64 {
        self.point(1.0)
    }

    /// Arc length of the segment.
    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { start, end } => (end - start).norm(),
            Segment::Arc {
                radius,
                start_angle,
                end_angle,
                ..
            } => radius * (end_angle - start_angle).abs(),
            Segment::Ray { length, .. } => length,
        }
    }

    /// Initial parameter breakpoints, including 0 and 1.
    fn initial_breakpoints(&self) -> Vec<f64> {
        match *self {
            Segment::Ray {
                length,
                first_panel,
                ..
            } if first_panel > 0.0 && first_panel < length => {
                let mut points = alloc::vec![0.0];
                let mut s = first_panel;
                while s < length && points.len() < 200 {
                    points.push(s / length);
                    s *= 2.0;
                }
                points.push(1.0);
                points
            }
            _ => alloc::vec![0.0, 1.0],
        }
    }
}

/// Ordered chain of segments where each segment starts at the end of the
/// previous one.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPath {
    segments: Vec<Segment>,
}

impl ComplexPath {
    /// Relative tolerance used when checking that segments join.
    pub const JOIN_TOLERANCE: f64 = 1e-10;

    /// Builds a path, checking continuity between consecutive segments.
    pub fn new(segments: Vec<Segment>) -> Result<Self, QuadError> {
        if segments.is_empty() {
            return Err(QuadError::EmptyPath);
        }
        for (index, pair) in segments.windows(2).enumerate() {
            let end = pair[0].end();
            let start = pair[1].start();
            let gap = (end - start).norm();
            let scale = 1.0 + end.norm();
            if !(gap <= Self::JOIN_TOLERANCE * scale) {
                return Err(QuadError::Discontinuous {
                    index: index + 1,
                    gap,
                });
            }
        }
        Ok(Self { segments })
    }

    /// Counter-clockwise circle of the given radius.
    pub fn circle(center: Complex64, radius: f64) -> Self {
        Self {
            segments: alloc::vec![Segment::arc(
                center,
                radius,
                -core::f64::consts::PI,
                core::f64::consts::PI
            )],
        }
    }

    /// Segments in traversal order.
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Path traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        let segments = self
            .segments
            .iter()
            .rev()
            .map(|s| match *s {
                Segment::Line { start, end } => Segment::line(end, start),
                Segment::Arc {
                    center,
                    radius,
                    start_angle,
                    end_angle,
                } => Segment::arc(center, radius, end_angle, start_angle),
                Segment::Ray {
                    start,
                    direction,
                    length,
                    ..
                } => Segment::line(start + direction * length, start),
            })
            .collect();
        Self { segments }
    }

    /// Whether the first and last points coincide.
    pub fn is_closed(&self) -> bool {
        let first = self.segments[0].start();
        let last = self.segments[self.segments.len() - 1].end();
        (first - last).norm() <= Self::JOIN_TOLERANCE * (1.0 + first.norm())
    }

    /// Smallest distance between the path and `point`, sampled densely.
    pub fn distance_to(&self, point: Complex64) -> f64 {
        let mut best = f64::INFINITY;
        for segment in &self.segments {
            for k in 0..=256 {
                let t = k as f64 / 256.0;
                best = best.min((segment.point(t) - point).norm());
            }
        }
        best
    }
}

/// Values that can be integrated: complex scalars or fixed-size vectors of
/// complex numbers evaluated together.
pub trait QuadValue: Copy {
    /// Additive identity.
    const ZERO: Self;
    /// Returns `self + factor·other`.
    fn add_scaled(self, factor: Complex64, other: Self) -> Self;
    /// Maximum modulus over components.
    fn max_norm(&self) -> f64;
}

impl QuadValue for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);

    fn add_scaled(self, factor: Complex64, other: Self) -> Self {
        self + factor * other
    }

    fn max_norm(&self) -> f64 {
        self.norm()
    }
}

impl<const K: usize> QuadValue for [Complex64; K] {
    const ZERO: Self = [Complex64::new(0.0, 0.0); K];

    fn add_scaled(self, factor: Complex64, other: Self) -> Self {
        let mut out = self;
        for (o, x) in out.iter_mut().zip(other.iter()) {
            *o += factor * x;
        }
        out
    }

    fn max_norm(&self) -> f64 {
        self.iter().fold(0.0, |acc, v| acc.max(v.norm()))
    }
}

/// Tolerances and limits for [`integrate_path`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Absolute error target.
    pub abs_tol: f64,
    /// Relative error target, measured against the current integral estimate.
    pub rel_tol: f64,
    /// Maximum number of panel bisections.
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 4000,
        }
    }
}

impl QuadOptions {
    /// Options with the given tolerances and the default subdivision cap.
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), QuadError> {
        if !(self.abs_tol >= 0.0 && self.rel_tol >= 0.0) || (self.abs_tol == 0.0 && self.rel_tol == 0.0) {
            return Err(QuadError::InvalidParameter("tolerances must be non-negative and not both zero"));
        }
        Ok(())
    }
}

/// Integral estimate with its error bound and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadResult<V = Complex64> {
    /// Integral estimate.
    pub value: V,
    /// Sum over panels of the Kronrod–Gauss difference.
    pub abs_err: f64,
    /// Number of integrand evaluations.
    pub evaluations: usize,
    /// Non-fatal conditions, such as ray truncation tails.
    pub warnings: Vec<QuadWarning>,
}

struct Panel<V> {
    segment: usize,
    t0: f64,
    t1: f64,
    value: V,
    err: f64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<V> Eq for Panel<V> {}

impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.segment.cmp(&self.segment))
            .then_with(|| other.t0.total_cmp(&self.t0))
    }
}

fn check_finite<V: QuadValue>(value: &V, at: Complex64) -> Result<(), QuadError> {
    if value.max_norm().is_finite() {
        Ok(())
    } else {
        Err(QuadError::NonFinite { re: at.re, im: at.im })
    }
}

/// Applies the 15-point Kronrod rule and the embedded 7-point Gauss rule to
/// one panel, returning the Kronrod value and `|K − G|`.
fn gauss_kronrod<V, F>(f: &F, segment: &Segment, t0: f64, t1: f64) -> Result<(V, f64), QuadError>
where
    V: QuadValue,
    F: Fn(Complex64) -> V,
{
    let center = 0.5 * (t0 + t1);
    let half = 0.5 * (t1 - t0);
    let mut kronrod = V::ZERO;
    let mut gauss = V::ZERO;
    let mut roundoff = 0.0;
    let eval = |t: f64| -> Result<(V, Complex64), QuadError> {
        let z = segment.point(t);
        let value = f(z);
        check_finite(&value, z)?;
        Ok((value, segment.derivative(t) * half))
    };
    let (fc, dc) = eval(center)?;
    kronrod = kronrod.add_scaled(dc * WGK[7], fc);
    gauss = gauss.add_scaled(dc * WG[3], fc);
    roundoff += WGK[7] * (fc.max_norm() * dc.norm());
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let (f1, d1) = eval(center - half * x)?;
        let (f2, d2) = eval(center + half * x)?;
        kronrod = kronrod.add_scaled(d1 * WGK[j], f1).add_scaled(d2 * WGK[j], f2);
        if j % 2 == 1 {
            let w = WG[j / 2];
            gauss = gauss.add_scaled(d1 * w, f1).add_scaled(d2 * w, f2);
        }
        roundoff += WGK[j] * (f1.max_norm() * d1.norm() + f2.max_norm() * d2.norm());
    }
    let diff = kronrod.add_scaled(Complex64::new(-1.0, 0.0), gauss).max_norm();
    Ok((kronrod, diff.max(50.0 * f64::EPSILON * roundoff)))
}

/// Integrates `f` along `path` with globally adaptive Gauss–Kronrod
/// quadrature.
///
/// Panels are bisected in order of decreasing error estimate until the summed
/// estimate drops below `max(abs_tol, rel_tol·|I|)`. The panel order is fully
/// determined by the inputs, so repeated calls give identical results.
pub fn integrate_path<V, F>(f: F, path: &ComplexPath, options: &QuadOptions) -> Result<QuadResult<V>, QuadError>
where
    V: QuadValue,
    F: Fn(Complex64) -> V,
{
    options.validate()?;
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for (index, segment) in path.segments.iter().enumerate() {
        let breakpoints = segment.initial_breakpoints();
        for pair in breakpoints.windows(2) {
            let (value, err) = gauss_kronrod(&f, segment, pair[0], pair[1])?;
            evaluations += 15;
            heap.push(Panel {
                segment: index,
                t0: pair[0],
                t1: pair[1],
                value,
                err,
            });
        }
    }

    let mut subdivisions = 0;
    loop {
        let (total, total_err) = sum_panels(&heap);
        let target = options.abs_tol.max(options.rel_tol * total.max_norm());
        if total_err <= target {
            break;
        }
        if subdivisions >= options.max_subdivisions {
            return Err(QuadError::MaxSubdivisions {
                limit: options.max_subdivisions,
                abs_err: total_err,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.t0 + worst.t1);
        if !(mid > worst.t0 && mid < worst.t1) {
            return Err(QuadError::MaxSubdivisions {
                limit: subdivisions,
                abs_err: total_err,
            });
        }
        let segment = &path.segments[worst.segment];
        for (t0, t1) in [(worst.t0, mid), (mid, worst.t1)] {
            let (value, err) = gauss_kronrod(&f, segment, t0, t1)?;
            evaluations += 15;
            heap.push(Panel {
                segment: worst.segment,
                t0,
                t1,
                value,
                err,
            });
        }
        subdivisions += 1;
    }

    let (value, abs_err) = sum_panels(&heap);
    let mut warnings = Vec::new();
    for (index, segment) in path.segments.iter().enumerate() {
        if let Segment::Ray { .. } = segment {
            let tail = ray_tail_estimate(&f, segment);
            if tail > options.abs_tol.max(options.rel_tol * value.max_norm()) {
                warnings.push(QuadWarning::Truncation {
                    segment: index,
                    tail_estimate: tail,
                });
            }
        }
    }
    Ok(QuadResult {
        value,
        abs_err,
        evaluations,
        warnings,
    })
}

/// Sums panel values in a canonical order so the result does not depend on
/// the heap layout.
fn sum_panels<V: QuadValue>(heap: &BinaryHeap<Panel<V>>) -> (V, f64) {
    let mut panels: Vec<&Panel<V>> = heap.iter().collect();
    panels.sort_by(|a, b| a.segment.cmp(&b.segment).then(a.t0.total_cmp(&b.t0)));
    let one = Complex64::new(1.0, 0.0);
    panels
        .iter()
        .fold((V::ZERO, 0.0), |(acc, err), p| (acc.add_scaled(one, p.value), err + p.err))
}

/// Estimates the neglected tail of a truncated ray by fitting an exponential
/// envelope to the integrand modulus near its end.
fn ray_tail_estimate<V, F>(f: &F, segment: &Segment) -> f64
where
    V: QuadValue,
    F: Fn(Complex64) -> V,
{
    let length = segment.length();
    let step = length / 16.0;
    let end = f(segment.point(1.0)).max_norm();
    let before = f(segment.point(1.0 - step / length)).max_norm();
    if !(end > 0.0) {
        return 0.0;
    }
    if before > end {
        end * step / (before / end).ln()
    } else {
        end * length
    }
}

/// Cutoff `T` such that an exponential envelope `e^{−t/scale}` has fallen
/// below `abs_tol` at `t = T`.
pub fn truncate_ray(scale: f64, abs_tol: f64) -> Result<f64, QuadError> {
    truncate_ray_with_power(scale, 1.0, abs_tol)
}

/// Cutoff `T` such that the envelope `e^{−(t/scale)^power}` has fallen below
/// `abs_tol` at `t = T`.
pub fn truncate_ray_with_power(scale: f64, power: f64, abs_tol: f64) -> Result<f64, QuadError> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(QuadError::InvalidParameter("decay scale must be positive and finite"));
    }
    if !(power > 0.0) {
        return Err(QuadError::InvalidParameter("envelope power must be positive"));
    }
    if !(abs_tol > 0.0 && abs_tol < 1.0) {
        return Err(QuadError::InvalidParameter("truncation tolerance must lie in (0, 1)"));
    }
    Ok(scale * (-abs_tol.ln()).powf(1.0 / power))
}

/// Length along a ray at which `log_magnitude(s)` first drops below
/// `threshold`, found by geometric growth from `initial`.
///
/// `log_magnitude` returns the logarithm of the integrand envelope relative
/// to its value at the ray start. Growth stops after `max_doublings` steps.
pub fn ray_cutoff<L>(log_magnitude: L, initial: f64, threshold: f64, max_doublings: usize) -> f64
where
    L: Fn(f64) -> f64,
{
    let mut length = initial;
    for _ in 0..max_doublings {
        if log_magnitude(length) < threshold {
            return length;
        }
        length *= 1.5;
    }
    length
}

/// Integrates a real-parameter function over `[a, b]` with optional interior
/// breakpoints, using the same adaptive rule as [`integrate_path`].
pub fn integrate_interval<V, F>(f: F, a: f64, b: f64, breakpoints: &[f64], options: &QuadOptions) -> Result<QuadResult<V>, QuadError>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    if a == b {
        return Ok(QuadResult {
            value: V::ZERO,
            abs_err: 0.0,
            evaluations: 0,
            warnings: Vec::new(),
        });
    }
    let mut points: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    points.push(a);
    points.extend(breakpoints.iter().copied().filter(|&x| (x - a) * (b - x) > 0.0));
    points.push(b);
    if a <= b {
        points.sort_by(f64::total_cmp);
    } else {
        points.sort_by(|x, y| y.total_cmp(x));
    }
    points.dedup();
    let segments = points
        .windows(2)
        .map(|w| Segment::line(Complex64::new(w[0], 0.0), Complex64::new(w[1], 0.0)))
        .collect();
    let path = ComplexPath::new(segments)?;
    integrate_path(|z: Complex64| f(z.re), &path, options)
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[−1, 1]`,
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut derivative = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            derivative = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / derivative;
            x -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        rule.push((x, 2.0 / ((1.0 - x * x) * derivative * derivative)));
    }
    rule
}
