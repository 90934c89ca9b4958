//! Self-consistent density of states of `Y = (X − z)(X − z)*`.
//!
//! The Stieltjes transform `m(w)` of the limiting eigenvalue density of `Y`
//! solves `1/m + w(1 + m) − |z|²/(1 + m) = 0`, equivalently the cubic
//! `w m³ + 2w m² + (w + δ) m + 1 = 0` with `δ = 1 − |z|²`. Boundary values
//! `m(E + i0)` on the real axis are computed in closed form and polished with
//! Newton steps. The density support is `[0, e₊]` for `δ ≥ 0` and
//! `[e₋, e₊]` for `δ < 0`, with square-root vanishing at both edges.

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use num_complex::Complex64;

/// Errors from the self-consistent equation solvers.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum MdeError {
    /// An input lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(&'static str),
    /// No root satisfies the selection rule.
    #[error("no admissible root of the self-consistent equation")]
    NoAdmissibleRoot,
}

/// `δ = 1 − |z|²`.
pub fn delta_of(z: Complex64) -> f64 {
    1.0 - z.norm_sqr()
}

/// A value of the Stieltjes transform with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StieltjesValue {
    /// The selected root.
    pub m: Complex64,
    /// Residual of the cubic at `m`, relative to the size of its terms.
    pub residual: f64,
    /// Set when the cubic discriminant is numerically zero, that is when the
    /// energy sits on a spectral edge up to rounding.
    pub near_edge: bool,
}

/// Spectral edges of the density of `Y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edges {
    /// Lower edge `e₋`, present only when `δ < 0`.
    pub lower: Option<f64>,
    /// Upper edge `e₊`.
    pub upper: f64,
}

/// Square-root slopes at the spectral edges: `Im m(e₊ − λ) ≈ upper·√λ` and,
/// for `δ < 0`, `Im m(e₋ + λ) ≈ lower·√λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSlopes {
    /// Slope at the lower edge, present only when `δ < 0`.
    pub lower: Option<f64>,
    /// Slope at the upper edge.
    pub upper: f64,
}

/// Real cube root.
pub(crate) fn real_cbrt(x: f64) -> f64 {
    x.cbrt()
}

/// Cube root of a complex number: the real root for real input, otherwise
/// the root with largest real part.
pub(crate) fn cube_root(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        Complex64::new(real_cbrt(z.re), 0.0)
    } else {
        Complex64::from_polar(z.norm().cbrt(), z.arg() / 3.0)
    }
}

/// The three roots of the monic cubic `x³ + b x² + c x + d`, polished with
/// Newton steps.
pub fn cubic_roots(b: Complex64, c: Complex64, d: Complex64) -> [Complex64; 3] {
    let shift = b / 3.0;
    // Depressed cubic t³ + 3p t − 2q with x = t − b/3.
    let p = (c - b * b / 3.0) / 3.0;
    let q = -(2.0 * b * b * b / 27.0 - b * c / 3.0 + d) / 2.0;
    let disc = (q * q + p * p * p).sqrt();
    let u3 = if (q + disc).norm() >= (q - disc).norm() {
        q + disc
    } else {
        q - disc
    };
    let omega = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let mut roots = [Complex64::new(0.0, 0.0); 3];
    if u3.norm() == 0.0 {
        roots = [-shift; 3];
    } else {
        let u = cube_root(u3);
        let mut rot = Complex64::new(1.0, 0.0);
        for root in roots.iter_mut() {
            let uk = u * rot;
            *root = uk - p / uk - shift;
            rot *= omega;
        }
    }
    let poly = |x: Complex64| ((x + b) * x + c) * x + d;
    let dpoly = |x: Complex64| (3.0 * x + 2.0 * b) * x + c;
    for root in roots.iter_mut() {
        *root = newton_polish(*root, &poly, &dpoly);
    }
    roots
}

/// A few Newton steps, keeping the iterate with the smallest residual.
fn newton_polish<P, D>(start: Complex64, poly: &P, dpoly: &D) -> Complex64
where
    P: Fn(Complex64) -> Complex64,
    D: Fn(Complex64) -> Complex64,
{
    let mut best = start;
    let mut best_res = poly(start).norm();
    let mut x = start;
    for _ in 0..4 {
        let slope = dpoly(x);
        if slope.norm() == 0.0 {
            break;
        }
        x -= poly(x) / slope;
        let res = poly(x).norm();
        if !res.is_finite() {
            break;
        }
        if res < best_res {
            best = x;
            best_res = res;
        } else {
            break;
        }
    }
    best
}

/// Relative residual of `w m³ + 2w m² + (w + δ) m + 1` at `m`.
fn residual_y(m: Complex64, w: Complex64, delta: f64) -> f64 {
    let value = ((w * m + 2.0 * w) * m + (w + delta)) * m + 1.0;
    let m_abs = m.norm();
    let scale = w.norm() * (m_abs.powi(3) + 2.0 * m_abs * m_abs + m_abs) + delta.abs() * m_abs + 1.0;
    value.norm() / scale
}

/// Boundary value `m(E + i0)` for `E > 0`, the real value `m(E)` for
/// `E < 0`, and `m(0) = −1/δ` when `δ < 0`.
///
/// For `E > 0` the root is given by Cardano's formula with the branch fixed
/// by the sign of the discriminant: inside the support the root with positive
/// imaginary part, outside it the real root continuous with the bulk.
pub fn solve_mde_y(energy: f64, delta: f64) -> Result<StieltjesValue, MdeError> {
    if !energy.is_finite() || !delta.is_finite() {
        return Err(MdeError::Domain("energy and δ must be finite"));
    }
    if delta > 1.0 {
        return Err(MdeError::Domain("δ = 1 − |z|² cannot exceed 1"));
    }
    if energy == 0.0 {
        if delta < 0.0 {
            let m = Complex64::new(-1.0 / delta, 0.0);
            return Ok(StieltjesValue {
                m,
                residual: 0.0,
                near_edge: false,
            });
        }
        return Err(MdeError::Domain("m(0) diverges when δ ≥ 0"));
    }
    if energy < 0.0 {
        return solve_negative_axis(energy, delta);
    }

    let q = delta / (3.0 * energy) + 1.0 / 27.0 - 1.0 / (2.0 * energy);
    let p = delta / (3.0 * energy) - 1.0 / 9.0;
    let p3 = p * p * p;
    let disc = q * q + p3;
    let near_edge = disc.abs() <= 1e-10 * (q * q).max(p3.abs());
    let m = if disc >= 0.0 {
        let s = disc.sqrt();
        // (q + s)(q − s) = −p³, so the smaller factor is recovered by division.
        let (big, small) = if q >= 0.0 {
            let big = q + s;
            (big, if big != 0.0 { -p3 / big } else { 0.0 })
        } else {
            let small = q - s;
            (if small != 0.0 { -p3 / small } else { 0.0 }, small)
        };
        let r_plus = real_cbrt(big);
        let r_minus = real_cbrt(small);
        let sqrt3_half = 3.0.sqrt() / 2.0;
        Complex64::new(-(r_plus + r_minus) / 2.0 - 2.0 / 3.0, sqrt3_half * (r_plus - r_minus))
    } else {
        let c = cube_root(Complex64::new(q, (-disc).sqrt()));
        let below_support = delta < 0.0 && energy < midpoint_outside(delta);
        let rotated = if below_support {
            Complex64::from_polar(1.0, -2.0 * PI / 3.0) * c
        } else {
            c
        };
        Complex64::new(2.0 * rotated.re - 2.0 / 3.0, 0.0)
    };
    let w = Complex64::new(energy, 0.0);
    let poly = |x: Complex64| ((w * x + 2.0 * w) * x + (w + delta)) * x + 1.0;
    let dpoly = |x: Complex64| (3.0 * w * x + 4.0 * w) * x + (w + delta);
    let mut m = newton_polish(m, &poly, &dpoly);
    if disc < 0.0 || m.im < 0.0 {
        m.im = 0.0;
    }
    Ok(StieltjesValue {
        m,
        residual: residual_y(m, w, delta),
        near_edge,
    })
}

/// Geometric mean of the two edges, used to decide which side of the support
/// a real root belongs to.
fn midpoint_outside(delta: f64) -> f64 {
    let lower = lower_edge_unchecked(delta);
    let upper = upper_edge_unchecked(delta);
    (lower * upper).sqrt()
}

/// For `E < 0` the transform is real and positive; it is the unique positive
/// root of the cubic.
fn solve_negative_axis(energy: f64, delta: f64) -> Result<StieltjesValue, MdeError> {
    let w = Complex64::new(energy, 0.0);
    let roots = cubic_roots(
        Complex64::new(2.0, 0.0),
        (w + delta) / w,
        Complex64::new(1.0 / energy, 0.0),
    );
    let scale = roots.iter().fold(0.0f64, |a, r| a.max(r.norm()));
    let m = roots
        .iter()
        .filter(|r| r.im.abs() <= 1e-8 * (1.0 + scale) && r.re > 0.0)
        .map(|r| r.re)
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))))
        .ok_or(MdeError::NoAdmissibleRoot)?;
    let m = Complex64::new(m, 0.0);
    Ok(StieltjesValue {
        m,
        residual: residual_y(m, w, delta),
        near_edge: false,
    })
}

/// Whether `m` can be the Stieltjes transform at `w` of a probability measure:
/// `Im m > 0` and the Cauchy–Schwarz bound `Im m ≥ Im w·|m|²`.
fn is_admissible(m: Complex64, w: Complex64) -> bool {
    m.im > 0.0 && m.im >= w.im * m.norm_sqr() * (1.0 - 1e-6)
}

/// Picks the admissible root, preferring the one with largest imaginary part
/// when several pass the test.
fn select_upper(roots: &[Complex64; 3], w: Complex64) -> Result<Complex64, MdeError> {
    select_upper_where(roots, w, |_| true)
}

fn select_upper_where(
    roots: &[Complex64; 3],
    w: Complex64,
    extra: impl Fn(Complex64) -> bool,
) -> Result<Complex64, MdeError> {
    roots
        .iter()
        .copied()
        .filter(|&m| is_admissible(m, w) && extra(m))
        .fold(None, |acc: Option<Complex64>, m| match acc {
            Some(best) if best.im >= m.im => Some(best),
            _ => Some(m),
        })
        .ok_or(MdeError::NoAdmissibleRoot)
}

/// `m(w)` for `Im w > 0`: the root of `w m³ + 2w m² + (w + δ) m + 1` which is
/// the Stieltjes transform of a probability measure on `[0, ∞)`.
pub fn solve_mde_y_complex(w: Complex64, delta: f64) -> Result<StieltjesValue, MdeError> {
    if !(w.im > 0.0) {
        return Err(MdeError::Domain("spectral parameter must lie in the upper half-plane"));
    }
    let roots = cubic_roots(Complex64::new(2.0, 0.0), (w + delta) / w, 1.0 / w);
    // A measure on [0, ∞) also has Im(w m(w)) ≥ 0.
    let m = select_upper_where(&roots, w, |m| {
        let wm = w * m;
        wm.im >= -1e-9 * wm.norm()
    })?;
    Ok(StieltjesValue {
        m,
        residual: residual_y(m, w, delta),
        near_edge: false,
    })
}

/// Stieltjes transform of the Hermitization `H = [[0, X − z], [(X − z)*, 0]]`
/// for `Im w > 0`: the root of `1/m + (w + m) − |z|²/(w + m) = 0` with
/// positive imaginary part.
pub fn solve_mde_h(w: Complex64, abs_z_sq: f64) -> Result<Complex64, MdeError> {
    if !(w.im > 0.0) {
        return Err(MdeError::Domain("spectral parameter must lie in the upper half-plane"));
    }
    if !(abs_z_sq >= 0.0) {
        return Err(MdeError::Domain("|z|² must be non-negative"));
    }
    let delta = 1.0 - abs_z_sq;
    let roots = cubic_roots(2.0 * w, w * w + delta, w);
    select_upper(&roots, w)
}

fn edge_root(delta: f64) -> f64 {
    (9.0 - 8.0 * delta).sqrt()
}

fn upper_edge_unchecked(delta: f64) -> f64 {
    let s = edge_root(delta);
    (s + 3.0).powi(3) / (8.0 * (s + 1.0))
}

fn lower_edge_unchecked(delta: f64) -> f64 {
    if delta >= 0.0 {
        return 0.0;
    }
    let s = edge_root(delta);
    -64.0 * delta.powi(3) / ((s + 3.0).powi(3) * (s - 1.0))
}

/// Spectral edges `e₋ < e₊` of the density of `Y`.
///
/// Evaluated in a factored form that stays accurate as `δ → 0⁻`, where
/// `e₋ ≈ −4δ³/27`.
pub fn edges(delta: f64) -> Result<Edges, MdeError> {
    if !(delta <= 1.0) {
        return Err(MdeError::Domain("δ = 1 − |z|² cannot exceed 1"));
    }
    Ok(Edges {
        lower: (delta < 0.0).then(|| lower_edge_unchecked(delta)),
        upper: upper_edge_unchecked(delta),
    })
}

/// Edge slopes `γ±` with `Im m(e₊ − λ) ≈ γ₊√λ` and `Im m(e₋ + λ) ≈ γ₋√λ`.
pub fn edge_slopes(delta: f64) -> Result<EdgeSlopes, MdeError> {
    if !(delta <= 1.0) {
        return Err(MdeError::Domain("δ = 1 − |z|² cannot exceed 1"));
    }
    let s = edge_root(delta);
    let slope = |sign: f64, s_minus_3: f64| {
        2.0 * 2.0.sqrt() * (s + sign).powf(1.5) / (s_minus_3.powf(2.5) * s.sqrt())
    };
    let upper = slope(1.0, s + 3.0);
    let lower = (delta < 0.0).then(|| slope(-1.0, -8.0 * delta / (s + 3.0)));
    Ok(EdgeSlopes { lower, upper })
}

/// Value of `m` at the edges: `m(e±) = −2/(3 ± √(9 − 8δ))`.
pub fn edge_values(delta: f64) -> Result<(Option<f64>, f64), MdeError> {
    if !(delta <= 1.0) {
        return Err(MdeError::Domain("δ = 1 − |z|² cannot exceed 1"));
    }
    let s = edge_root(delta);
    Ok(((delta < 0.0).then(|| -2.0 / (3.0 - s)), -2.0 / (3.0 + s)))
}

/// Limiting eigenvalue density `ρ(E) = Im m(E + i0)/π` of `Y`; zero for
/// `E ≤ 0`.
pub fn density(energy: f64, delta: f64) -> Result<f64, MdeError> {
    if energy <= 0.0 {
        if delta > 1.0 {
            return Err(MdeError::Domain("δ = 1 − |z|² cannot exceed 1"));
        }
        return Ok(0.0);
    }
    Ok(solve_mde_y(energy, delta)?.m.im.max(0.0) / PI)
}

/// Density of the Hermitization `H` at `ζ > 0`: `ρ_H(ζ) = ζ·ρ(ζ²)`.
pub fn density_h(zeta: f64, delta: f64) -> Result<f64, MdeError> {
    Ok(zeta.abs() * density(zeta * zeta, delta)?)
}

/// The root `Ψ(r)` of `1 + rΨ + Ψ³ = 0` with positive real and imaginary
/// parts; `Ψ(0) = e^{iπ/3}` and `Ψ(r) ≈ i√r` for large `r`.
///
/// Defined for `r > −3/4^{1/3}`, below which all three roots are real.
pub fn psi(r: f64) -> Result<Complex64, MdeError> {
    let threshold = -3.0 / 4.0.cbrt();
    if !(r > threshold) || !r.is_finite() {
        return Err(MdeError::Domain("Ψ(r) needs r > −3/4^{1/3}"));
    }
    let zero = Complex64::new(0.0, 0.0);
    let roots = cubic_roots(zero, Complex64::new(r, 0.0), Complex64::new(1.0, 0.0));
    roots
        .iter()
        .copied()
        .filter(|x| x.re > 0.0 && x.im > 0.0)
        .fold(None, |acc: Option<Complex64>, x| match acc {
            Some(best) if best.im >= x.im => Some(best),
            _ => Some(x),
        })
        .ok_or(MdeError::NoAdmissibleRoot)
}

/// Critical energy scale `c(N, z) = min(N^{−3/2}, 1/(N²|δ|))`.
pub fn scale_c(n: usize, delta: f64) -> f64 {
    let n = n as f64;
    let small = n.powf(-1.5);
    if delta == 0.0 {
        small
    } else {
        small.min(1.0 / (n * n * delta.abs()))
    }
}
