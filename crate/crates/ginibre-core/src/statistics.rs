//! Empirical distribution functions, Kolmogorov–Smirnov distances and the
//! reference laws for the smallest eigenvalue `λ₁` of `Y = (X − z)(X − z)*`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::params::ShiftParams;

/// Largest rescaled argument and largest `−δ √N` accepted by
/// [`corollary_bound`].
pub const BOUND_RANGE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("empty sample")]
    EmptySample,
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("argument out of range: {0}")]
    Domain(&'static str),
}

/// Real or complex Gaussian entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symmetry {
    Real,
    Complex,
}

/// Right-continuous empirical distribution function `F̂(x) = #{xᵢ ≤ x}/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut values: Vec<f64>) -> Result<Self, StatsError> {
        if values.is_empty() {
            return Err(StatsError::EmptySample);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { sorted: values })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.sorted
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.count_at_most(x) as f64 / self.sorted.len() as f64
    }

    /// Left limit `F̂(x−) = #{xᵢ < x}/n`.
    pub fn eval_left(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v < x) as f64 / self.sorted.len() as f64
    }

    fn count_at_most(&self, x: f64) -> usize {
        self.sorted.partition_point(|&v| v <= x)
    }
}

/// Kolmogorov–Smirnov distance `sup_x |F̂(x) − F(x)|` to a continuous
/// reference distribution function.
///
/// The supremum is attained at a sample point, from the left or the right.
pub fn ks_distance<F: Fn(f64) -> f64>(cdf: &EmpiricalCdf, reference: F) -> f64 {
    let n = cdf.len() as f64;
    let values = cdf.values();
    let mut worst = 0.0f64;
    let mut start = 0;
    while start < values.len() {
        let x = values[start];
        let mut end = start;
        while end < values.len() && values[end] == x {
            end += 1;
        }
        let reference_value = reference(x);
        let below = start as f64 / n;
        let at = end as f64 / n;
        worst = worst.max((at - reference_value).abs()).max((reference_value - below).abs());
        start = end;
    }
    worst
}

/// Two-sample Kolmogorov–Smirnov distance `sup_x |F̂₁(x) − F̂₂(x)|`.
pub fn ks_two_sample(first: &EmpiricalCdf, second: &EmpiricalCdf) -> f64 {
    first
        .values()
        .iter()
        .chain(second.values())
        .map(|&x| (first.eval(x) - second.eval(x)).abs())
        .fold(0.0, f64::max)
}

/// Limiting distribution of `N² λ₁(XX*)` for unshifted Ginibre matrices:
/// `1 − e^{−x}` (complex) and `1 − e^{−x/2 − √x}` (real).
pub fn edelman_cdf(x: f64, symmetry: Symmetry) -> Result<f64, StatsError> {
    if !(x >= 0.0) {
        return Err(StatsError::Domain("Edelman law is defined for x ≥ 0"));
    }
    let exponent = match symmetry {
        Symmetry::Complex => -x,
        Symmetry::Real => -x / 2.0 - x.sqrt(),
    };
    Ok(-exponent.exp_m1())
}

/// Shape of the tail bound for `P(λ₁ ≤ c(N, z) x)` up to an absolute
/// constant: `(1 + |log x|) x` for complex matrices and
/// `e^{−N η²/2} √x + (1 + |log x|) x` for real ones.
pub fn corollary_bound(x: f64, params: &ShiftParams, symmetry: Symmetry) -> Result<f64, StatsError> {
    if !(x > 0.0 && x <= BOUND_RANGE) {
        return Err(StatsError::Domain("tail bound requires 0 < x ≤ 10"));
    }
    let n = params.n() as f64;
    if !(params.delta() > -BOUND_RANGE / n.sqrt()) {
        return Err(StatsError::Domain("tail bound requires 1 − |z|² > −10/√N"));
    }
    let log_term = (1.0 + x.ln().abs()) * x;
    Ok(match symmetry {
        Symmetry::Complex => log_term,
        Symmetry::Real => real_suppression(params) * x.sqrt() + log_term,
    })
}

/// `e^{−N η²/2}`, the suppression of the real-spectrum contribution.
pub fn real_suppression(params: &ShiftParams) -> f64 {
    let eta = params.eta();
    (-(params.n() as f64) * eta * eta / 2.0).exp()
}
