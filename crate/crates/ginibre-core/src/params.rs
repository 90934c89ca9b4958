//! Parameters shared by every formula: the matrix size `N` and the shift `z`.

use num_complex::Complex64;

/// Invalid matrix size or shift.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum ParamError {
    #[error("matrix size must be at least 1")]
    ZeroSize,
    #[error("shift must be finite")]
    NonFiniteShift,
}

/// Matrix size `N` and shift `z` of `Y = (X − z)(X − z)*`.
///
/// `δ = 1 − |z|²` and `η = Im z` are computed on demand so they can never
/// disagree with `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftParams {
    n: usize,
    z: Complex64,
}

impl ShiftParams {
    pub fn new(n: usize, z: Complex64) -> Result<Self, ParamError> {
        if n == 0 {
            return Err(ParamError::ZeroSize);
        }
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(ParamError::NonFiniteShift);
        }
        Ok(Self { n, z })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    /// `|z|²`.
    pub fn abs_z_sq(&self) -> f64 {
        self.z.norm_sqr()
    }

    /// `δ = 1 − |z|²`.
    pub fn delta(&self) -> f64 {
        1.0 - self.z.norm_sqr()
    }

    /// `η = Im z`.
    pub fn eta(&self) -> f64 {
        self.z.im
    }

    /// Critical energy scale `c(N, z)`.
    pub fn scale_c(&self) -> f64 {
        crate::mde::scale_c(self.n, self.delta())
    }
}
