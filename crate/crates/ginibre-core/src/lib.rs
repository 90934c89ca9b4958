//! Numerical building blocks for the smallest singular value of shifted
//! Ginibre matrices `X − z`.
//!
//! The crate is `no_std` with `alloc`. It provides
//!
//! * [`mde`]: the self-consistent density of states of `(X − z)(X − z)*`,
//!   its spectral edges and the critical scale `c(N, z)`;
//! * [`quadrature`]: adaptive Gauss–Kronrod integration along complex paths;
//! * [`complex_onepoint`] and [`real_onepoint`]: exact finite-`N` contour
//!   integral representations of `E Tr (Y − w)⁻¹` for complex and real
//!   Gaussian matrices, with saddle-point and critical-scale asymptotics;
//! * [`bessel`] and [`bessel_kernel`]: modified Bessel functions of complex
//!   argument and the limiting critical kernel;
//! * [`statistics`]: empirical distribution tools and the reference tail laws.
#![no_std]

extern crate alloc;

pub mod bessel;
pub mod bessel_kernel;
pub mod complex_onepoint;
pub mod mde;
pub mod params;
pub mod phase;
pub mod quadrature;
pub mod real_onepoint;
pub mod statistics;

pub use num_complex::Complex64;
pub use params::ShiftParams;
