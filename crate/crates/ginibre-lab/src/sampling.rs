//! Seeded Monte Carlo sampling of shifted Ginibre matrices.
//!
//! Every draw `i` gets its own ChaCha stream seeded from
//! `(master_seed, i, attempt)`, so results do not depend on how rayon
//! schedules the work. Aggregates are always reduced in sample order.

use ginibre_core::statistics::Symmetry;
use ginibre_core::Complex64;
use nalgebra::linalg::SVD;
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "GINIBRE_LAB_THREADS";

/// Number of re-draws with fresh seeds after a failed decomposition.
pub const MAX_RETRIES: u32 = 3;

const SVD_MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum McError {
    #[error("invalid ensemble: {0}")]
    InvalidSpec(&'static str),
    #[error("singular value decomposition failed for sample {sample_index} after {attempts} attempts")]
    LinAlgFailure { sample_index: usize, attempts: u32 },
    #[error("invalid {THREADS_ENV} value {0:?}")]
    InvalidThreads(String),
    #[error("could not build the worker pool: {0}")]
    Pool(String),
}

/// Matrix size, symmetry class, shift, sample count and master seed.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EnsembleSpec {
    pub n: usize,
    #[serde(serialize_with = "serialize_symmetry")]
    pub symmetry: Symmetry,
    #[serde(serialize_with = "serialize_complex")]
    pub z: Complex64,
    pub n_samples: usize,
    pub master_seed: u64,
}

fn serialize_symmetry<S: serde::Serializer>(symmetry: &Symmetry, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(symmetry_name(*symmetry))
}

fn serialize_complex<S: serde::Serializer>(z: &Complex64, serializer: S) -> Result<S::Ok, S::Error> {
    use serde::Serialize;
    [z.re, z.im].serialize(serializer)
}

/// Lower-case name of a symmetry class, as used on the command line.
pub fn symmetry_name(symmetry: Symmetry) -> &'static str {
    match symmetry {
        Symmetry::Real => "real",
        Symmetry::Complex => "complex",
    }
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<(), McError> {
        if self.n < 2 {
            return Err(McError::InvalidSpec("matrix size must be at least 2"));
        }
        if self.n_samples == 0 {
            return Err(McError::InvalidSpec("at least one sample is required"));
        }
        if !(self.z.re.is_finite() && self.z.im.is_finite()) {
            return Err(McError::InvalidSpec("shift must be finite"));
        }
        Ok(())
    }
}

/// Smallest eigenvalue of `(X − z)(X − z)*` for one draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSample {
    pub lambda1: f64,
    pub sample_index: usize,
    /// Seed of the stream that produced the accepted draw.
    pub seed: u64,
}

/// A draw whose decomposition failed on every retry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FailedSample {
    pub sample_index: usize,
    pub attempts: u32,
}

/// Successful draws in sample order plus the draws that were given up.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRun<T> {
    pub samples: Vec<T>,
    pub failures: Vec<FailedSample>,
}

/// Spectral parameter of the empirical resolvent trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum McSide {
    /// `Tr(Y + E)⁻¹`.
    NegativeAxis,
    /// `Tr(Y − E − iκ)⁻¹`.
    Regularized { kappa: f64 },
}

/// Sample mean of a resolvent trace and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventEstimate {
    pub energy: f64,
    pub mean: Complex64,
    pub stderr: f64,
}

fn splitmix64(mut state: u64) -> u64 {
    state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of draw `sample_index`, attempt `attempt`, under `master_seed`.
pub fn derive_seed(master_seed: u64, sample_index: usize, attempt: u32) -> u64 {
    let stream = splitmix64(master_seed ^ splitmix64(sample_index as u64));
    splitmix64(stream.wrapping_add(u64::from(attempt)))
}

/// Draws `X − z` with entries of variance `1/N` (complex entries have
/// independent real and imaginary parts of variance `1/(2N)`).
fn shifted_matrix(spec: &EnsembleSpec, seed: u64) -> DMatrix<Complex64> {
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gaussian = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut matrix = match spec.symmetry {
        Symmetry::Real => {
            let scale = (n as f64).sqrt().recip();
            DMatrix::from_fn(n, n, |_, _| Complex64::new(scale * gaussian(), 0.0))
        }
        Symmetry::Complex => {
            let scale = (2.0 * n as f64).sqrt().recip();
            DMatrix::from_fn(n, n, |_, _| {
                let re = gaussian();
                Complex64::new(scale * re, scale * gaussian())
            })
        }
    };
    for i in 0..n {
        matrix[(i, i)] -= spec.z;
    }
    matrix
}

/// Squared singular values of `X − z`, i.e. the eigenvalues of `Y`.
///
/// Real draws with a real shift use the real decomposition.
fn spectrum(spec: &EnsembleSpec, seed: u64) -> Option<Vec<f64>> {
    let matrix = shifted_matrix(spec, seed);
    let singular = if spec.symmetry == Symmetry::Real && spec.z.im == 0.0 {
        let real = matrix.map(|v| v.re);
        SVD::try_new(real, false, false, f64::EPSILON, SVD_MAX_ITERATIONS)?.singular_values
    } else {
        SVD::try_new(matrix, false, false, f64::EPSILON, SVD_MAX_ITERATIONS)?.singular_values
    };
    let eigenvalues: Vec<f64> = singular.iter().map(|s| s * s).collect();
    eigenvalues.iter().all(|v| v.is_finite()).then_some(eigenvalues)
}

/// Draws every sample of `spec`, applies `reduce` to the eigenvalues of `Y`
/// and returns the results in sample order.
///
/// A draw whose decomposition fails is re-drawn from the next derived seed,
/// up to [`MAX_RETRIES`] times.
pub fn run_samples<T, F>(spec: &EnsembleSpec, reduce: F) -> Result<SampleRun<(usize, u64, T)>, McError>
where
    T: Send,
    F: Fn(&[f64]) -> T + Sync,
{
    spec.validate()?;
    let outcomes: Vec<Result<(usize, u64, T), FailedSample>> = (0..spec.n_samples)
        .into_par_iter()
        .map(|index| {
            for attempt in 0..=MAX_RETRIES {
                let seed = derive_seed(spec.master_seed, index, attempt);
                if let Some(eigenvalues) = spectrum(spec, seed) {
                    return Ok((index, seed, reduce(&eigenvalues)));
                }
            }
            Err(FailedSample {
                sample_index: index,
                attempts: MAX_RETRIES + 1,
            })
        })
        .collect();
    let mut run = SampleRun {
        samples: Vec::with_capacity(outcomes.len()),
        failures: Vec::new(),
    };
    for outcome in outcomes {
        match outcome {
            Ok(sample) => run.samples.push(sample),
            Err(failure) => run.failures.push(failure),
        }
    }
    Ok(run)
}

/// Smallest eigenvalue `λ₁` of `Y = (X − z)(X − z)*` for every draw.
pub fn sample_lambda1(spec: &EnsembleSpec) -> Result<SampleRun<TailSample>, McError> {
    let run = run_samples(spec, |eigenvalues| eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))?;
    Ok(SampleRun {
        samples: run
            .samples
            .into_iter()
            .map(|(sample_index, seed, lambda1)| TailSample {
                lambda1,
                sample_index,
                seed,
            })
            .collect(),
        failures: run.failures,
    })
}

/// Sample mean and standard error of `Tr(Y − w)⁻¹` at each energy, all from
/// the same draws.
pub fn empirical_resolvent(spec: &EnsembleSpec, energies: &[f64], side: McSide) -> Result<Vec<ResolventEstimate>, McError> {
    if energies.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(McError::InvalidSpec("energies must be positive and finite"));
    }
    if let McSide::Regularized { kappa } = side {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(McError::InvalidSpec("regularization must be positive and finite"));
        }
    }
    let spectral: Vec<Complex64> = energies
        .iter()
        .map(|&e| match side {
            McSide::NegativeAxis => Complex64::new(-e, 0.0),
            McSide::Regularized { kappa } => Complex64::new(e, kappa),
        })
        .collect();
    let run = run_samples(spec, |eigenvalues| {
        spectral
            .iter()
            .map(|&w| eigenvalues.iter().map(|&s| (Complex64::new(s, 0.0) - w).inv()).sum::<Complex64>())
            .collect::<Vec<_>>()
    })?;
    if let Some(failure) = run.failures.first() {
        return Err(McError::LinAlgFailure {
            sample_index: failure.sample_index,
            attempts: failure.attempts,
        });
    }
    let count = run.samples.len() as f64;
    Ok(energies
        .iter()
        .enumerate()
        .map(|(k, &energy)| {
            let mean = run.samples.iter().map(|(_, _, traces)| traces[k]).sum::<Complex64>() / count;
            let variance = run
                .samples
                .iter()
                .map(|(_, _, traces)| (traces[k] - mean).norm_sqr())
                .sum::<f64>()
                / (count - 1.0).max(1.0);
            ResolventEstimate {
                energy,
                mean,
                stderr: (variance / count).sqrt(),
            }
        })
        .collect())
}

/// Worker pool of `threads` workers, or of the size given by
/// [`THREADS_ENV`] when `threads` is `None`, or rayon's default otherwise.
pub fn worker_pool(threads: Option<usize>) -> Result<rayon::ThreadPool, McError> {
    let requested = match threads {
        Some(count) => Some(count),
        None => match std::env::var(THREADS_ENV) {
            Ok(raw) => match raw.trim().parse::<usize>() {
                Ok(count) if count > 0 => Some(count),
                _ => return Err(McError::InvalidThreads(raw)),
            },
            Err(_) => None,
        },
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(count) = requested {
        builder = builder.num_threads(count.max(1));
    }
    builder.build().map_err(|e| McError::Pool(e.to_string()))
}
