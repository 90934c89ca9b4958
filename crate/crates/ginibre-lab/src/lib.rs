//! Monte Carlo harness, file formats and table builders on top of
//! `ginibre-core`.
//!
//! * [`sampling`]: seeded, thread-count independent sampling of real and
//!   complex Ginibre matrices, smallest eigenvalues of `(X − z)(X − z)*` and
//!   empirical resolvent traces;
//! * [`io`]: CSV tables and JSON run manifests written atomically;
//! * [`commands`]: the tables produced by the `ginibre-lab` binary.

pub mod commands;
pub mod io;
pub mod sampling;
