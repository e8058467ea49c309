//! Maximum-entropy 3D MIMO channel model and the distribution of its mutual
//! information.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: site placement, line-of-sight elevation and the Laplacian /
//!   Von Mises path-angle spectra.
//! - [`array`]: port radiation pattern, array responses and the deterministic
//!   matrices `A` and `B`.
//! - [`channel`]: channel realizations `H = (1/√N)·B·diag(α)·Aᴴ`, mutual
//!   information and the multi-cell interference covariance.
//! - [`exact_dist`]: the quadratic-form kernel `C` and the exact (single
//!   receive port) and low-SINR CDFs, with a characteristic-function
//!   inversion oracle.
//! - [`asymptotic_dist`]: the large-array Gaussian approximation.
//! - [`harness`]: scenario configuration, Monte Carlo, KS comparison, tilt
//!   sweeps and CSV output.

pub mod array;
pub mod asymptotic_dist;
pub mod channel;
pub mod error;
pub mod exact_dist;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod quadrature;
pub mod rng;

pub use error::{Error, Result};
