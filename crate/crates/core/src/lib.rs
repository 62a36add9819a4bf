//! Numerics for the Airy process with `r` outliers.
//!
//! The crate evaluates the Airy function, the Hastings–McLeod solution of
//! Painlevé II and the outlier Airy functions, builds the Airy and r-Airy
//! kernels, and computes Fredholm determinants on `(x, ∞)`. On top of that
//! sit the remote-past expansion of the log-probability, finite-difference
//! PDE residual checks, and a finite-n Gaussian ensemble with a rank-r
//! source (moment determinants, Monte Carlo, scaling maps).

pub mod asymptotics;
pub mod error;
pub mod finiten;
pub mod fredholm;
pub mod kernels;
pub mod pde;
pub mod quad;
pub mod specfun;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
