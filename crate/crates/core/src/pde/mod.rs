//! Finite-difference residuals of the r-Airy PDE and of the finite-n
//! fourth-order PDE.

pub mod dual;
pub mod finite;
pub mod rairy;
pub mod stencil;

pub use finite::{finite_n_pde_residual, FiniteResidual, VirasoroBlocks};
pub use rairy::{local_surface, q_surface, r_airy_pde_residual, PdeJet, RAiryResidual, Surface};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub residual: f64,
    /// Largest absolute value among the individual terms.
    pub normalization: f64,
    pub relative: f64,
    /// Stencil steps in the two directions.
    pub steps: (f64, f64),
}

impl ResidualReport {
    pub fn new(residual: f64, normalization: f64, steps: (f64, f64)) -> Result<Self> {
        if !(normalization > 0.0) || !normalization.is_finite() {
            return Err(Error::DegenerateNormalization);
        }
        Ok(Self { residual, normalization, relative: residual.abs() / normalization, steps })
    }
}
