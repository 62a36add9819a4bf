//! Gaussian Hermitian ensemble with a rank-`k1` external source.

pub mod geometry;
pub mod identities;
pub mod moments;
pub mod rate;
pub mod sampler;

pub use geometry::{
    brownian_to_matrix, cusp_from_q, cusp_geometry, edge_curve, inverse_root_variance, matrix_to_brownian, tangency_point, time_change, time_change_inverse,
    BrownianScaling, CuspGeometry,
};
pub use identities::{kp_identity_check, virasoro_check, IdentityCheck, ResidualPair};
pub use moments::{pn_probability, pn_probability_with, tau_blocks, tau_moment_det, MAX_N};
pub use rate::{convergence_rate, convergence_rate_with, RateReport};
pub use sampler::{edge_rescale, sample_edges, sample_lambda_max, sample_spectrum, SpectrumSample};

use crate::{Error, Result};

/// `n × n` ensemble `A + H`, `A = diag(α, …, α, 0, …, 0)` with `k1` copies of `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceEnsemble {
    pub n: usize,
    pub k1: usize,
    pub alpha: f64,
}

impl SourceEnsemble {
    pub fn new(n: usize, k1: usize, alpha: f64) -> Result<Self> {
        if k1 > n {
            return Err(Error::InvalidArgument(format!("k1 = {k1} exceeds n = {n}")));
        }
        if !(alpha >= 0.0) {
            return Err(Error::InvalidArgument(format!("alpha = {alpha} must be >= 0")));
        }
        Ok(Self { n, k1, alpha })
    }

    pub fn k2(&self) -> usize {
        self.n - self.k1
    }

    /// Péché scaling `α = ρ√n e^{τ/n^{1/3}}`.
    pub fn peche(n: usize, k1: usize, rho: f64, tau: f64) -> Result<Self> {
        let nf = n as f64;
        Self::new(n, k1, rho * nf.sqrt() * (tau / nf.cbrt()).exp())
    }
}

/// Integration set for the moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    WholeLine,
    /// `(−∞, b)`.
    HalfLine(f64),
}

/// Deformation variables of the moment weights.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MomentDeformation {
    pub t1: f64,
    pub t2: f64,
    pub s1: f64,
    pub s2: f64,
    pub u1: f64,
    pub u2: f64,
    pub beta: f64,
}

impl MomentDeformation {
    pub fn validate(&self) -> Result<()> {
        if self.beta >= 0.5 {
            return Err(Error::DivergentWeight(1.0 - 2.0 * self.beta));
        }
        let all = [self.t1, self.t2, self.s1, self.s2, self.u1, self.u2, self.beta];
        if all.iter().any(|v| !(v.abs() <= 0.1)) {
            return Err(Error::InvalidArgument("deformation variables must satisfy |v| <= 0.1".into()));
        }
        Ok(())
    }
}
