//! Maps between conditioned Brownian motions and the matrix model, the
//! tangency point on the edge curve `y = √(2nt(1−t))`, and the cusp of the
//! two-target cloud.

use crate::{Error, Result};

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::UnsupportedDomain(format!("t = {t} outside (0, 1)")));
    }
    Ok(())
}

/// `(α, b̃) = (a√(2t/(1−t)), E·√(2/(t(1−t))))`.
pub fn brownian_to_matrix(t: f64, endpoint: f64, a: f64) -> Result<(f64, f64)> {
    check_time(t)?;
    Ok((a * (2.0 * t / (1.0 - t)).sqrt(), endpoint * (2.0 / (t * (1.0 - t))).sqrt()))
}

/// Inverse of [`brownian_to_matrix`]: `(E, a)` from `(α, b̃)`.
pub fn matrix_to_brownian(t: f64, alpha: f64, b_tilde: f64) -> Result<(f64, f64)> {
    check_time(t)?;
    Ok((b_tilde / (2.0 / (t * (1.0 - t))).sqrt(), alpha / (2.0 * t / (1.0 - t)).sqrt()))
}

/// Clock change `t = 1/(1 + e^{−2t′})`.
pub fn time_change(t_prime: f64) -> f64 {
    1.0 / (1.0 + (-2.0 * t_prime).exp())
}

/// `t′ = ½ ln(t/(1−t))`.
pub fn time_change_inverse(t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(0.5 * (t / (1.0 - t)).ln())
}

/// `1/√(t(1−t))`, which equals `2 cosh t′`.
pub fn inverse_root_variance(t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(1.0 / (t * (1.0 - t)).sqrt())
}

/// Parameters tying a Brownian time and target to the matrix source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrownianScaling {
    pub n: usize,
    pub t: f64,
    /// Target point `a = ρ√(n/2)`.
    pub a: f64,
    pub rho: f64,
    pub rho0: f64,
    /// `e^σ = √(t/(1−t))`.
    pub sigma: f64,
    /// `e^{−τ0} = ρ0`.
    pub tau0: f64,
}

impl BrownianScaling {
    pub fn new(n: usize, t: f64, rho: f64, rho0: f64) -> Result<Self> {
        check_time(t)?;
        if !(rho0 > 0.0) {
            return Err(Error::InvalidArgument(format!("rho0 = {rho0} must be positive")));
        }
        Ok(Self {
            n,
            t,
            a: rho * (n as f64 / 2.0).sqrt(),
            rho,
            rho0,
            sigma: time_change_inverse(t)?,
            tau0: -rho0.ln(),
        })
    }

    /// Source strength `α = ρ√n e^σ`.
    pub fn alpha(&self) -> f64 {
        brownian_to_matrix(self.t, 0.0, self.a).unwrap().0
    }
}

/// `(y0, t0) = (ρ0√(2n)/(1+ρ0²), 1/(1+ρ0²))`.
pub fn tangency_point(rho0: f64, n: usize) -> Result<(f64, f64)> {
    if !(rho0 > 0.0) {
        return Err(Error::InvalidArgument(format!("rho0 = {rho0} must be positive")));
    }
    let d = 1.0 + rho0 * rho0;
    Ok((rho0 * (2.0 * n as f64).sqrt() / d, 1.0 / d))
}

/// Edge curve `√(2nt(1−t))`.
pub fn edge_curve(n: usize, t: f64) -> f64 {
    (2.0 * n as f64 * t * (1.0 - t)).sqrt()
}

/// Cusp of the cloud when a fraction `p` of the paths goes to `a√n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuspGeometry {
    pub a: f64,
    pub p: f64,
    /// `p = 1/(1+q³)`.
    pub q: f64,
    pub x0: f64,
    pub t0: f64,
    pub mu: f64,
    pub c0: f64,
    pub a_const: f64,
}

pub fn cusp_geometry(a: f64, p: f64) -> Result<CuspGeometry> {
    if !(p > 0.0 && p < 1.0) || !(a > 0.0) {
        return Err(Error::UnsupportedDomain(format!("need 0 < p < 1 and a > 0, got p = {p}, a = {a}")));
    }
    let q = ((1.0 - p) / p).cbrt();
    Ok(cusp_from_q(a, q, p))
}

/// Same as [`cusp_geometry`] parametrized by `q`, which also allows large `q`
/// where `p` underflows.
pub fn cusp_from_q(a: f64, q: f64, p: f64) -> CuspGeometry {
    let s = (q * q - q + 1.0) / ((q + 1.0) * (q + 1.0));
    let t0 = 1.0 / (1.0 + 2.0 * a * a * s);
    let x0 = (2.0 * q - 1.0) * a / (q + 1.0) * t0;
    let mu = ((q * q - q + 1.0) / q).powf(0.25);
    let c0 = (t0 * (1.0 - t0) / 2.0).sqrt();
    let a_const = q.sqrt() * (1.0 - x0 / a) - x0 / (a * q.sqrt());
    CuspGeometry { a, p, q, x0, t0, mu, c0, a_const }
}
