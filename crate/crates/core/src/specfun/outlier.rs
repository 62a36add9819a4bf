//! Outlier Airy functions `A_r^±(u; τ)`.
//!
//! The plus function is a polynomial combination of `A` and `A'`. The minus
//! function is a one-sided Laplace-type integral of `A` for `τ < 0`, a closed
//! form in Airy moments at `τ = 0`, and falls back to contour quadrature
//! for `0 < |τ| < 0.02` where the Laplace tail becomes too long.

use super::airy::{airy, airy_tail_integral};
use super::contour::{contour_quadrature, ContourPath};
use crate::quad::GaussLegendre;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutlierAirySpec {
    pub r: i64,
    pub tau: f64,
    pub sign: Sign,
}

impl OutlierAirySpec {
    pub fn new(r: i64, tau: f64, sign: Sign) -> Result<Self> {
        let s = Self { r, tau, sign };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r < 0 {
            return Err(Error::UnsupportedDomain(format!("r = {} < 0", self.r)));
        }
        if !(self.tau <= 0.0) {
            return Err(Error::UnsupportedDomain(format!("tau = {} > 0", self.tau)));
        }
        Ok(())
    }
}

/// Below this `|τ|` the Laplace integral is replaced by contour quadrature.
const LAPLACE_MIN_TAU: f64 = 0.02;

pub fn outlier_airy(u: f64, spec: OutlierAirySpec) -> Result<f64> {
    spec.validate()?;
    let r = spec.r as usize;
    if r == 0 {
        return Ok(airy(u).0);
    }
    Ok(match spec.sign {
        Sign::Plus => plus(u, r, spec.tau),
        Sign::Minus => {
            if spec.tau == 0.0 {
                minus_tau_zero(u, r)
            } else if spec.tau.abs() < LAPLACE_MIN_TAU {
                let path = ContourPath::standard(spec.tau, u);
                contour_quadrature(u, spec, &path)?.re
            } else {
                minus_laplace(u, r, spec.tau)
            }
        }
    })
}

/// `(A_r^-(u), A_r^+(u))`.
pub fn outlier_airy_pair(u: f64, r: usize, tau: f64) -> Result<(f64, f64)> {
    let m = outlier_airy(u, OutlierAirySpec::new(r as i64, tau, Sign::Minus)?)?;
    let p = outlier_airy(u, OutlierAirySpec::new(r as i64, tau, Sign::Plus)?)?;
    Ok((m, p))
}

/// Polynomial coefficients `(p, q)` with `A_r^+ = p(u)A + q(u)A'`.
pub fn plus_polynomials(r: usize, tau: f64) -> (Vec<f64>, Vec<f64>) {
    let mut c0 = vec![1.0];
    let mut c1 = vec![0.0];
    for _ in 0..r {
        // (d/du + τ)(c0 A + c1 A') = (c0' + u c1 + τ c0) A + (c0 + c1' + τ c1) A'
        let n = c0.len().max(c1.len() + 1);
        let mut n0 = vec![0.0; n];
        let mut n1 = vec![0.0; n];
        for (k, &c) in c0.iter().enumerate() {
            if k > 0 {
                n0[k - 1] += k as f64 * c;
            }
            n0[k] += tau * c;
            n1[k] += c;
        }
        for (k, &c) in c1.iter().enumerate() {
            n0[k + 1] += c;
            if k > 0 {
                n1[k - 1] += k as f64 * c;
            }
            n1[k] += tau * c;
        }
        c0 = n0.into_iter().map(|v| -v).collect();
        c1 = n1.into_iter().map(|v| -v).collect();
    }
    (c0, c1)
}

fn horner(c: &[f64], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * u + v)
}

fn plus(u: f64, r: usize, tau: f64) -> f64 {
    let (p, q) = plus_polynomials(r, tau);
    let (a, ap) = airy(u);
    horner(&p, u) * a + horner(&q, u) * ap
}

fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|j| (j as f64).ln()).sum()
}

/// `∫_0^W w^{r-1}/(r-1)! e^{τw} A(u-w) dw` for `τ < 0`.
fn minus_laplace(u: f64, r: usize, tau: f64) -> f64 {
    let lnf = ln_factorial(r - 1);
    let cutoff = (1e-17f64).ln();
    let rm1 = (r - 1) as f64;
    // first w past the weight's peak where the weight drops under the cutoff
    let peak = rm1 / -tau;
    let mut hi = peak.max(1.0);
    while rm1 * hi.ln() + tau * hi - lnf >= cutoff {
        hi *= 1.25;
    }
    let rule = GaussLegendre::cached(16);
    let mut total = 0.0;
    let mut a = 0.0;
    while a < hi {
        let width = (2.5 / (a - u).max(1.0).sqrt()).min(1.0);
        let b = (a + width).min(hi);
        for (w, wt) in rule.mapped(a, b) {
            let weight = (rm1 * w.ln() + tau * w - lnf).exp();
            total += wt * weight * airy(u - w).0;
        }
        a = b;
    }
    total
}

/// `∫_{-∞}^u s^k A(s) ds` for `k = 0..=kmax`, in the Abel sense.
fn airy_moments(u: f64, kmax: usize) -> Vec<f64> {
    let (a, ap) = airy(u);
    let mut m = vec![0.0; kmax + 1];
    for k in 0..=kmax {
        m[k] = match k {
            0 => 1.0 - airy_tail_integral(u),
            1 => ap,
            2 => u * ap - a,
            _ => {
                let kf = k as f64;
                u.powi(k as i32 - 1) * ap - (kf - 1.0) * u.powi(k as i32 - 2) * a + (kf - 1.0) * (kf - 2.0) * m[k - 3]
            }
        };
    }
    m
}

fn minus_tau_zero(u: f64, r: usize) -> f64 {
    let m = airy_moments(u, r - 1);
    let mut binom = 1.0;
    let mut total = 0.0;
    for k in 0..r {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        total += binom * u.powi((r - 1 - k) as i32) * sign * m[k];
        binom *= (r - 1 - k) as f64 / (k + 1) as f64;
    }
    total / ln_factorial(r - 1).exp()
}
