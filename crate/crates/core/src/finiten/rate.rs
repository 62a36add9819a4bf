//! Rate at which exact finite-n probabilities approach the edge limit.

use super::moments::{pn_probability_with, MAX_N};
use super::SourceEnsemble;
use crate::asymptotics::fit_decay;
use crate::fredholm::{q_rairy, tracy_widom_q0};
use crate::specfun::PainleveIISolution;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub r: usize,
    pub tau: f64,
    pub x: f64,
    pub ns: Vec<usize>,
    /// `|log P_n − Q(τ, x)|` per `n`.
    pub deviations: Vec<f64>,
    /// Limit value `Q(τ, x)`.
    pub limit: f64,
    /// Fitted `p` in `deviation ~ C n^p`.
    pub exponent: f64,
}

/// Compare `log P_n(√n e^{τ/n^{1/3}}; 2√n + x n^{−1/6})` with `Q(τ, x)`.
pub fn convergence_rate(r: usize, tau: f64, x: f64, ns: &[usize]) -> Result<RateReport> {
    convergence_rate_with(r, tau, x, ns, 40)
}

pub fn convergence_rate_with(r: usize, tau: f64, x: f64, ns: &[usize], panels: usize) -> Result<RateReport> {
    if ns.len() < 3 {
        return Err(Error::InvalidArgument("need at least three matrix sizes".into()));
    }
    if let Some(&n) = ns.iter().find(|&&n| n > MAX_N || n <= r) {
        return Err(Error::UnsupportedDomain(format!("n = {n} outside {}..={MAX_N}", r + 1)));
    }
    let limit = if r == 0 {
        tracy_widom_q0(x, PainleveIISolution::shared())?
    } else {
        q_rairy(r, tau, x)?
    };
    let mut deviations = Vec::with_capacity(ns.len());
    for &n in ns {
        let nf = n as f64;
        let ens = SourceEnsemble::peche(n, r, 1.0, tau)?;
        let b = 2.0 * nf.sqrt() + x / nf.powf(1.0 / 6.0);
        let p = pn_probability_with(&ens, b, panels)?;
        deviations.push((p.ln() - limit).abs());
    }
    let sizes: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let exponent = -fit_decay(&sizes, &deviations);
    Ok(RateReport { r, tau, x, ns: ns.to_vec(), deviations, limit, exponent })
}
