//! Remote-past expansion of `Q(τ, x)` as `τ → −∞`.
//!
//! Derivatives of `Q_0` of order two and higher come from the Taylor
//! coefficients of `g²`, which the Painlevé recurrence produces exactly:
//! `Q_0^{(n)} = −(n−2)! [g²]_{n−2}`.

use crate::fredholm::{q_rairy, tracy_widom_q0};
use crate::quad::GaussLegendre;
use crate::specfun::painleve::taylor_coefficients;
use crate::specfun::PainleveIISolution;
use crate::{Error, Result};

/// `Q_0` and its first six derivatives at one point, plus the pieces of `F_5`.
#[derive(Debug, Clone, Copy)]
pub struct Q0Jet {
    pub x: f64,
    /// `d[n] = Q_0^{(n)}(x)`.
    pub d: [f64; 7],
    /// `∫_x^∞ Q_0`.
    pub int_q0: f64,
    /// `∫_x^∞ (u − x) Q_0''(u)² du`.
    pub int_lin_q2sq: f64,
    /// `∫_x^∞ Q_0''² = ∫_x^∞ g⁴`.
    pub int_q2sq: f64,
}

impl Q0Jet {
    pub fn at(x: f64, sol: &PainleveIISolution) -> Result<Self> {
        if x < sol.alpha[0] {
            return Err(Error::UnsupportedDomain(format!("x = {x} below the Painlevé grid")));
        }
        let (g, gp) = sol.eval(x);
        let c = taylor_coefficients(x, g, gp, 6);
        let mut sq = [0.0; 5];
        for (k, s) in sq.iter_mut().enumerate() {
            *s = (0..=k).map(|i| c[i] * c[k - i]).sum();
        }
        let mut d = [0.0; 7];
        d[0] = tracy_widom_q0(x, sol)?;
        d[1] = sol.int_g2(x);
        let mut fact = 1.0;
        for n in 2..=6 {
            if n > 2 {
                fact *= (n - 2) as f64;
            }
            d[n] = -fact * sq[n - 2];
        }
        let int_q0 = -sol.integrate_from(x, |a, g| 0.5 * (a - x) * (a - x) * g * g);
        let int_lin_q2sq = sol.integrate_from(x, |a, g| (a - x) * g.powi(4));
        let int_q2sq = sol.integrate_from(x, |_, g| g.powi(4));
        Ok(Self { x, d, int_q0, int_lin_q2sq, int_q2sq })
    }

    /// `F_5 = x²Q_0' + 4xQ_0 + Q_0'² + 10∫Q_0 − 6∫(u−x)Q_0''²`.
    pub fn f5(&self) -> f64 {
        let x = self.x;
        let d = &self.d;
        x * x * d[1] + 4.0 * x * d[0] + d[1] * d[1] + 10.0 * self.int_q0 - 6.0 * self.int_lin_q2sq
    }

    pub fn f5_prime(&self) -> f64 {
        let x = self.x;
        let d = &self.d;
        2.0 * x * d[1] + x * x * d[2] + 4.0 * d[0] + 4.0 * x * d[1] + 2.0 * d[1] * d[2] - 10.0 * d[0]
            + 6.0 * self.int_q2sq
    }
}

/// `Q_0` derivatives on a grid.
#[derive(Debug, Clone)]
pub struct Q0Derivatives {
    pub jets: Vec<Q0Jet>,
}

pub fn q0_derivatives(grid: &[f64], sol: &PainleveIISolution) -> Result<Q0Derivatives> {
    let jets = grid.iter().map(|&x| Q0Jet::at(x, sol)).collect::<Result<Vec<_>>>()?;
    Ok(Q0Derivatives { jets })
}

/// Evaluate `F_5` on the grid of `q0`.
pub fn f5(q0: &Q0Derivatives) -> Vec<f64> {
    q0.jets.iter().map(Q0Jet::f5).collect()
}

/// Coefficients `Q_1 … Q_6` of the expansion in `1/τ`.
#[derive(Debug, Clone)]
pub struct ExpansionSet {
    pub r: usize,
    /// Undetermined constant in `Q_6`; carried, never asserted.
    pub c6: f64,
    pub x: Vec<f64>,
    /// `q[k][n]` is `Q_n` at `x[k]`, `n = 0..=6`.
    pub q: Vec<[f64; 7]>,
    pub f5: Vec<f64>,
}

/// The terms of `Q_n` at one point, grouped by power of `r` (highest first).
pub fn coefficient_terms(jet: &Q0Jet, r: usize, n: usize, c6: f64) -> Vec<(i32, f64)> {
    let r = r as f64;
    let x = jet.x;
    let d = &jet.d;
    match n {
        0 => vec![(0, d[0])],
        1 => vec![(1, r * d[1])],
        2 => vec![(2, r * r / 2.0 * d[2])],
        3 => vec![(3, r.powi(3) / 6.0 * d[3]), (1, r / 3.0 * x * d[1])],
        4 => vec![
            (4, r.powi(4) / 24.0 * d[4]),
            (2, r * r / 3.0 * x * d[2] + 7.0 * r * r / 12.0 * d[1]),
        ],
        5 => vec![
            (5, r.powi(5) / 120.0 * d[5]),
            (3, r.powi(3) / 6.0 * x * d[3] + 7.0 * r.powi(3) / 12.0 * d[2]),
            (1, r / 5.0 * jet.f5()),
        ],
        6 => vec![
            (6, r.powi(6) / 720.0 * d[6]),
            (4, r.powi(4) / 18.0 * x * d[4] + 7.0 * r.powi(4) / 24.0 * d[3]),
            (
                2,
                r * r / 5.0 * (jet.f5_prime() + 5.0 / 18.0 * (x * x * d[2] + 13.0 * (x + c6) * d[1])),
            ),
        ],
        _ => vec![],
    }
}

pub fn expansion_coefficients(q0: &Q0Derivatives, r: usize) -> ExpansionSet {
    expansion_coefficients_with(q0, r, 0.0)
}

pub fn expansion_coefficients_with(q0: &Q0Derivatives, r: usize, c6: f64) -> ExpansionSet {
    let q = q0
        .jets
        .iter()
        .map(|j| {
            let mut row = [0.0; 7];
            for (n, v) in row.iter_mut().enumerate() {
                *v = coefficient_terms(j, r, n, c6).iter().map(|t| t.1).sum();
            }
            row
        })
        .collect();
    ExpansionSet {
        r,
        c6,
        x: q0.jets.iter().map(|j| j.x).collect(),
        q,
        f5: f5(q0),
    }
}

impl ExpansionSet {
    fn index_of(&self, x: f64) -> Result<usize> {
        self.x
            .iter()
            .position(|&v| v == x)
            .ok_or_else(|| Error::InvalidArgument(format!("x = {x} is not on the expansion grid")))
    }
}

/// `Σ_{i ≤ order} Q_i(x)/τ^i`.
pub fn asymptotic_q(set: &ExpansionSet, tau: f64, x: f64, order: usize) -> Result<f64> {
    if order > 5 {
        return Err(Error::UnsupportedOrder(order));
    }
    if tau > -2.0 {
        return Err(Error::UnsupportedDomain(format!("tau = {tau} > -2")));
    }
    let k = set.index_of(x)?;
    Ok((0..=order).map(|i| set.q[k][i] / tau.powi(i as i32)).sum())
}

/// `Q_0((x + r/τ)(1 + r/(3τ³)) + r²/(4τ⁴)) + r F_5(x)/(5τ⁵)`.
pub fn shifted_q(set: &ExpansionSet, tau: f64, x: f64, sol: &PainleveIISolution) -> Result<f64> {
    let k = set.index_of(x)?;
    let r = set.r as f64;
    let arg = (x + r / tau) * (1.0 + r / (3.0 * tau.powi(3))) + r * r / (4.0 * tau.powi(4));
    Ok(tracy_widom_q0(arg, sol)? + r / (5.0 * tau.powi(5)) * set.f5[k])
}

/// One row of the comparison against exact Fredholm values.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub tau: f64,
    pub exact: f64,
    /// Remainder after the partial sum through each order `0..=order`.
    pub remainders: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct CompareTable {
    pub r: usize,
    pub x: f64,
    pub rows: Vec<CompareRow>,
    /// Fitted `p` in `|remainder_k| ~ C |τ|^{-p}`, per order.
    pub exponents: Vec<f64>,
}

/// Least-squares slope of `log|e|` against `log|τ|`, negated.
pub fn fit_decay(taus: &[f64], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = taus.iter().map(|t| t.abs().ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.abs().max(1e-300).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    -sxy / sxx
}

pub fn asymptotic_compare(r: usize, x_probe: f64, taus: &[f64], order: usize) -> Result<CompareTable> {
    if order > 5 {
        return Err(Error::UnsupportedOrder(order));
    }
    if taus.iter().any(|&t| !(-16.0..=-4.0).contains(&t)) {
        return Err(Error::UnsupportedDomain("tau list must lie in [-16, -4]".into()));
    }
    let sol = PainleveIISolution::shared();
    let q0 = q0_derivatives(&[x_probe], sol)?;
    let set = expansion_coefficients(&q0, r);
    let mut rows = Vec::with_capacity(taus.len());
    for &tau in taus {
        let exact = q_rairy(r, tau, x_probe)?;
        let remainders = (0..=order)
            .map(|k| asymptotic_q(&set, tau, x_probe, k).map(|s| exact - s))
            .collect::<Result<Vec<_>>>()?;
        rows.push(CompareRow { tau, exact, remainders });
    }
    let exponents = (0..=order)
        .map(|k| {
            let errs: Vec<f64> = rows.iter().map(|row| row.remainders[k]).collect();
            fit_decay(taus, &errs)
        })
        .collect();
    Ok(CompareTable { r, x: x_probe, rows, exponents })
}

/// Least-squares estimate of `Q_1 … Q_n` from exact values at several `τ`,
/// fitting `Q − Q_0` by a polynomial in `1/τ` of degree `degree`.
pub fn fitted_coefficients(r: usize, x: f64, taus: &[f64], degree: usize) -> Result<Vec<f64>> {
    let sol = PainleveIISolution::shared();
    let q0 = tracy_widom_q0(x, sol)?;
    let rows = taus.len();
    let mut a = nalgebra::DMatrix::<f64>::zeros(rows, degree);
    let mut b = nalgebra::DVector::<f64>::zeros(rows);
    for (i, &t) in taus.iter().enumerate() {
        for j in 0..degree {
            a[(i, j)] = t.powi(-(j as i32 + 1));
        }
        b[i] = q_rairy(r, t, x)? - q0;
    }
    let sol = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(sol.iter().copied().collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeMoments {
    pub mu1: f64,
    pub mu2: f64,
    pub var: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct MomentExpansion {
    pub r: usize,
    pub tau: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// `var₀ (1 − 2r/(3τ³))`.
    pub var: f64,
    /// `mean₀ (1 − r/(3τ³)) − r/τ − r²/(4τ⁴)`.
    pub mean: f64,
}

/// `μ_ℓ^{(r)}(τ)` through order `τ^{-4}` from the untilted moments `mu[0..=ℓ]`.
pub fn moment_expansion_general(mu: &[f64], l: usize, r: usize, tau: f64) -> f64 {
    let r = r as f64;
    let lf = l as f64;
    let m = |k: isize| if k < 0 { 0.0 } else { mu[k as usize] };
    let li = l as isize;
    m(li) - lf * r / tau * m(li - 1) + r * r / (2.0 * tau * tau) * lf * (lf - 1.0) * m(li - 2)
        + r / (6.0 * tau.powi(3)) * (-r * r * lf * (lf - 1.0) * (lf - 2.0) * m(li - 3) - 2.0 * lf * m(li))
        + r * r / (24.0 * tau.powi(4))
            * (r * r * lf * (lf - 1.0) * (lf - 2.0) * (lf - 3.0) * m(li - 4) + lf * (8.0 * lf - 14.0) * m(li - 1))
}

pub fn edge_moments_expansion(r: usize, tau: f64, base: EdgeMoments) -> Result<MomentExpansion> {
    if tau > -2.0 {
        return Err(Error::UnsupportedDomain(format!("tau = {tau} > -2")));
    }
    let rf = r as f64;
    let mu1 = base.mu1 - rf / tau - rf * base.mu1 / (3.0 * tau.powi(3)) - rf * rf / (4.0 * tau.powi(4));
    let mu2 = base.mu2 - 2.0 * rf * base.mu1 / tau + rf * rf / (tau * tau) - 2.0 * rf * base.mu2 / (3.0 * tau.powi(3))
        + rf * rf * base.mu1 / (6.0 * tau.powi(4));
    Ok(MomentExpansion {
        r,
        tau,
        mu1,
        mu2,
        var: base.var * (1.0 - 2.0 * rf / (3.0 * tau.powi(3))),
        mean: base.mu1 * (1.0 - rf / (3.0 * tau.powi(3))) - rf / tau - rf * rf / (4.0 * tau.powi(4)),
    })
}

/// Moments of the law `e^{Q(τ,·)}` by integrating tails of the CDF.
///
/// `μ_1 = ∫_0^∞ (1 − F) − ∫_{−∞}^0 F` and
/// `μ_2 = 2∫_0^∞ x(1 − F) − 2∫_{−∞}^0 x F`.
pub fn edge_moments_direct(r: usize, tau: f64) -> Result<EdgeMoments> {
    edge_moments_direct_with(r, tau, 0.5)
}

pub fn edge_moments_direct_with(r: usize, tau: f64, panel: f64) -> Result<EdgeMoments> {
    if tau > 0.0 {
        return Err(Error::UnsupportedDomain(format!("tau = {tau} > 0")));
    }
    let sol = PainleveIISolution::shared();
    let q = |x: f64| -> Result<f64> {
        if r == 0 {
            tracy_widom_q0(x, sol)
        } else {
            q_rairy(r, tau, x)
        }
    };
    let mut lo = -6.0;
    while lo > -10.0 && q(lo)?.exp() > 1e-12 {
        lo -= 1.0;
    }
    let mut hi = 4.0;
    while hi < 14.0 && q(hi)?.abs() > 1e-12 {
        hi += 1.0;
    }
    let rule = GaussLegendre::cached(16);
    let (mut m1, mut m2) = (0.0, 0.0);
    for p in crate::quad::uniform_breaks(lo, 0.0, panel).windows(2) {
        for (x, w) in rule.mapped(p[0], p[1]) {
            let f = q(x)?.exp();
            m1 -= w * f;
            m2 -= 2.0 * w * x * f;
        }
    }
    for p in crate::quad::uniform_breaks(0.0, hi, panel).windows(2) {
        for (x, w) in rule.mapped(p[0], p[1]) {
            let tail = -q(x)?.exp_m1();
            m1 += w * tail;
            m2 += 2.0 * w * x * tail;
        }
    }
    Ok(EdgeMoments { mu1: m1, mu2: m2, var: m2 - m1 * m1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fredholm::{resolvent_functionals, QuadratureRule};
    use crate::specfun::airy;

    fn sol() -> &'static PainleveIISolution {
        PainleveIISolution::shared()
    }

    #[test]
    fn second_derivative_is_minus_g_squared() {
        let j = Q0Jet::at(0.0, sol()).unwrap();
        let g = sol().eval(0.0).0;
        assert_eq!(j.d[2], -g * g);
        let h = 1e-3;
        let fd = (tracy_widom_q0(h, sol()).unwrap() - 2.0 * j.d[0] + tracy_widom_q0(-h, sol()).unwrap()) / (h * h);
        assert!((fd - j.d[2]).abs() < 1e-6);
    }

    #[test]
    fn derivative_chain_consistent() {
        let h = 1e-3;
        for x in [-4.0, -2.0, 0.0, 2.0, 4.0] {
            let a = Q0Jet::at(x - h, sol()).unwrap();
            let b = Q0Jet::at(x + h, sol()).unwrap();
            let c = Q0Jet::at(x, sol()).unwrap();
            for k in 0..6 {
                let fd = (b.d[k] - a.d[k]) / (2.0 * h);
                assert!((fd - c.d[k + 1]).abs() < 1e-6 * (1.0 + c.d[k + 1].abs()), "x={x} k={k}");
            }
        }
    }

    #[test]
    fn q0_prime_tail_matches_airy() {
        let j = Q0Jet::at(4.0, sol()).unwrap();
        let (a, ap) = airy(4.0);
        let tail = ap * ap - 4.0 * a * a;
        assert!(((j.d[1] - tail) / tail).abs() < 1e-3);
    }

    #[test]
    fn derivatives_vanish_to_the_right() {
        let j = Q0Jet::at(12.0, sol()).unwrap();
        assert!(j.d.iter().all(|v| v.abs() < 1e-15));
        assert!(j.f5().abs() < 1e-15);
    }

    #[test]
    fn double_integral_collapse() {
        let x = -1.0;
        let j = Q0Jet::at(x, sol()).unwrap();
        // ∫_x^∞ dy ∫_y^∞ g⁴ computed as nested quadrature
        let inner = |y: f64| sol().integrate_from(y, |_, g| g.powi(4));
        let outer = crate::quad::integrate_panels(x, 16.0, 0.5, 20, inner);
        assert!((outer - j.int_lin_q2sq).abs() < 1e-9, "{outer} {}", j.int_lin_q2sq);
    }

    #[test]
    fn no_outliers_no_corrections() {
        let q0 = q0_derivatives(&[-1.0, 0.0, 1.0], sol()).unwrap();
        let set = expansion_coefficients(&q0, 0);
        for row in &set.q {
            assert!(row[1..].iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn parity_in_r() {
        let j = Q0Jet::at(0.3, sol()).unwrap();
        for n in 0..=6 {
            for (p, _) in coefficient_terms(&j, 2, n, 0.0) {
                assert!(p <= n as i32 && (n as i32 - p) % 2 == 0, "n={n} power={p}");
            }
        }
    }

    #[test]
    fn q1_q3_match_traces() {
        let q0 = q0_derivatives(&[0.0, 1.0], sol()).unwrap();
        let set2 = expansion_coefficients(&q0, 2);
        let set1 = expansion_coefficients(&q0, 1);
        let f0 = resolvent_functionals(0.0, &QuadratureRule::new(0.0, 12.0, 60).unwrap()).unwrap();
        assert!((f0.closed_q(2).0 - set2.q[0][1]).abs() < 1e-6);
        let f1 = resolvent_functionals(1.0, &QuadratureRule::new(1.0, 12.0, 60).unwrap()).unwrap();
        let j = &q0.jets[1];
        assert!((set1.q[1][3] - (j.d[3] / 6.0 + j.d[1] / 3.0)).abs() < 1e-15);
        assert!((f1.bracket_traces(1).q().2 - set1.q[1][3]).abs() < 1e-5);
    }

    #[test]
    fn partial_sum_order_zero() {
        let q0 = q0_derivatives(&[0.0], sol()).unwrap();
        let set = expansion_coefficients(&q0, 1);
        assert_eq!(asymptotic_q(&set, -5.0, 0.0, 0).unwrap(), q0.jets[0].d[0]);
        assert!(asymptotic_q(&set, -5.0, 0.0, 6).is_err());
    }

    #[test]
    fn shifted_form_agrees_to_sixth_order() {
        let q0 = q0_derivatives(&[0.0], sol()).unwrap();
        let set = expansion_coefficients(&q0, 1);
        let diff = |t: f64| shifted_q(&set, t, 0.0, sol()).unwrap() - asymptotic_q(&set, t, 0.0, 5).unwrap();
        let ratio = (diff(-12.0) / diff(-6.0)).abs();
        let base = 2f64.powi(-6);
        assert!(ratio >= base / 3.0 && ratio <= 3.0 * base, "ratio={ratio}");
    }

    #[test]
    fn general_moment_formula_matches_special_cases() {
        let base = EdgeMoments { mu1: -1.77, mu2: 3.95, var: 3.95 - 1.77 * 1.77 };
        let e = edge_moments_expansion(2, -5.0, base).unwrap();
        let mu = [1.0, base.mu1, base.mu2];
        assert!((moment_expansion_general(&mu, 1, 2, -5.0) - e.mu1).abs() < 1e-15);
        assert!((moment_expansion_general(&mu, 2, 2, -5.0) - e.mu2).abs() < 1e-15);
        assert!((e.mean - e.mu1).abs() < 1e-15);
    }

    #[test]
    fn variance_factor() {
        let base = EdgeMoments { mu1: 0.0, mu2: 1.0, var: 1.0 };
        let e = edge_moments_expansion(1, -4.0, base).unwrap();
        assert!((e.var - (1.0 + 1.0 / 96.0)).abs() < 1e-15);
    }

    #[test]
    fn tracy_widom_moments() {
        // mean and variance of the GUE Tracy–Widom law
        let m = edge_moments_direct(0, 0.0).unwrap();
        assert!((m.mu1 + 1.7710868074).abs() < 1e-8, "{}", m.mu1);
        assert!((m.var - 0.8131947928).abs() < 1e-8, "{}", m.var);
        let fine = edge_moments_direct_with(0, 0.0, 0.25).unwrap();
        assert!((fine.mu1 - m.mu1).abs() < 1e-10);
    }
}
