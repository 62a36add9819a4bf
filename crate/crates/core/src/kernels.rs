//! Airy kernel, r-Airy kernel and the terms of its `τ → −∞` expansion.

use crate::quad::{uniform_breaks, GaussLegendre};
use crate::specfun::{airy, outlier_airy_pair, OutlierAirySpec, Sign};
use crate::{Error, Result};

/// Below this separation the divided difference is replaced by its Taylor form.
pub const DIAGONAL_BAND: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Airy,
    RAiry { r: usize, tau: f64 },
    ExpansionTerm { i: usize, r: usize },
    TruncatedSum { order: usize, r: usize, tau: f64 },
    Zero,
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::RAiry { r, tau } => OutlierAirySpec::new(r as i64, tau, Sign::Minus).map(|_| ()),
            KernelSpec::ExpansionTerm { i, .. } if i > 3 => Err(Error::UnsupportedOrder(i)),
            KernelSpec::TruncatedSum { order, tau, .. } => {
                if order > 3 {
                    Err(Error::UnsupportedOrder(order))
                } else if tau >= 0.0 {
                    Err(Error::UnsupportedDomain(format!("tau = {tau} must be negative")))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, u: f64, v: f64) -> Result<f64> {
        self.validate()?;
        match *self {
            KernelSpec::Airy => Ok(airy_kernel(u, v)),
            KernelSpec::RAiry { r, tau } => r_airy_kernel(u, v, r, tau),
            KernelSpec::ExpansionTerm { i, r } => expansion_term(i, r, u, v),
            KernelSpec::TruncatedSum { order, r, tau } => {
                let mut s = 0.0;
                for i in 0..=order {
                    s += expansion_term(i, r, u, v)? / tau.powi(i as i32);
                }
                Ok(s)
            }
            KernelSpec::Zero => Ok(0.0),
        }
    }
}

pub fn airy_kernel(u: f64, v: f64) -> f64 {
    let d = u - v;
    if d.abs() > DIAGONAL_BAND {
        let (au, apu) = airy(u);
        let (av, apv) = airy(v);
        (au * apv - apu * av) / d
    } else {
        let m = 0.5 * (u + v);
        let (a, ap) = airy(m);
        ap * ap - m * a * a + d * d / 12.0 * (2.0 * m * ap * ap - 2.0 * m * m * a * a + a * ap)
    }
}

/// `∫_0^∞ A_r^-(w+u) A_r^+(w+v) dw` on panels of width `1/density`.
pub fn r_airy_kernel_with(u: f64, v: f64, r: usize, tau: f64, density: f64) -> Result<f64> {
    OutlierAirySpec::new(r as i64, tau, Sign::Minus)?;
    if r == 0 {
        return Ok(airy_kernel(u, v));
    }
    let hi = (16.0 - v.min(u)).max(4.0);
    let rule = GaussLegendre::cached(16);
    let mut total = 0.0;
    for p in uniform_breaks(0.0, hi, 1.0 / density).windows(2) {
        for (w, wt) in rule.mapped(p[0], p[1]) {
            let (m, _) = outlier_airy_pair(w + u, r, tau)?;
            let (_, pl) = outlier_airy_pair(w + v, r, tau)?;
            total += wt * m * pl;
        }
    }
    Ok(total)
}

pub fn r_airy_kernel(u: f64, v: f64, r: usize, tau: f64) -> Result<f64> {
    r_airy_kernel_with(u, v, r, tau, 2.0)
}

/// Term `K_i` of the expansion in `1/τ`, with `A'' = uA` substituted.
pub fn expansion_term(i: usize, r: usize, u: f64, v: f64) -> Result<f64> {
    let parts = expansion_term_parts(i, r, u, v)?;
    Ok(parts.iter().sum())
}

/// The terms of `K_i` grouped by power of `r`, highest power first.
pub fn expansion_term_parts(i: usize, r: usize, u: f64, v: f64) -> Result<Vec<f64>> {
    let r = r as f64;
    let (au, apu) = airy(u);
    let (av, apv) = airy(v);
    let (app_u, app_v) = (u * au, v * av);
    Ok(match i {
        0 => vec![airy_kernel(u, v)],
        1 => vec![-r * au * av],
        2 => vec![
            -r * r / 2.0 * (apu * av + au * apv),
            r / 2.0 * (au * apv - apu * av),
        ],
        3 => vec![
            -r.powi(3) / 6.0 * (app_u * av + 2.0 * apu * apv + au * app_v),
            r * r / 2.0 * (v - u) * au * av,
            -r / 3.0 * (app_u * av + au * app_v - apu * apv),
        ],
        _ => return Err(Error::UnsupportedOrder(i)),
    })
}

/// `K_τ^{(r)}(u,v) − Σ_{i ≤ order} K_i(u,v)/τ^i`.
pub fn expansion_remainder(r: usize, tau: f64, order: usize, u: f64, v: f64) -> Result<f64> {
    if order > 3 {
        return Err(Error::UnsupportedOrder(order));
    }
    if tau > -2.0 {
        return Err(Error::UnsupportedDomain(format!("tau = {tau} > -2")));
    }
    let k = r_airy_kernel(u, v, r, tau)?;
    let mut s = 0.0;
    for i in 0..=order {
        s += expansion_term(i, r, u, v)? / tau.powi(i as i32);
    }
    Ok(k - s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_panels;
    use crate::specfun::ai;
    use proptest::prelude::*;

    fn integral_form(u: f64, v: f64) -> f64 {
        integrate_panels(0.0, 20.0, 0.5, 20, |w| ai(w + u) * ai(w + v))
    }

    #[test]
    fn airy_kernel_two_forms() {
        assert!((airy_kernel(1.0, -1.0) - integral_form(1.0, -1.0)).abs() < 1e-8);
    }

    #[test]
    fn airy_kernel_symmetric() {
        assert_eq!(airy_kernel(0.3, 0.7), airy_kernel(0.7, 0.3));
    }

    #[test]
    fn airy_kernel_diagonal() {
        let ap = airy(0.0).1;
        assert!((airy_kernel(0.0, 0.0) - ap * ap).abs() < 1e-15);
        assert!((airy_kernel(0.0, 0.0) - integral_form(0.0, 0.0)).abs() < 1e-12);
    }

    #[test]
    fn diagonal_band_is_continuous() {
        for m in [-3.0, 0.0, 2.0] {
            let inside = airy_kernel(m + 0.49e-4, m - 0.49e-4);
            let outside = airy_kernel(m + 0.51e-4, m - 0.51e-4);
            assert!((inside - outside).abs() < 1e-9, "m={m}");
        }
    }

    #[test]
    fn r_zero_matches_airy() {
        let k = r_airy_kernel(0.2, 1.1, 0, -3.0).unwrap();
        assert!((k - airy_kernel(0.2, 1.1)).abs() < 1e-9);
    }

    #[test]
    fn r_airy_refinement() {
        let a = r_airy_kernel(1.0, 0.0, 2, -3.0).unwrap();
        let b = r_airy_kernel_with(1.0, 0.0, 2, -3.0, 8.0).unwrap();
        assert!((a - b).abs() < 1e-7);
    }

    #[test]
    fn leading_correction_at_minus_twenty() {
        let tau = -20.0;
        let k = r_airy_kernel(0.0, 0.0, 1, tau).unwrap();
        let lead = airy_kernel(0.0, 0.0) + expansion_term(1, 1, 0.0, 0.0).unwrap() / tau;
        assert!((k - lead).abs() <= 10.0 / (tau * tau));
    }

    #[test]
    fn expansion_term_examples() {
        let a0 = ai(0.0);
        assert!((expansion_term(1, 2, 0.0, 0.0).unwrap() + 2.0 * a0 * a0).abs() < 1e-15);
        let (a, ap) = airy(0.7);
        assert!((expansion_term(2, 1, 0.7, 0.7).unwrap() + ap * a).abs() < 1e-15);
        assert_eq!(expansion_term(0, 3, 0.2, 0.4).unwrap(), airy_kernel(0.2, 0.4));
        assert!(matches!(expansion_term(4, 1, 0.0, 0.0), Err(Error::UnsupportedOrder(4))));
    }

    #[test]
    fn remainder_ratio_order_three() {
        let a = expansion_remainder(1, -16.0, 3, 0.0, 0.0).unwrap();
        let b = expansion_remainder(1, -8.0, 3, 0.0, 0.0).unwrap();
        let ratio = (a / b).abs();
        assert!(ratio >= 1.0 / 32.0 && ratio <= 2.0 / 16.0, "ratio={ratio}");
    }

    #[test]
    fn remainder_vanishes_without_outliers() {
        for order in 0..=3 {
            assert!(expansion_remainder(0, -5.0, order, 0.3, -0.4).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn order_zero_remainder_is_leading_term() {
        let tau = -8.0;
        let rem = expansion_remainder(1, tau, 0, 0.0, 0.0).unwrap();
        let lead = -ai(0.0).powi(2) / tau;
        assert!(rem.signum() == lead.signum() && ((rem - lead) / lead).abs() < 0.2, "{rem} {lead}");
    }

    #[test]
    fn distance_to_airy_kernel_halves() {
        for (u, v) in [(0.0, 0.0), (1.0, -1.0), (2.0, 0.0)] {
            let d4 = (r_airy_kernel(u, v, 1, -4.0).unwrap() - airy_kernel(u, v)).abs();
            let d8 = (r_airy_kernel(u, v, 1, -8.0).unwrap() - airy_kernel(u, v)).abs();
            assert!(d8 < 0.75 * d4, "({u},{v}): {d4} {d8}");
        }
    }

    #[test]
    fn independent_of_tau_without_outliers() {
        let a = r_airy_kernel(0.4, -0.3, 0, -1.0).unwrap();
        let b = r_airy_kernel(0.4, -0.3, 0, -7.0).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn term_symmetries(u in -4.0f64..4.0, v in -4.0f64..4.0, r in 0usize..5) {
            // alternately symmetric and skew in (u, v) per power of r
            let p1 = expansion_term_parts(1, r, u, v).unwrap();
            let q1 = expansion_term_parts(1, r, v, u).unwrap();
            prop_assert!((p1[0] - q1[0]).abs() < 1e-14);
            let p2 = expansion_term_parts(2, r, u, v).unwrap();
            let q2 = expansion_term_parts(2, r, v, u).unwrap();
            prop_assert!((p2[0] - q2[0]).abs() < 1e-14);
            prop_assert!((p2[1] + q2[1]).abs() < 1e-14);
            let p3 = expansion_term_parts(3, r, u, v).unwrap();
            let q3 = expansion_term_parts(3, r, v, u).unwrap();
            prop_assert!((p3[0] - q3[0]).abs() < 1e-13);
            prop_assert!((p3[1] + q3[1]).abs() < 1e-13);
            prop_assert!((p3[2] - q3[2]).abs() < 1e-13);
        }

        #[test]
        fn airy_kernel_symmetry(u in -8.0f64..8.0, v in -8.0f64..8.0) {
            prop_assert!((airy_kernel(u, v) - airy_kernel(v, u)).abs() < 1e-15);
        }
    }
}
