//! The Airy function `A(x)` and its derivative on the real line.
//!
//! `-4 <= x <= 2` uses the Maclaurin series. `-12 <= x < -4` and
//! `2 < x <= 12` use tables produced by Taylor stepping of `A'' = xA`,
//! seeded by the series at `-4` and by the asymptotic expansion at `12`
//! respectively; each query expands from the nearest table node. Beyond
//! `|x| = 12` the asymptotic expansions are summed directly.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::OnceLock;

/// `A(0)`.
pub const AI0: f64 = 0.355_028_053_887_817_24;
/// `-A'(0)`.
pub const AIP0_NEG: f64 = 0.258_819_403_792_806_8;

pub const SERIES_LIMIT: f64 = 4.0;
/// The series cancels badly for larger positive `x`.
pub const SERIES_RIGHT: f64 = 2.0;
pub const ASYMPTOTIC_LIMIT: f64 = 12.0;
const TABLE_STEP: f64 = 0.125;

/// `(A(x), A'(x))`.
pub fn airy(x: f64) -> (f64, f64) {
    let ax = x.abs();
    if x >= -SERIES_LIMIT && x <= SERIES_RIGHT {
        airy_series(x)
    } else if ax <= ASYMPTOTIC_LIMIT {
        airy_table(x)
    } else {
        airy_asymptotic(x)
    }
}

pub fn ai(x: f64) -> f64 {
    airy(x).0
}

/// Maclaurin series `A = c1 f − c2 g`.
pub fn airy_series(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    let mut fk = 1.0;
    let mut gk = x;
    let mut f = fk;
    let mut g = gk;
    // derivative terms: f' = Σ 3k a_k x^{3k-1}, g' = Σ (3k+1) b_k x^{3k}
    let mut fp = 0.0;
    let mut gp = 1.0;
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        fk *= x3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        gk *= x3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        f += fk;
        g += gk;
        let dfk = if x != 0.0 { 3.0 * kf * fk / x } else { 0.0 };
        let dgk = if x != 0.0 { (3.0 * kf + 1.0) * gk / x } else { 0.0 };
        fp += dfk;
        gp += dgk;
        let scale = f.abs() + g.abs() + fp.abs() + gp.abs();
        if (fk.abs() + gk.abs() + dfk.abs() + dgk.abs()) <= 1e-18 * scale || k > 200 {
            break;
        }
        k += 1;
    }
    (AI0 * f - AIP0_NEG * g, AI0 * fp - AIP0_NEG * gp)
}

fn asymptotic_coefficients() -> &'static [(f64, f64)] {
    static COEF: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    COEF.get_or_init(|| {
        let mut out = Vec::with_capacity(60);
        let mut u = 1.0f64;
        out.push((1.0, 1.0));
        for k in 1..60 {
            let kf = k as f64;
            u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
            let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
            out.push((u, v));
        }
        out
    })
}

/// Asymptotic expansions; accurate to near machine precision for `|x| >= 12`.
pub fn airy_asymptotic(x: f64) -> (f64, f64) {
    let coef = asymptotic_coefficients();
    let z = x.abs();
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let q = z.powf(0.25);
    if x > 0.0 {
        let (mut su, mut sv) = (0.0, 0.0);
        let mut p = 1.0;
        let mut last = f64::INFINITY;
        for (k, &(u, v)) in coef.iter().enumerate() {
            let tu = u * p;
            if tu.abs() > last {
                break;
            }
            last = tu.abs();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            su += sign * tu;
            sv += sign * v * p;
            if last < 1e-18 {
                break;
            }
            p /= zeta;
        }
        let e = (-zeta).exp() / (2.0 * PI.sqrt());
        (e / q * su, -e * q * sv)
    } else {
        // even/odd split of the oscillatory expansions
        let (mut pe, mut po, mut re, mut ro) = (0.0, 0.0, 0.0, 0.0);
        let mut p = 1.0;
        let mut last = f64::INFINITY;
        for (k, &(u, v)) in coef.iter().enumerate() {
            let tu = u * p;
            if tu.abs() > last {
                break;
            }
            last = tu.abs();
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if k % 2 == 0 {
                pe += sign * tu;
                re += sign * v * p;
            } else {
                po += sign * tu;
                ro += sign * v * p;
            }
            if last < 1e-18 {
                break;
            }
            p /= zeta;
        }
        let theta = zeta - FRAC_PI_4;
        let (s, c) = theta.sin_cos();
        let sp = PI.sqrt();
        let a = (c * pe + s * po) / (sp * q);
        let ap = q / sp * (s * re - c * ro);
        (a, ap)
    }
}

/// Taylor coefficients of the solution of `y'' = xy` about `x0`.
fn taylor_coefficients(x0: f64, y: f64, yp: f64, out: &mut [f64]) {
    out[0] = y;
    out[1] = yp;
    if out.len() > 2 {
        out[2] = x0 * y / 2.0;
    }
    for k in 1..out.len().saturating_sub(2) {
        out[k + 2] = (x0 * out[k] + out[k - 1]) / ((k + 2) as f64 * (k + 1) as f64);
    }
}

fn taylor_eval(c: &[f64], h: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for k in (0..c.len()).rev() {
        v = v * h + c[k];
        if k > 0 {
            d = d * h + k as f64 * c[k];
        }
    }
    (v, d)
}

const TAYLOR_TERMS: usize = 32;

struct Table {
    neg: Vec<(f64, f64)>,
    pos: Vec<(f64, f64)>,
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let steps = ((ASYMPTOTIC_LIMIT - SERIES_LIMIT) / TABLE_STEP).round() as usize;
        let pos_steps = ((ASYMPTOTIC_LIMIT - SERIES_RIGHT) / TABLE_STEP).round() as usize;
        let mut c = [0.0; TAYLOR_TERMS];
        // negative side: march from -4 leftward, node j at -4 - j·step
        let mut neg = Vec::with_capacity(steps + 1);
        let mut cur = airy_series(-SERIES_LIMIT);
        neg.push(cur);
        for j in 0..steps {
            let x0 = -SERIES_LIMIT - j as f64 * TABLE_STEP;
            taylor_coefficients(x0, cur.0, cur.1, &mut c);
            cur = taylor_eval(&c, -TABLE_STEP);
            neg.push(cur);
        }
        // positive side: march from 12 leftward, node j at 2 + j·step
        let mut pos = vec![(0.0, 0.0); pos_steps + 1];
        let mut cur = airy_asymptotic(ASYMPTOTIC_LIMIT);
        pos[pos_steps] = cur;
        for j in (0..pos_steps).rev() {
            let x0 = SERIES_RIGHT + (j + 1) as f64 * TABLE_STEP;
            taylor_coefficients(x0, cur.0, cur.1, &mut c);
            cur = taylor_eval(&c, -TABLE_STEP);
            pos[j] = cur;
        }
        Table { neg, pos }
    })
}

fn airy_table(x: f64) -> (f64, f64) {
    let t = table();
    let mut c = [0.0; 24];
    if x < 0.0 {
        let j = ((-x - SERIES_LIMIT) / TABLE_STEP).round() as usize;
        let j = j.min(t.neg.len() - 1);
        let x0 = -SERIES_LIMIT - j as f64 * TABLE_STEP;
        let (y, yp) = t.neg[j];
        taylor_coefficients(x0, y, yp, &mut c);
        taylor_eval(&c, x - x0)
    } else {
        let j = ((x - SERIES_RIGHT).max(0.0) / TABLE_STEP).round() as usize;
        let j = j.min(t.pos.len() - 1);
        let x0 = SERIES_RIGHT + j as f64 * TABLE_STEP;
        let (y, yp) = t.pos[j];
        taylor_coefficients(x0, y, yp, &mut c);
        taylor_eval(&c, x - x0)
    }
}

/// `∫_x^∞ A(s) ds`, using `∫_0^∞ A = 1/3` for `x < 0`.
pub fn airy_tail_integral(x: f64) -> f64 {
    if x >= 0.0 {
        let hi = (x + 2.0).max(16.0);
        crate::quad::integrate_panels(x, hi, 0.5, 16, ai)
    } else {
        1.0 / 3.0 + crate::quad::integrate_panels(x, 0.0, 0.5, 16, ai)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // (x, A, A') from 30-digit reference arithmetic
    const REF: &[(f64, f64, f64)] = &[
        (-30.0, -0.087968188456842163, 1.2286206026374851),
        (-20.0, -0.17640612707798469, 0.89286285673647124),
        (-12.5, -0.27627456138116025, -0.41933133041950516),
        (-11.0, -0.0087595892557023813, -1.0273278736645794),
        (-8.0, -0.052705050356386203, 0.93556093819830655),
        (-5.0, 0.35076100902411432, 0.32719281855444314),
        (-4.0, -0.070265532949289515, -0.79062857536858138),
        (-1.0, 0.53556088329235212, -0.010160567116645209),
        (0.0, 0.35502805388781724, -0.2588194037928068),
        (1.0, 0.13529241631288142, -0.15914744129679321),
        (2.0, 0.034924130423274379, -0.053090384433653632),
        (4.0, 0.00095156385120480187, -0.0019586409502041789),
        (5.0, 0.00010834442813607442, -0.00024741389086846248),
        (8.0, 4.6922076160992316e-8, -1.3414392979067866e-7),
        (11.0, 4.2262758649603596e-12, -1.4111441246628517e-11),
        (12.0, 1.3931846888753608e-13, -4.8547365549853085e-13),
        (12.5, 2.3968278260780499e-14, -8.5213465646738564e-14),
        (20.0, 1.6916728686705403e-27, -7.586391625748355e-27),
        (30.0, 3.2082175915504956e-49, -1.759876581432726e-48),
    ];

    #[test]
    fn matches_reference_values() {
        for &(x, a, ap) in REF {
            let (ga, gap) = airy(x);
            if x.abs() <= 12.0 {
                assert!((ga - a).abs() <= 1e-13, "A({x}) = {ga} vs {a}");
                assert!((gap - ap).abs() <= 1e-12, "A'({x}) = {gap} vs {ap}");
            }
            if x > 0.0 {
                assert!(((ga - a) / a).abs() <= 1e-11, "rel A({x})");
                assert!(((gap - ap) / ap).abs() <= 1e-11, "rel A'({x})");
            } else {
                assert!((ga - a).abs() <= 1e-13 * (1.0 + x.abs()), "A({x})");
                assert!((gap - ap).abs() <= 1e-12 * (1.0 + x.abs()), "A'({x})");
            }
        }
    }

    #[test]
    fn value_at_zero() {
        assert!((ai(0.0) - 0.355028053887817).abs() < 1e-15);
    }

    #[test]
    fn series_and_table_overlap() {
        for x in [-5.0, -4.5, 2.5, 3.0, 3.5] {
            let (a, ap) = airy_series(x);
            let (b, bp) = airy_table(x);
            assert!((a - b).abs() < 1e-12 && (ap - bp).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn table_and_asymptotic_overlap() {
        for x in [-11.0, -9.0, 9.0, 11.0] {
            let (a, ap) = airy_asymptotic(x);
            let (b, bp) = airy_table(x);
            let s = if x > 0.0 { a.abs() } else { 1.0 };
            assert!((a - b).abs() < 1e-12 * s && (ap - bp).abs() < 1e-11 * s.max(ap.abs()), "x={x}");
        }
    }

    #[test]
    fn ode_ratio_at_one() {
        let h = 1e-4;
        let d2 = (airy(1.0 + h).1 - airy(1.0 - h).1) / (2.0 * h);
        assert!((d2 / ai(1.0) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn one_term_asymptotic_at_ten() {
        let x: f64 = 10.0;
        let lead = (-2.0 / 3.0 * x.powf(1.5)).exp() / (2.0 * PI.sqrt() * x.powf(0.25));
        assert!((ai(x) / lead - 1.0).abs() < 0.01);
    }

    #[test]
    fn tail_integral_totals() {
        assert!((airy_tail_integral(0.0) - 1.0 / 3.0).abs() < 1e-14);
        // ∫_{-∞}^∞ A = 1 in the Abel sense; the tail from far left approaches it
        assert!((airy_tail_integral(-200.0) - 1.0).abs() < 0.05);
    }
}
