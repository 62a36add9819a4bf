//! Block moment determinants `τ_{k1,k2}` and the confinement probability.
//!
//! Rows of block `ℓ` use the monic polynomials `σ^i He_i((z−μ)/σ)` adapted to
//! that block's Gaussian weight; columns use `He_j(z)`. Both are unit
//! triangular in the monomials, so the determinant equals the monomial one.

use nalgebra::DMatrix;

use super::{Domain, MomentDeformation, SourceEnsemble};
use crate::quad::GaussLegendre;
use crate::{Error, Result};

const HALF_WIDTH_SD: f64 = 14.0;
const PANELS: usize = 40;
const ORDER: usize = 24;

/// Largest matrix size for the dense determinant route.
pub const MAX_N: usize = 12;

fn hermite_row(z: f64, n: usize, out: &mut [f64]) {
    if n == 0 {
        return;
    }
    out[0] = 1.0;
    if n > 1 {
        out[1] = z;
    }
    for k in 2..n {
        out[k] = z * out[k - 1] - (k - 1) as f64 * out[k - 2];
    }
}

/// Fill `rows` rows of moments `∫_E p_i(z) He_j(z) e^{−a z²/2 + c z} dz`.
fn block(
    m: &mut DMatrix<f64>,
    row0: usize,
    rows: usize,
    a: f64,
    c: f64,
    domain: Domain,
    panels: usize,
) -> Result<()> {
    if rows == 0 {
        return Ok(());
    }
    if a <= 0.0 {
        return Err(Error::DivergentWeight(a));
    }
    let n = m.ncols();
    let mu = c / a;
    let sd = 1.0 / a.sqrt();
    let lo = mu - HALF_WIDTH_SD * sd;
    let mut hi = mu + HALF_WIDTH_SD * sd;
    if let Domain::HalfLine(b) = domain {
        hi = hi.min(b);
    }
    if hi <= lo {
        return Ok(());
    }
    let rule = GaussLegendre::cached(ORDER);
    let width = (hi - lo) / panels as f64;
    let mut pr = vec![0.0; rows];
    let mut pc = vec![0.0; n];
    let scale: Vec<f64> = (0..rows).map(|i| sd.powi(i as i32)).collect();
    for p in 0..panels {
        let a0 = lo + p as f64 * width;
        for (z, w) in rule.mapped(a0, a0 + width) {
            // weight relative to its peak value e^{c²/(2a)}
            let wt = w * (-0.5 * a * (z - mu) * (z - mu)).exp();
            hermite_row((z - mu) / sd, rows, &mut pr);
            hermite_row(z, n, &mut pc);
            for i in 0..rows {
                let ri = wt * pr[i] * scale[i];
                for j in 0..n {
                    m[(row0 + i, j)] += ri * pc[j];
                }
            }
        }
    }
    // restore the peak factor
    let peak = (0.5 * c * c / a).exp();
    for i in 0..rows {
        for j in 0..n {
            m[(row0 + i, j)] *= peak;
        }
    }
    Ok(())
}

/// `τ_{k1,k2}` at source strength `α` on `domain` under deformation `def`.
pub fn tau_blocks(k1: usize, k2: usize, alpha: f64, domain: Domain, def: &MomentDeformation) -> Result<f64> {
    tau_blocks_with(k1, k2, alpha, domain, def, PANELS)
}

pub(crate) fn tau_blocks_with(
    k1: usize,
    k2: usize,
    alpha: f64,
    domain: Domain,
    def: &MomentDeformation,
    panels: usize,
) -> Result<f64> {
    if def.beta >= 0.5 {
        return Err(Error::DivergentWeight(1.0 - 2.0 * def.beta));
    }
    let n = k1 + k2;
    if n == 0 {
        return Ok(1.0);
    }
    if n > MAX_N + 1 {
        return Err(Error::UnsupportedDomain(format!("n = {n} exceeds {MAX_N}")));
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    let a1 = 1.0 - 2.0 * (def.beta + def.t2 - def.s2);
    let c1 = alpha + def.t1 - def.s1;
    let a2 = 1.0 - 2.0 * (def.t2 - def.u2);
    let c2 = def.t1 - def.u1;
    block(&mut m, 0, k1, a1, c1, domain, panels)?;
    block(&mut m, k1, k2, a2, c2, domain, panels)?;
    Ok(m.determinant())
}

/// Moment determinant of the ensemble on `domain`.
pub fn tau_moment_det(ens: &SourceEnsemble, domain: Domain, def: &MomentDeformation) -> Result<f64> {
    def.validate()?;
    if ens.n > MAX_N {
        return Err(Error::UnsupportedDomain(format!("n = {} exceeds {MAX_N}", ens.n)));
    }
    tau_blocks(ens.k1, ens.k2(), ens.alpha, domain, def)
}

/// `P(all eigenvalues < b) = τ((−∞, b)) / τ(ℝ)`.
pub fn pn_probability(ens: &SourceEnsemble, b: f64) -> Result<f64> {
    pn_probability_with(ens, b, PANELS)
}

pub fn pn_probability_with(ens: &SourceEnsemble, b: f64, panels: usize) -> Result<f64> {
    if ens.n > MAX_N {
        return Err(Error::UnsupportedDomain(format!("n = {} exceeds {MAX_N}", ens.n)));
    }
    let def = MomentDeformation::default();
    // τ vanishes like α^{k1 k2}; the α → 0⁺ limit of the ratio is the source-free one
    let (k1, k2) = if ens.alpha == 0.0 { (0, ens.n) } else { (ens.k1, ens.k2()) };
    let num = tau_blocks_with(k1, k2, ens.alpha, Domain::HalfLine(b), &def, panels)?;
    let den = tau_blocks_with(k1, k2, ens.alpha, Domain::WholeLine, &def, panels)?;
    Ok((num / den).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn zero() -> MomentDeformation {
        MomentDeformation::default()
    }

    #[test]
    fn one_by_one_is_shifted_gaussian() {
        let ens = SourceEnsemble::new(1, 1, 1.0).unwrap();
        assert!((pn_probability(&ens, 1.0).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn whole_line_ratio_law() {
        for (k1, k2) in [(1, 1), (1, 2), (2, 2), (1, 3), (2, 1), (4, 1)] {
            let t1 = tau_blocks(k1, k2, 0.5, Domain::WholeLine, &zero()).unwrap();
            let t2 = tau_blocks(k1, k2, 1.0, Domain::WholeLine, &zero()).unwrap();
            let want = 2f64.powi((k1 * k2) as i32) * (k1 as f64 * (1.0 - 0.25) / 2.0).exp();
            assert!((t2 / t1 / want - 1.0).abs() < 1e-10, "({k1},{k2}) {} {}", t2 / t1, want);
        }
    }

    #[test]
    fn pure_gue_normalization() {
        // k1 = 0, n = 2: det of [[m0, m1], [m1, m2]] with Gaussian moments m0 = √(2π), m1 = 0, m2 = √(2π)
        let t = tau_blocks(0, 2, 0.0, Domain::WholeLine, &zero()).unwrap();
        let s = (2.0 * std::f64::consts::PI).sqrt();
        assert!((t - s * s).abs() < 1e-10 * s * s);
    }

    #[test]
    fn exhaustion_to_whole_line() {
        let ens = SourceEnsemble::new(3, 1, 0.7).unwrap();
        let far = tau_moment_det(&ens, Domain::HalfLine(40.0), &zero()).unwrap();
        let all = tau_moment_det(&ens, Domain::WholeLine, &zero()).unwrap();
        assert!((far / all - 1.0).abs() < 1e-13);
        assert!((pn_probability(&ens, 40.0).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn divergent_weight() {
        let def = MomentDeformation { beta: 0.5, ..Default::default() };
        let ens = SourceEnsemble::new(2, 1, 0.0).unwrap();
        assert!(matches!(tau_moment_det(&ens, Domain::WholeLine, &def), Err(Error::DivergentWeight(_))));
    }

    #[test]
    fn panel_refinement_is_stable() {
        let ens = SourceEnsemble::new(6, 1, 2.0).unwrap();
        let a = pn_probability(&ens, 5.0).unwrap();
        let b = pn_probability_with(&ens, 5.0, 80).unwrap();
        assert!((a - b).abs() < 1e-13, "{a} {b}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn probability_is_monotone(n in 1usize..6, alpha in 0.0f64..3.0, b in -3.0f64..6.0) {
            let ens = SourceEnsemble::new(n, 1, alpha).unwrap();
            let p = pn_probability(&ens, b).unwrap();
            let q = pn_probability(&ens, b + 0.25).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!(q >= p - 1e-13);
        }
    }
}
