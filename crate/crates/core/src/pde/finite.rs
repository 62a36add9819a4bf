//! Fourth-order PDE for `log P_n(α, b)` at finite `n`.

use super::rairy::STENCIL_HALF_WIDTH;
use super::stencil::Jet2;
use super::ResidualReport;
use crate::finiten::{tau_blocks, Domain, MomentDeformation, SourceEnsemble};
use crate::{Error, Result};

/// Largest `n` accepted by the finite-n PDE check.
pub const MAX_PDE_N: usize = 6;

/// The blocks `F^±, H_1^±, H_2^±, G^±` and their `b`-derivatives at the stencil centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirasoroBlocks {
    pub f_plus: f64,
    pub f_minus: f64,
    pub h1_plus: f64,
    pub h1_minus: f64,
    pub h2_plus: f64,
    pub h2_minus: f64,
    pub g_plus: f64,
    pub g_minus: f64,
    pub f_plus_b: f64,
    pub f_minus_b: f64,
    pub f_plus_bb: f64,
    pub f_minus_bb: f64,
    pub h1_plus_b: f64,
    pub h1_minus_b: f64,
    pub h2_plus_b: f64,
    pub h2_minus_b: f64,
    pub g_plus_b: f64,
    pub g_minus_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteResidual {
    /// Quartic form.
    pub quartic: ResidualReport,
    /// 4×4 determinant form.
    pub determinant: ResidualReport,
    pub blocks: VirasoroBlocks,
}

fn log_pn(k1: usize, k2: usize, alpha: f64, b: f64) -> Result<f64> {
    let def = MomentDeformation::default();
    let num = tau_blocks(k1, k2, alpha, Domain::HalfLine(b), &def)?;
    let den = tau_blocks(k1, k2, alpha, Domain::WholeLine, &def)?;
    let ratio = num / den;
    if !(ratio > 0.0) {
        return Err(Error::NonPositiveDeterminant(ratio));
    }
    Ok(ratio.ln())
}

/// Blocks from the partials `f[i][j] = ∂_α^i ∂_b^j log P_n`.
pub fn blocks_from_partials(f: &[[f64; 5]; 5], k1: usize, k2: usize, alpha: f64, b: f64) -> VirasoroBlocks {
    let (k1, k2, a) = (k1 as f64, k2 as f64, alpha);
    let g = |i: usize, j: usize| f[i][j + 1] + f[i + 1][j];

    let fp = f[1][1] - k1;
    let fp_b = f[1][2];
    let fp_bb = f[1][3];
    let fp_a = f[2][1];
    let fp_ab = f[2][2];
    let fm = -(f[0][2] + f[1][1]) - k2;
    let fm_b = -(f[0][3] + f[1][2]);
    let fm_bb = -(f[0][4] + f[1][3]);
    let fm_a = -(f[1][2] + f[2][1]);
    let fm_ab = -(f[1][3] + f[2][2]);

    let h1p = 4.0 * f[1][0] + 4.0 * a * k1 + 4.0 * k1 * k2 / a;
    let h1p_b = 4.0 * f[1][1];
    let h1p_bb = 4.0 * f[1][2];
    let h1m = -2.0 * (b * f[1][1] - a * f[2][0] + f[1][0]) - 4.0 * k1 * k2 / a;
    let h1m_b = -2.0 * (2.0 * f[1][1] + b * f[1][2] - a * f[2][1]);
    let h1m_bb = -2.0 * (3.0 * f[1][2] + b * f[1][3] - a * f[2][2]);

    let h2p = 2.0 * (b * f[1][1] - a * f[2][0] - f[1][0] - 2.0 * a * f[1][1]);
    let h2p_a = 2.0 * (b * f[2][1] - 2.0 * f[2][0] - a * f[3][0] - 2.0 * f[1][1] - 2.0 * a * f[2][1]);
    let h2p_b = 2.0 * (b * f[1][2] - a * f[2][1] - 2.0 * a * f[1][2]);
    let h2p_ab = 2.0 * (b * f[2][2] - f[2][1] - a * f[3][1] - 2.0 * f[1][2] - 2.0 * a * f[2][2]);
    let h2m = -2.0 * (b * g(0, 1) - a * g(1, 0) - g(0, 0));
    let h2m_a = -2.0 * (b * g(1, 1) - 2.0 * g(1, 0) - a * g(2, 0));
    let h2m_b = -2.0 * (b * g(0, 2) - a * g(1, 1));
    let h2m_ab = -2.0 * (b * g(1, 2) - g(1, 1) - a * g(2, 1));

    // 2G^± = {H1^±, F^±}_b ∓ {H2^±, F^±}_α with {u, v} = u'v − uv'
    let gp = 0.5 * ((h1p_b * fp - h1p * fp_b) - (h2p_a * fp - h2p * fp_a));
    let gm = 0.5 * ((h1m_b * fm - h1m * fm_b) + (h2m_a * fm - h2m * fm_a));
    let gp_b = 0.5 * ((h1p_bb * fp - h1p * fp_bb) - (h2p_ab * fp + h2p_a * fp_b - h2p_b * fp_a - h2p * fp_ab));
    let gm_b = 0.5 * ((h1m_bb * fm - h1m * fm_bb) + (h2m_ab * fm + h2m_a * fm_b - h2m_b * fm_a - h2m * fm_ab));

    VirasoroBlocks {
        f_plus: fp,
        f_minus: fm,
        h1_plus: h1p,
        h1_minus: h1m,
        h2_plus: h2p,
        h2_minus: h2m,
        g_plus: gp,
        g_minus: gm,
        f_plus_b: fp_b,
        f_minus_b: fm_b,
        f_plus_bb: fp_bb,
        f_minus_bb: fm_bb,
        h1_plus_b: h1p_b,
        h1_minus_b: h1m_b,
        h2_plus_b: h2p_b,
        h2_minus_b: h2m_b,
        g_plus_b: gp_b,
        g_minus_b: gm_b,
    }
}

/// Quartic residual and the larger of its two products.
pub fn quartic_form(v: &VirasoroBlocks) -> (f64, f64) {
    let t1 = (v.f_plus * v.g_minus_b + v.f_minus * v.g_plus_b) * (v.f_plus * v.f_minus_b - v.f_minus * v.f_plus_b);
    let t2 = (v.f_plus * v.g_minus + v.f_minus * v.g_plus) * (v.f_plus * v.f_minus_bb - v.f_minus * v.f_plus_bb);
    (t1 - t2, t1.abs().max(t2.abs()))
}

/// Determinant of the 4×4 system and its largest Leibniz product.
pub fn determinant_form(v: &VirasoroBlocks) -> (f64, f64) {
    let m = [
        [v.g_plus, v.f_plus_b, -v.f_plus, 0.0],
        [-v.g_minus, v.f_minus_b, -v.f_minus, 0.0],
        [v.g_plus_b, v.f_plus_bb, 0.0, -v.f_plus],
        [-v.g_minus_b, v.f_minus_bb, 0.0, -v.f_minus],
    ];
    let mut det = 0.0;
    let mut norm: f64 = 0.0;
    let mut perm = [0usize, 1, 2, 3];
    permute(&mut perm, 0, &mut |p, sign| {
        let prod: f64 = (0..4).map(|i| m[i][p[i]]).product();
        det += sign * prod;
        norm = norm.max(prod.abs());
    });
    (det, norm)
}

fn permute(p: &mut [usize; 4], k: usize, visit: &mut impl FnMut(&[usize; 4], f64)) {
    if k == p.len() {
        let inversions = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        visit(p, if inversions % 2 == 0 { 1.0 } else { -1.0 });
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// Tabulate `log P_n` on a 9×9 `(α, b)` stencil of step `h` and evaluate
/// both forms of the fourth-order PDE.
pub fn finite_n_pde_residual(ens: &SourceEnsemble, b: f64, h: f64) -> Result<FiniteResidual> {
    let (n, k1, k2, alpha) = (ens.n, ens.k1, ens.k2(), ens.alpha);
    if n > MAX_PDE_N {
        return Err(Error::UnsupportedDomain(format!("n = {n} exceeds {MAX_PDE_N}")));
    }
    if k1 == 0 || k2 == 0 {
        return Err(Error::UnsupportedDomain("both blocks must be non-empty".into()));
    }
    let k = STENCIL_HALF_WIDTH;
    if !(h > 0.0) || alpha - k as f64 * h <= 0.0 {
        return Err(Error::Stencil(format!("α stencil at {alpha} with step {h} reaches α ≤ 0")));
    }
    let off = |i: usize| (i as f64 - k as f64) * h;
    let patch: Vec<Vec<f64>> = (0..=2 * k)
        .map(|i| (0..=2 * k).map(|j| log_pn(k1, k2, alpha + off(i), b + off(j))).collect())
        .collect::<Result<_>>()?;
    let jet = Jet2::from_patch(&patch, h, h, 4)?;
    let mut f = [[0.0; 5]; 5];
    for (i, row) in f.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate().take(5 - i) {
            *v = jet.get(i, j);
        }
    }
    let blocks = blocks_from_partials(&f, k1, k2, alpha, b);
    let (q, qn) = quartic_form(&blocks);
    let (d, dn) = determinant_form(&blocks);
    Ok(FiniteResidual {
        quartic: ResidualReport::new(q, qn, (h, h))?,
        determinant: ResidualReport::new(d, dn, (h, h))?,
        blocks,
    })
}
