//! Nyström discretization of Fredholm determinants on `(x, ∞)`.
//!
//! The r-Airy kernel is never evaluated pointwise here: with one
//! Gauss–Legendre rule `σ` on `[0, L]` serving both the interval variable
//! and the integration variable `w`, the kernel matrix factors as
//! `F W Gᵀ` with `F_ik = A_r^-(x+σ_i+σ_k)` and `G_jk = A_r^+(x+σ_j+σ_k)`.
//! `A_r^-` comes from a piecewise Chebyshev table built once per `(r, τ)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};

use crate::kernels::{airy_kernel, expansion_term, KernelSpec};
use crate::quad::{ChebTable, GaussLegendre};
use crate::specfun::{airy, outlier_airy, OutlierAirySpec, PainleveIISolution, Sign};
use crate::{Error, Result};

pub const X_FLOOR: f64 = -10.0;
/// Right end of the region where outlier kernels are not yet negligible.
const OUTLIER_REACH: f64 = 16.0;
const TABLE_LO: f64 = -10.5;
const TABLE_HI: f64 = 42.5;

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub x: f64,
    pub length: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// `m`-point Gauss–Legendre rule on `[x, x+length]`.
    pub fn new(x: f64, length: f64, m: usize) -> Result<Self> {
        if x < X_FLOOR {
            return Err(Error::UnsupportedDomain(format!("x = {x} < {X_FLOOR}")));
        }
        if m < 20 {
            return Err(Error::InvalidArgument(format!("m = {m} < 20")));
        }
        let g = GaussLegendre::cached(m);
        let (nodes, weights) = g.mapped(x, x + length).unzip();
        Ok(Self { x, length, nodes, weights })
    }

    /// Rule sized for the outlier kernels: `L = max(16 − x, 6)`.
    pub fn for_outliers(x: f64, m: usize) -> Result<Self> {
        Self::new(x, (OUTLIER_REACH - x).max(6.0), m)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Offsets `σ_i = x_i − x`.
    pub fn offsets(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().map(move |&n| n - self.x)
    }

    pub fn doubled(&self) -> Result<Self> {
        Self::new(self.x, self.length, 2 * self.len())
    }
}

/// Where the Airy-kernel diagonal `A'² − sA²` drops below `1e-16`.
fn airy_reach() -> f64 {
    static S: OnceLock<f64> = OnceLock::new();
    *S.get_or_init(|| {
        let mut s = 0.0;
        while airy_kernel(s, s) > 1e-16 {
            s += 0.05;
        }
        s
    })
}

/// Rule on `[x, x+L]` for the Airy kernel, `m` doubled from 20 until the
/// log-determinant moves by less than `target`.
pub fn build_rule(x: f64, target_accuracy: f64) -> Result<QuadratureRule> {
    if x < X_FLOOR {
        return Err(Error::UnsupportedDomain(format!("x = {x} < {X_FLOOR}")));
    }
    let length = (airy_reach() - x).max(2.0);
    let mut m = 20;
    let mut rule = QuadratureRule::new(x, length, m)?;
    let mut prev = fredholm_logdet(&KernelSpec::Airy, x, &rule)?;
    while m < 128 {
        let next_m = (2 * m).min(128);
        let next = QuadratureRule::new(x, length, next_m)?;
        let val = fredholm_logdet(&KernelSpec::Airy, x, &next)?;
        if (val - prev).abs() < target_accuracy {
            return Ok(rule);
        }
        rule = next;
        prev = val;
        m = next_m;
    }
    Ok(rule)
}

fn minus_table(r: usize, tau: f64) -> Result<Arc<ChebTable>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64), Arc<ChebTable>>>> = OnceLock::new();
    let spec = OutlierAirySpec::new(r as i64, tau, Sign::Minus)?;
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (r, tau.to_bits());
    if let Some(t) = cache.lock().unwrap().get(&key) {
        return Ok(t.clone());
    }
    let table = Arc::new(ChebTable::new(TABLE_LO, TABLE_HI, 1.0, 24, |u| {
        outlier_airy(u, spec).unwrap_or(f64::NAN)
    }));
    cache.lock().unwrap().insert(key, table.clone());
    Ok(table)
}

/// `A_r^-(u; τ)` from the shared Chebyshev table.
pub fn tabulated_minus(u: f64, r: usize, tau: f64) -> Result<f64> {
    Ok(minus_table(r, tau)?.eval(u))
}

/// Unweighted kernel matrix `K(x_i, x_j)`.
pub fn kernel_matrix(kernel: &KernelSpec, rule: &QuadratureRule) -> Result<DMatrix<f64>> {
    kernel.validate()?;
    let m = rule.len();
    let xs = &rule.nodes;
    Ok(match *kernel {
        KernelSpec::Zero => DMatrix::zeros(m, m),
        KernelSpec::Airy | KernelSpec::RAiry { r: 0, .. } => DMatrix::from_fn(m, m, |i, j| airy_kernel(xs[i], xs[j])),
        KernelSpec::RAiry { r, tau } => {
            let table = minus_table(r, tau)?;
            let plus = OutlierAirySpec::new(r as i64, tau, Sign::Plus)?;
            let s: Vec<f64> = rule.offsets().collect();
            let x = rule.x;
            let f = DMatrix::from_fn(m, m, |i, k| table.eval(x + s[i] + s[k]) * rule.weights[k]);
            let mut g = DMatrix::zeros(m, m);
            for j in 0..m {
                for k in 0..m {
                    g[(k, j)] = outlier_airy(x + s[j] + s[k], plus)?;
                }
            }
            f * g
        }
        KernelSpec::ExpansionTerm { i, r } => {
            let mut k = DMatrix::zeros(m, m);
            for a in 0..m {
                for b in 0..m {
                    k[(a, b)] = expansion_term(i, r, xs[a], xs[b])?;
                }
            }
            k
        }
        KernelSpec::TruncatedSum { .. } => {
            let mut k = DMatrix::zeros(m, m);
            for a in 0..m {
                for b in 0..m {
                    k[(a, b)] = kernel.eval(xs[a], xs[b])?;
                }
            }
            k
        }
    })
}

#[derive(Debug, Clone)]
pub struct FredholmContext {
    pub rule: QuadratureRule,
    pub kernel: KernelSpec,
    /// `√w_i K(x_i,x_j) √w_j`.
    pub matrix: DMatrix<f64>,
    pub logdet: f64,
    pub spectral_radius: f64,
}

impl FredholmContext {
    pub fn new(kernel: KernelSpec, rule: QuadratureRule) -> Result<Self> {
        let k = kernel_matrix(&kernel, &rule)?;
        let sw: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
        let m = rule.len();
        let matrix = DMatrix::from_fn(m, m, |i, j| sw[i] * k[(i, j)] * sw[j]);
        let spectral_radius = matrix
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if spectral_radius >= 1.0 {
            return Err(Error::DomainTooFarLeft { radius: spectral_radius });
        }
        let logdet = log_det_identity_minus(&matrix)?;
        Ok(Self { rule, kernel, matrix, logdet, spectral_radius })
    }
}

fn log_det_identity_minus(m: &DMatrix<f64>) -> Result<f64> {
    let n = m.nrows();
    let a = DMatrix::identity(n, n) - m;
    let lu = a.lu();
    let det = lu.determinant();
    let log = lu.u().diagonal().iter().map(|d| d.abs().ln()).sum();
    if !(det > 0.0) {
        return Err(Error::NonPositiveDeterminant(det));
    }
    Ok(log)
}

/// `log det(I − K)` on `(x, ∞)` discretized by `rule`.
pub fn fredholm_logdet(kernel: &KernelSpec, x: f64, rule: &QuadratureRule) -> Result<f64> {
    if (rule.x - x).abs() > 1e-15 * (1.0 + x.abs()) {
        return Err(Error::InvalidArgument(format!("rule starts at {} but x = {x}", rule.x)));
    }
    if matches!(kernel, KernelSpec::Zero) {
        return Ok(0.0);
    }
    Ok(FredholmContext::new(*kernel, rule.clone())?.logdet)
}

/// Default node count for r-Airy determinants.
pub const DEFAULT_NODES: usize = 60;

/// `Q(τ, x) = log det(I − K_τ^{(r)})_{(x,∞)}` with the default rule.
pub fn q_rairy(r: usize, tau: f64, x: f64) -> Result<f64> {
    q_rairy_with(r, tau, x, DEFAULT_NODES)
}

pub fn q_rairy_with(r: usize, tau: f64, x: f64, m: usize) -> Result<f64> {
    let rule = QuadratureRule::for_outliers(x, m)?;
    let kernel = if r == 0 { KernelSpec::Airy } else { KernelSpec::RAiry { r, tau } };
    fredholm_logdet(&kernel, x, &rule)
}

/// `Q_0(x) = −∫_x^∞ (α − x) g²(α) dα`.
pub fn tracy_widom_q0(x: f64, sol: &PainleveIISolution) -> Result<f64> {
    if x < sol.alpha[0] {
        return Err(Error::UnsupportedDomain(format!("x = {x} below the Painlevé grid")));
    }
    Ok(-sol.int_linear_g2(x))
}

/// `Q_0'(x) = ∫_x^∞ g²`.
pub fn tracy_widom_q0_prime(x: f64, sol: &PainleveIISolution) -> Result<f64> {
    if x < sol.alpha[0] {
        return Err(Error::UnsupportedDomain(format!("x = {x} below the Painlevé grid")));
    }
    Ok(sol.int_g2(x))
}

/// Resolvent data of the Airy kernel on `(x, ∞)`.
///
/// `rho = (I+R)A` and `sigma = (I+R)A'`; brackets are `∫_x^∞ f g`.
#[derive(Debug, Clone)]
pub struct ResolventFunctionals {
    pub x: f64,
    pub r_diag: f64,
    pub rho_nodes: Vec<f64>,
    pub rho_x: f64,
    pub sigma_x: f64,
    pub rho_a: f64,
    pub sigma_a: f64,
    pub sigma_ap: f64,
    pub rho_app: f64,
    /// `max |((I − KW)(I − KW)^{-1} − I)_{ij}|`.
    pub inverse_defect: f64,
    /// `(I − KW)^{-1} W` at the nodes, used for trace routes.
    resolvent: DMatrix<f64>,
    rule: QuadratureRule,
}

pub fn resolvent_functionals(x: f64, rule: &QuadratureRule) -> Result<ResolventFunctionals> {
    // validates the spectral radius
    FredholmContext::new(KernelSpec::Airy, rule.clone())?;
    let m = rule.len();
    let xs = &rule.nodes;
    let w = &rule.weights;
    let k = DMatrix::from_fn(m, m, |i, j| airy_kernel(xs[i], xs[j]));
    let kw = DMatrix::from_fn(m, m, |i, j| k[(i, j)] * w[j]);
    let a = DMatrix::identity(m, m) - &kw;
    let inv = a.clone().try_inverse().ok_or(Error::DomainTooFarLeft { radius: 1.0 })?;
    let inverse_defect = (&a * &inv - DMatrix::identity(m, m)).amax();
    let av = DVector::from_iterator(m, xs.iter().map(|&t| airy(t).0));
    let apv = DVector::from_iterator(m, xs.iter().map(|&t| airy(t).1));
    let rho = &inv * &av;
    let sigma = &inv * &apv;
    let kx = DVector::from_iterator(m, xs.iter().map(|&t| airy_kernel(x, t)));
    let (ax, apx) = airy(x);
    let ext = |v: &DVector<f64>| -> f64 { (0..m).map(|j| kx[j] * w[j] * v[j]).sum() };
    let rho_x = ax + ext(&rho);
    let sigma_x = apx + ext(&sigma);
    let rk = &inv * &kx;
    let r_diag = airy_kernel(x, x) + ext(&rk);
    let bracket = |f: &DVector<f64>, g: &dyn Fn(usize) -> f64| -> f64 { (0..m).map(|j| w[j] * f[j] * g(j)).sum() };
    let rho_a = bracket(&rho, &|j| av[j]);
    let sigma_a = bracket(&sigma, &|j| av[j]);
    let sigma_ap = bracket(&sigma, &|j| apv[j]);
    let rho_app = bracket(&rho, &|j| xs[j] * av[j]);
    let resolvent = DMatrix::from_fn(m, m, |i, j| inv[(i, j)] * w[j]);
    Ok(ResolventFunctionals {
        x,
        r_diag,
        rho_nodes: rho.iter().copied().collect(),
        rho_x,
        sigma_x,
        rho_a,
        sigma_a,
        sigma_ap,
        rho_app,
        inverse_defect,
        resolvent,
        rule: rule.clone(),
    })
}

/// Residuals of the resolvent identities.
#[derive(Debug, Clone, Copy)]
pub struct IdentityResiduals {
    /// `R(x,x) − ⟨ρ,A⟩`.
    pub tw1: f64,
    /// `2⟨σ,A⟩ − ⟨ρ,A⟩² + ρ(x)²`.
    pub tw4: f64,
    /// `2⟨ρ,A''⟩ − ⟨σ,A'⟩ − x⟨ρ,A⟩`.
    pub tw4_prime: f64,
    /// `⟨σ,A'⟩ + ρ(x)σ(x) + ⟨ρ,A''⟩ − ⟨σ,A⟩⟨ρ,A⟩`.
    pub identity3: f64,
    /// `Tr((I+R)K_1)² − r²⟨ρ,A⟩²` at `r = 1`, traced from matrices.
    pub lemma_trace: f64,
}

impl ResolventFunctionals {
    pub fn identities(&self) -> IdentityResiduals {
        let tr = self.matrix_traces(1).expect("r = 1 traces");
        IdentityResiduals {
            tw1: self.r_diag - self.rho_a,
            tw4: 2.0 * self.sigma_a - self.rho_a * self.rho_a + self.rho_x * self.rho_x,
            tw4_prime: 2.0 * self.rho_app - self.sigma_ap - self.x * self.rho_a,
            identity3: self.sigma_ap + self.rho_x * self.sigma_x + self.rho_app - self.sigma_a * self.rho_a,
            lemma_trace: tr.l1_squared - self.rho_a * self.rho_a,
        }
    }

    /// Traces of products of `L_i = (I+R)K_i` from the closed bracket forms.
    pub fn bracket_traces(&self, r: usize) -> Traces {
        let r = r as f64;
        let l1 = -r * self.rho_a;
        Traces {
            l1,
            l1_squared: l1 * l1,
            l1_cubed: l1 * l1 * l1,
            l2: -r * r * self.sigma_a,
            l3: -(r.powi(3) / 3.0) * (self.rho_app + self.sigma_ap) - (r / 3.0) * (2.0 * self.rho_app - self.sigma_ap),
            l1_l2: r.powi(3) * self.rho_a * self.sigma_a,
        }
    }

    /// Same traces from the discretized operators.
    pub fn matrix_traces(&self, r: usize) -> Result<Traces> {
        let m = self.rule.len();
        let xs = &self.rule.nodes;
        let l = |i: usize| -> Result<DMatrix<f64>> {
            let mut k = DMatrix::zeros(m, m);
            for a in 0..m {
                for b in 0..m {
                    k[(a, b)] = expansion_term(i, r, xs[a], xs[b])?;
                }
            }
            // (I − KW)^{-1} K_i W
            let kw = DMatrix::from_fn(m, m, |a, b| k[(a, b)] * self.rule.weights[b]);
            let inv_w = &self.resolvent;
            let inv = DMatrix::from_fn(m, m, |a, b| inv_w[(a, b)] / self.rule.weights[b]);
            Ok(inv * kw)
        };
        let l1 = l(1)?;
        let l2 = l(2)?;
        let l3 = l(3)?;
        let l1sq = &l1 * &l1;
        Ok(Traces {
            l1: l1.trace(),
            l1_squared: l1sq.trace(),
            l1_cubed: (&l1sq * &l1).trace(),
            l2: l2.trace(),
            l3: l3.trace(),
            l1_l2: (&l1 * &l2).trace(),
        })
    }

    /// `(Q_1, Q_2, Q_3)` from the closed forms in `ρ(x)`, `σ(x)` and `⟨ρ,A⟩`.
    pub fn closed_q(&self, r: usize) -> (f64, f64, f64) {
        let r = r as f64;
        let q1 = r * self.rho_a;
        let q2 = -(r * r / 2.0) * self.rho_x * self.rho_x;
        let q3 = (r.powi(3) / 3.0) * (self.rho_x * self.rho_x * self.rho_a - self.rho_x * self.sigma_x)
            + (r * self.x / 3.0) * self.rho_a;
        (q1, q2, q3)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Traces {
    pub l1: f64,
    pub l1_squared: f64,
    pub l1_cubed: f64,
    pub l2: f64,
    pub l3: f64,
    pub l1_l2: f64,
}

impl Traces {
    /// `(Q_1, Q_2, Q_3)` from `log det(I − L) = −Tr(L + L²/2 + L³/3 + …)`.
    pub fn q(&self) -> (f64, f64, f64) {
        (
            -self.l1,
            -(self.l2 + self.l1_squared / 2.0),
            -(self.l3 + self.l1_l2 + self.l1_cubed / 3.0),
        )
    }
}

/// `(Q_1, Q_2, Q_3)` assembled from the bracket forms of the traces.
pub fn trace_expansion(r: usize, x: f64, rule: &QuadratureRule) -> Result<(f64, f64, f64)> {
    let f = resolvent_functionals(x, rule)?;
    Ok(f.bracket_traces(r).q())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sol() -> &'static PainleveIISolution {
        PainleveIISolution::shared()
    }

    fn airy_rule(x: f64) -> QuadratureRule {
        QuadratureRule::new(x, (airy_reach() - x).max(2.0), 60).unwrap()
    }

    #[test]
    fn zero_kernel() {
        let rule = airy_rule(0.0);
        assert_eq!(fredholm_logdet(&KernelSpec::Zero, 0.0, &rule).unwrap(), 0.0);
    }

    #[test]
    fn rule_weights_sum_to_length() {
        let rule = airy_rule(-3.0);
        let s: f64 = rule.weights.iter().sum();
        assert!((s - rule.length).abs() < 1e-12);
        assert!(rule.nodes.iter().all(|&n| n > -3.0 && n < -3.0 + rule.length));
    }

    #[test]
    fn build_rule_self_consistent() {
        let rule = build_rule(0.0, 1e-10).unwrap();
        let a = fredholm_logdet(&KernelSpec::Airy, 0.0, &rule).unwrap();
        let b = fredholm_logdet(&KernelSpec::Airy, 0.0, &rule.doubled().unwrap()).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn build_rule_length_and_size() {
        assert!(build_rule(4.0, 1e-10).unwrap().length <= 10.0);
        let left = build_rule(-6.0, 1e-8).unwrap();
        let mid = build_rule(0.0, 1e-8).unwrap();
        assert!(left.len() > mid.len());
        assert!(build_rule(-11.0, 1e-8).is_err());
    }

    #[test]
    fn two_routes_tracy_widom() {
        for x in [-2.0, 0.0, 2.0] {
            let f = fredholm_logdet(&KernelSpec::Airy, x, &airy_rule(x)).unwrap();
            let p = tracy_widom_q0(x, sol()).unwrap();
            assert!((f - p).abs() < 1e-8, "x={x}: {f} vs {p}");
        }
    }

    #[test]
    fn q0_reference_value() {
        // log F2(-2) = log 0.41322414250512257
        let v = tracy_widom_q0(-2.0, sol()).unwrap();
        assert!((v - 0.41322414250512257f64.ln()).abs() < 1e-9, "{v}");
    }

    #[test]
    fn q0_tail_limit() {
        assert!(tracy_widom_q0(8.0, sol()).unwrap().abs() < 1e-10);
    }

    #[test]
    fn q0_derivative() {
        let h = 1e-3;
        for x in [-3.0, 0.0, 1.5] {
            let d = (tracy_widom_q0(x + h, sol()).unwrap() - tracy_widom_q0(x - h, sol()).unwrap()) / (2.0 * h);
            assert!((d - sol().int_g2(x)).abs() < 1e-7);
        }
    }

    #[test]
    fn rairy_is_distribution() {
        let lo = q_rairy(1, 0.0, -6.0).unwrap().exp();
        let hi = q_rairy(1, 0.0, 8.0).unwrap().exp();
        assert!(lo < 1e-3 && hi > 1.0 - 1e-6, "{lo} {hi}");
    }

    #[test]
    fn rairy_converged_in_nodes() {
        let a = q_rairy_with(1, -3.0, 0.0, 60).unwrap();
        let b = q_rairy_with(1, -3.0, 0.0, 90).unwrap();
        assert!((a - b).abs() < 1e-11, "{a} {b}");
    }

    #[test]
    fn rairy_matrix_matches_pointwise_kernel() {
        let rule = QuadratureRule::for_outliers(0.0, 60).unwrap();
        let k = kernel_matrix(&KernelSpec::RAiry { r: 2, tau: -3.0 }, &rule).unwrap();
        let (i, j) = (10, 25);
        let direct = crate::kernels::r_airy_kernel(rule.nodes[i], rule.nodes[j], 2, -3.0).unwrap();
        assert!((k[(i, j)] - direct).abs() < 1e-10, "{} {}", k[(i, j)], direct);
    }

    #[test]
    fn resolvent_identities() {
        for x in [-1.0, 0.0, 0.5, 1.0] {
            let f = resolvent_functionals(x, &airy_rule(x)).unwrap();
            let id = f.identities();
            for v in [id.tw1, id.tw4, id.tw4_prime, id.identity3, id.lemma_trace] {
                assert!(v.abs() < 1e-8, "x={x}: {id:?}");
            }
            assert!(f.rho_a > 0.0 && f.inverse_defect < 1e-9);
        }
    }

    #[test]
    fn q0_prime_is_bracket() {
        let x = 0.0;
        let h = 1e-3;
        let f = resolvent_functionals(x, &airy_rule(x)).unwrap();
        let d = (fredholm_logdet(&KernelSpec::Airy, x + h, &airy_rule(x + h)).unwrap()
            - fredholm_logdet(&KernelSpec::Airy, x - h, &airy_rule(x - h)).unwrap())
            / (2.0 * h);
        assert!((d - f.rho_a).abs() < 1e-6);
    }

    #[test]
    fn trace_routes_agree() {
        for x in [-1.0, 0.0, 1.0] {
            let f = resolvent_functionals(x, &airy_rule(x)).unwrap();
            for r in 1..=3 {
                let b = f.bracket_traces(r).q();
                let m = f.matrix_traces(r).unwrap().q();
                let c = f.closed_q(r);
                for (p, q) in [(b.0, m.0), (b.1, m.1), (b.2, m.2), (b.0, c.0), (b.1, c.1), (b.2, c.2)] {
                    assert!((p - q).abs() < 1e-8, "x={x} r={r}: {b:?} {m:?} {c:?}");
                }
            }
        }
    }

    #[test]
    fn q1_q2_against_painleve() {
        let x = 0.0;
        let (q1, q2, _) = trace_expansion(2, x, &airy_rule(x)).unwrap();
        let g = sol().eval(x).0;
        assert!((q1 - 2.0 * sol().int_g2(x)).abs() < 1e-6);
        assert!((q2 - 2.0 * -(g * g)).abs() < 1e-6);
    }

    #[test]
    fn airy_matrix_spectrum() {
        let ctx = FredholmContext::new(KernelSpec::Airy, airy_rule(-2.0)).unwrap();
        let eig = ctx.matrix.clone().symmetric_eigenvalues();
        assert!(eig.iter().all(|&e| e > -1e-12 && e < 1.0));
    }
}
