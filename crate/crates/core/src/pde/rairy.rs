//! Q(τ, x) surfaces and residuals of the r-Airy PDE.

use rayon::prelude::*;

use super::dual::Dual;
use super::stencil::Jet2;
use super::ResidualReport;
use crate::fredholm::q_rairy_with;
use crate::{Error, Result};

/// Half-width of the tensor stencil, in grid steps.
pub const STENCIL_HALF_WIDTH: usize = 4;
const MAX_ORDER: usize = 4;

/// `Q` on a uniform `(τ, x)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    pub r: usize,
    pub tau0: f64,
    pub h_tau: f64,
    pub x0: f64,
    pub h_x: f64,
    /// `q[i][j] = Q(tau0 + i h_tau, x0 + j h_x)`.
    pub q: Vec<Vec<f64>>,
    /// Node-doubling change at the middle of each τ row.
    pub accuracy: Vec<f64>,
}

impl Surface {
    pub fn tau(&self, i: usize) -> f64 {
        self.tau0 + i as f64 * self.h_tau
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.h_x
    }

    pub fn max_accuracy(&self) -> f64 {
        self.accuracy.iter().copied().fold(0.0, f64::max)
    }

    fn index_of(&self, tau: f64, x: f64) -> Result<(usize, usize)> {
        let fi = (tau - self.tau0) / self.h_tau;
        let fj = (x - self.x0) / self.h_x;
        let (i, j) = (fi.round(), fj.round());
        if (fi - i).abs() > 1e-8 || (fj - j).abs() > 1e-8 {
            return Err(Error::Stencil(format!("({tau}, {x}) is not a grid node")));
        }
        let k = STENCIL_HALF_WIDTH as f64;
        let (ni, nj) = (self.q.len() as f64, self.q[0].len() as f64);
        if i < k || j < k || i + k >= ni || j + k >= nj {
            return Err(Error::Stencil(format!("({tau}, {x}) is within {k} steps of the edge")));
        }
        Ok((i as usize, j as usize))
    }

    /// Partials `∂_τ^i ∂_x^j Q` at a grid node, up to total order four.
    pub fn jet(&self, tau: f64, x: f64) -> Result<PdeJet> {
        let (i0, j0) = self.index_of(tau, x)?;
        let k = STENCIL_HALF_WIDTH;
        let patch: Vec<Vec<f64>> = (i0 - k..=i0 + k).map(|i| self.q[i][j0 - k..=j0 + k].to_vec()).collect();
        let jet = Jet2::from_patch(&patch, self.h_tau, self.h_x, MAX_ORDER)?;
        let mut d = [[0.0; 5]; 5];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate().take(MAX_ORDER + 1 - i) {
                *v = jet.get(i, j);
            }
        }
        Ok(PdeJet { r: self.r as f64, tau: self.tau(i0), x: self.x(j0), d })
    }
}

/// Tabulate `Q(τ, x)` with `m` quadrature nodes.
///
/// `steps = (n_tau, n_x)` counts grid nodes in each direction.
pub fn q_surface(
    r: usize,
    tau_range: (f64, f64),
    x_range: (f64, f64),
    steps: (usize, usize),
    m: usize,
) -> Result<Surface> {
    let (t0, t1) = tau_range;
    let (x0, x1) = x_range;
    if !(-12.0..=0.0).contains(&t0) || !(-12.0..=0.0).contains(&t1) || t1 <= t0 {
        return Err(Error::UnsupportedDomain(format!("τ range [{t0}, {t1}] outside [−12, 0]")));
    }
    if !(-6.0..=6.0).contains(&x0) || !(-6.0..=6.0).contains(&x1) || x1 <= x0 {
        return Err(Error::UnsupportedDomain(format!("x range [{x0}, {x1}] outside [−6, 6]")));
    }
    let (nt, nx) = steps;
    if nt < 2 || nx < 2 {
        return Err(Error::InvalidArgument("a surface needs two nodes per direction".into()));
    }
    let h_tau = (t1 - t0) / (nt - 1) as f64;
    let h_x = (x1 - x0) / (nx - 1) as f64;
    build(r, t0, h_tau, x0, h_x, (nt, nx), m)
}

/// Square `(2K+1)²` surface centred on `(τ, x)` with steps `h`.
///
/// The centre may sit slightly outside the `q_surface` ranges; only node
/// positions matter here.
pub fn local_surface(r: usize, tau: f64, x: f64, h: f64, m: usize) -> Result<Surface> {
    let k = STENCIL_HALF_WIDTH as f64;
    if tau + k * h > 0.0 && r > 0 {
        return Err(Error::UnsupportedDomain(format!("stencil at τ = {tau} crosses τ = 0")));
    }
    let p = 2 * STENCIL_HALF_WIDTH + 1;
    build(r, tau - k * h, h, x - k * h, h, (p, p), m)
}

fn build(r: usize, tau0: f64, h_tau: f64, x0: f64, h_x: f64, (nt, nx): (usize, usize), m: usize) -> Result<Surface> {
    let nodes: Vec<(usize, usize)> = (0..nt).flat_map(|i| (0..nx).map(move |j| (i, j))).collect();
    let vals: Vec<f64> = nodes
        .par_iter()
        .map(|&(i, j)| q_rairy_with(r, tau0 + i as f64 * h_tau, x0 + j as f64 * h_x, m))
        .collect::<Result<_>>()?;
    let q: Vec<Vec<f64>> = vals.chunks(nx).map(<[f64]>::to_vec).collect();
    let mid = nx / 2;
    let accuracy: Vec<f64> = (0..nt)
        .into_par_iter()
        .map(|i| {
            let fine = q_rairy_with(r, tau0 + i as f64 * h_tau, x0 + mid as f64 * h_x, 2 * m)?;
            Ok((fine - q[i][mid]).abs())
        })
        .collect::<Result<_>>()?;
    for row in &q {
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonPositiveDeterminant(f64::NAN));
        }
    }
    Ok(Surface { r, tau0, h_tau, x0, h_x, q, accuracy })
}

/// Partials of `Q` at one point: `d[i][j] = ∂_τ^i ∂_x^j Q`, `i + j ≤ 4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeJet {
    pub r: f64,
    pub tau: f64,
    pub x: f64,
    pub d: [[f64; 5]; 5],
}

impl PdeJet {
    /// `∂_τ^i ∂_x^j Q` together with its x-derivative.
    fn q(&self, i: usize, j: usize) -> Dual {
        Dual::new(self.d[i][j], self.d[i][j + 1])
    }
}

/// Outer Wronskian `{a, B}_x − ½a²(Q_τττ − 4 Q_τx Q_xxx)` for a bracket given
/// as a list of summands.
fn assemble(jet: &PdeJet, terms: &[Dual]) -> (f64, f64) {
    let a = jet.q(1, 2);
    let bracket = terms.iter().fold(Dual::constant(0.0), |s, &t| s + t);
    let tail1 = 0.5 * a.v * a.v * jet.d[3][0];
    let tail2 = 2.0 * a.v * a.v * jet.d[1][1] * jet.d[0][3];
    let residual = a.d * bracket.v - a.v * bracket.d - tail1 + tail2;
    let norm = terms
        .iter()
        .flat_map(|t| [(a.d * t.v).abs(), (a.v * t.d).abs()])
        .chain([tail1.abs(), tail2.abs()])
        .fold(0.0, f64::max);
    (residual, norm)
}

/// Residual of the one-time form of the PDE and its term scale.
pub fn one_time_form(jet: &PdeJet) -> (f64, f64) {
    let r = jet.r;
    let tau = Dual::constant(jet.tau);
    let x = Dual::new(jet.x, 1.0);
    let q = |i, j| jet.q(i, j);
    let p = q(1, 0).scale(2.0) + tau * q(2, 0);
    let terms = [
        q(0, 3).scale(r * r),
        q(3, 0).scale(r),
        (tau * q(2, 1)).scale(2.0 * r),
        q(1, 1).scale(4.0 * r),
        -(q(1, 1).scale(2.0) + x * q(1, 2)).scale(r),
        (q(1, 2) * q(0, 2) - q(1, 1) * q(0, 3)).scale(2.0 * r),
        (q(2, 1) * q(2, 0)).scale(0.5),
        -(q(1, 1) * q(3, 0)),
        q(1, 1) * q(1, 1) * q(0, 3),
        q(1, 2) * p - q(1, 1) * p_x(jet),
    ];
    assemble(jet, &terms)
}

/// `∂_x(2Q_τ + τQ_ττ)` carried with its own x-derivative.
fn p_x(jet: &PdeJet) -> Dual {
    Dual::new(2.0 * jet.d[1][1] + jet.tau * jet.d[2][1], 2.0 * jet.d[1][2] + jet.tau * jet.d[2][2])
}

/// Residual of the bracket form with `(r − Q_τx)` factored out.
pub fn factored_form(jet: &PdeJet) -> (f64, f64) {
    let r = Dual::constant(jet.r);
    let tau = Dual::constant(jet.tau);
    let x = Dual::new(jet.x, 1.0);
    let q = |i, j| jet.q(i, j);
    let u = r - q(1, 1);
    let terms = [
        u * u * q(0, 3),
        u * (q(1, 1).scale(2.0) + (tau * q(2, 1)).scale(2.0) + q(3, 0)),
        q(1, 2) * ((r * q(0, 2)).scale(2.0) + q(1, 0).scale(2.0) - x * r),
        (q(2, 0) * q(2, 1)).scale(0.5),
        tau * (q(2, 1) * q(1, 1) + q(2, 0) * q(1, 2)),
    ];
    assemble(jet, &terms)
}

/// Residual reports for both forms of the r-Airy PDE.
#[derive(Debug, Clone, PartialEq)]
pub struct RAiryResidual {
    pub one_time: ResidualReport,
    pub factored: ResidualReport,
    /// Largest node-doubling change of `Q` on the surface.
    pub surface_accuracy: f64,
}

/// Evaluate both forms of the PDE at a grid node of `surface`.
pub fn r_airy_pde_residual(surface: &Surface, point: (f64, f64)) -> Result<RAiryResidual> {
    let jet = surface.jet(point.0, point.1)?;
    let steps = (surface.h_tau, surface.h_x);
    let (a, an) = one_time_form(&jet);
    let (b, bn) = factored_form(&jet);
    Ok(RAiryResidual {
        one_time: ResidualReport::new(a, an, steps)?,
        factored: ResidualReport::new(b, bn, steps)?,
        surface_accuracy: surface.max_accuracy(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::{asymptotic_q, expansion_coefficients, shifted_q};
    use crate::asymptotics::q0_derivatives;
    use crate::fredholm::tracy_widom_q0;
    use crate::specfun::PainleveIISolution;

    /// Exact partials of `Σ c_{ab} τ^a x^b`.
    fn poly_jet(coef: &[(i32, i32, f64)], r: f64, tau: f64, x: f64) -> PdeJet {
        let mut d = [[0.0; 5]; 5];
        for (i, row) in d.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                for &(a, b, c) in coef {
                    if a < i as i32 || b < j as i32 {
                        continue;
                    }
                    let fall = |n: i32, k: usize| (0..k as i32).map(|t| (n - t) as f64).product::<f64>();
                    *v += c * fall(a, i) * fall(b, j) * tau.powi(a - i as i32) * x.powi(b - j as i32);
                }
            }
        }
        PdeJet { r, tau, x, d }
    }

    const POLY: [(i32, i32, f64); 7] =
        [(1, 2, 0.7), (2, 1, -0.4), (3, 3, 0.05), (1, 4, 0.2), (4, 1, -0.1), (2, 3, 0.3), (0, 5, 0.02)];

    #[test]
    fn involution_flips_sign() {
        for &(r, tau, x) in &[(1.0, -0.8, 0.3), (2.0, 0.5, -1.1), (3.0, -1.7, 0.9)] {
            let f = poly_jet(&POLY, r, tau, x);
            // f̃(τ, x) = f(−τ, x) has partials (−1)^i f_{ij}(−τ)
            let mut g = poly_jet(&POLY, -r, tau, x);
            for (i, row) in g.d.iter_mut().enumerate() {
                for v in row.iter_mut() {
                    if i % 2 == 1 {
                        *v = -*v;
                    }
                }
            }
            g.tau = -tau;
            for form in [one_time_form, factored_form] {
                let (p, n) = form(&f);
                let (q, _) = form(&g);
                assert!((p + q).abs() <= 1e-12 * n, "{p} {q}");
            }
        }
    }

    #[test]
    fn forms_agree_on_polynomials() {
        let f = poly_jet(&POLY, 2.0, -0.6, 0.4);
        let (a, n) = one_time_form(&f);
        let (b, _) = factored_form(&f);
        assert!((a - b).abs() <= 1e-12 * n, "{a} {b}");
    }

    #[test]
    fn tau_independent_surface_has_zero_residual() {
        let sol = PainleveIISolution::shared();
        let h = 0.1;
        let mut d = [[0.0; 5]; 5];
        let q0 = q0_derivatives(&[0.3], sol).unwrap();
        for j in 0..5 {
            d[0][j] = q0.jets[0].d[j];
        }
        let jet = PdeJet { r: 1.0, tau: -2.0, x: 0.3, d };
        assert_eq!(one_time_form(&jet).0, 0.0);
        // the same through a finite-difference surface
        let k = STENCIL_HALF_WIDTH;
        let q: Vec<Vec<f64>> = (0..2 * k + 1)
            .map(|_| (0..2 * k + 1).map(|j| tracy_widom_q0(0.3 + (j as f64 - k as f64) * h, sol).unwrap()).collect())
            .collect();
        let s = Surface { r: 1, tau0: -2.4, h_tau: h, x0: 0.3 - 0.4, h_x: h, q, accuracy: vec![0.0] };
        let rep = r_airy_pde_residual(&s, (-2.0, 0.3)).unwrap_or_else(|e| panic!("{e}"));
        assert!(rep.one_time.residual.abs() < 1e-12, "{:?}", rep.one_time);
    }

    #[test]
    fn r_zero_columns_are_identical() {
        let s = q_surface(0, (-4.0, -2.0), (-1.0, 1.0), (3, 5), 40).unwrap();
        for row in &s.q[1..] {
            for (a, b) in row.iter().zip(&s.q[0]) {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn deep_column_matches_expansion() {
        let sol = PainleveIISolution::shared();
        let xs = [-1.0, 0.0, 1.0];
        let s = q_surface(1, (-10.0, -9.0), (-1.0, 1.0), (2, 3), 60).unwrap();
        let set = expansion_coefficients(&q0_derivatives(&xs, sol).unwrap(), 1);
        for (j, &x) in xs.iter().enumerate() {
            let five = asymptotic_q(&set, -10.0, x, 5).unwrap();
            assert!((s.q[0][j] - five).abs() < 1e-4, "{} {}", s.q[0][j], five);
        }
        assert!(s.max_accuracy() < 1e-10);
    }

    fn shifted_family_residual(tau: f64) -> f64 {
        let sol = PainleveIISolution::shared();
        let (x, h, k) = (0.0, 0.15, STENCIL_HALF_WIDTH);
        let xs: Vec<f64> = (0..=2 * k).map(|j| x + (j as f64 - k as f64) * h).collect();
        let set = expansion_coefficients(&q0_derivatives(&xs, sol).unwrap(), 1);
        let q: Vec<Vec<f64>> = (0..=2 * k)
            .map(|i| {
                let t = tau + (i as f64 - k as f64) * h;
                xs.iter().map(|&x| shifted_q(&set, t, x, sol).unwrap()).collect()
            })
            .collect();
        let s = Surface { r: 1, tau0: tau - k as f64 * h, h_tau: h, x0: xs[0], h_x: h, q, accuracy: vec![0.0] };
        r_airy_pde_residual(&s, (tau, x)).unwrap().one_time.relative
    }

    #[test]
    fn shifted_tracy_widom_family_is_asymptotically_a_solution() {
        let (a, b) = (shifted_family_residual(-8.0), shifted_family_residual(-16.0));
        assert!(b < a / 2.0, "{a} {b}");
    }

    #[test]
    fn rejects_nodes_near_the_edge() {
        let s = q_surface(0, (-4.0, -2.0), (-1.0, 1.0), (3, 5), 20).unwrap();
        assert!(matches!(r_airy_pde_residual(&s, (-3.0, 0.0)), Err(Error::Stencil(_))));
    }
}
