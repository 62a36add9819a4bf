//! Hastings–McLeod solution of `g'' = αg + 2g³`.
//!
//! Multiple shooting on `[-12, α_max]`: Taylor-series integration over
//! half-unit segments, `g(α_max) = A(α_max)` on the right and the
//! large-negative asymptotic series on the left, solved by Newton with a
//! dense LU. The converged node data are refined to a `1/16` table and
//! evaluated by local Taylor expansion.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use super::airy::airy;
use crate::quad::GaussLegendre;
use crate::{Error, Result};

pub const ALPHA_LEFT: f64 = -12.0;
const SEGMENT: f64 = 0.5;
const STEP: f64 = 1.0 / 16.0;
const ORDER: usize = 30;

/// Coefficients of `√(t/2) (1 + Σ c_k t^{-3k})`, `t = -α`.
const LEFT_SERIES: [f64; 7] = [
    -1.0 / 8.0,
    -73.0 / 128.0,
    -10657.0 / 1024.0,
    -13912277.0 / 32768.0,
    -8045883943.0 / 262144.0,
    -14518451390349.0 / 4194304.0,
    -18847128706420641.0 / 33554432.0,
];

/// `(g, g')` from the large-negative expansion.
pub fn left_asymptotic(alpha: f64) -> (f64, f64) {
    let t = -alpha;
    let mut s = 1.0;
    let mut ds = 0.0;
    for (k, &c) in LEFT_SERIES.iter().enumerate() {
        let p = 3.0 * (k + 1) as f64;
        s += c * t.powf(-p);
        ds -= p * c * t.powf(-p - 1.0);
    }
    let root = (t / 2.0).sqrt();
    let g = root * s;
    let dg_dt = s / (4.0 * root) + root * ds;
    (g, -dg_dt)
}

/// Taylor coefficients of `g` about `a0`.
pub fn taylor_coefficients(a0: f64, g: f64, gp: f64, n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n.max(2)];
    let mut sq = vec![0.0; n.max(2)];
    let mut cube = vec![0.0; n.max(2)];
    c[0] = g;
    c[1] = gp;
    for k in 0..n.saturating_sub(2) {
        sq[k] = (0..=k).map(|i| c[i] * c[k - i]).sum();
        cube[k] = (0..=k).map(|i| sq[i] * c[k - i]).sum();
        let prev = if k > 0 { c[k - 1] } else { 0.0 };
        c[k + 2] = (a0 * c[k] + prev + 2.0 * cube[k]) / ((k + 2) as f64 * (k + 1) as f64);
    }
    c.truncate(n);
    c
}

fn eval_series(c: &[f64], h: f64) -> (f64, f64) {
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

/// One Taylor step with the 2×2 sensitivity matrix of `(g, g')`.
fn step_with_jacobian(a0: f64, g: f64, gp: f64, h: f64) -> ((f64, f64), [[f64; 2]; 2]) {
    let c = taylor_coefficients(a0, g, gp, ORDER);
    let mut sq = vec![0.0; ORDER];
    for (k, s) in sq.iter_mut().enumerate() {
        *s = (0..=k).map(|i| c[i] * c[k - i]).sum();
    }
    // y'' = (α + 6g²) y
    let mut p = sq.iter().map(|&s| 6.0 * s).collect::<Vec<_>>();
    p[0] += a0;
    p[1] += 1.0;
    let mut jac = [[0.0; 2]; 2];
    for (col, init) in [(1.0, 0.0), (0.0, 1.0)].into_iter().enumerate() {
        let mut b = vec![0.0; ORDER];
        b[0] = init.0;
        b[1] = init.1;
        for k in 0..ORDER - 2 {
            let s: f64 = (0..=k).map(|i| p[i] * b[k - i]).sum();
            b[k + 2] = s / ((k + 2) as f64 * (k + 1) as f64);
        }
        let (y, yp) = eval_series(&b, h);
        jac[0][col] = y;
        jac[1][col] = yp;
    }
    (eval_series(&c, h), jac)
}

fn step(a0: f64, g: f64, gp: f64, h: f64) -> (f64, f64) {
    eval_series(&taylor_coefficients(a0, g, gp, ORDER), h)
}

fn propagate(a: f64, b: f64, g: f64, gp: f64) -> ((f64, f64), [[f64; 2]; 2]) {
    let n = ((b - a).abs() / STEP).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let mut y = (g, gp);
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    for i in 0..n {
        let (ny, j) = step_with_jacobian(a + i as f64 * h, y.0, y.1, h);
        let prod = [
            [j[0][0] * m[0][0] + j[0][1] * m[1][0], j[0][0] * m[0][1] + j[0][1] * m[1][1]],
            [j[1][0] * m[0][0] + j[1][1] * m[1][0], j[1][0] * m[0][1] + j[1][1] * m[1][1]],
        ];
        y = ny;
        m = prod;
    }
    (y, m)
}

#[derive(Debug, Clone)]
pub struct PainleveIISolution {
    /// Requested output grid.
    pub alpha: Vec<f64>,
    pub g: Vec<f64>,
    pub gp: Vec<f64>,
    /// Largest matching defect after Newton.
    pub residual: f64,
    alpha_max: f64,
    table: Vec<(f64, f64)>,
}

pub fn hastings_mcleod(alpha_min: f64, alpha_max: f64, n_nodes: usize) -> Result<PainleveIISolution> {
    if alpha_max < 6.0 {
        return Err(Error::InvalidArgument(format!("alpha_max = {alpha_max} < 6")));
    }
    if alpha_min < ALPHA_LEFT || alpha_min >= alpha_max {
        return Err(Error::InvalidArgument(format!("alpha_min = {alpha_min} outside [-12, alpha_max)")));
    }
    if n_nodes < 2 {
        return Err(Error::InvalidArgument("need at least two grid nodes".into()));
    }
    let segs = ((alpha_max - ALPHA_LEFT) / SEGMENT).ceil() as usize;
    let width = (alpha_max - ALPHA_LEFT) / segs as f64;
    let node = |i: usize| ALPHA_LEFT + i as f64 * width;

    // initial guess: Airy data marched left to -5, asymptotic form beyond
    let mut x = vec![0.0; 2 * (segs + 1)];
    let (a, ap) = airy(alpha_max);
    x[2 * segs] = a;
    x[2 * segs + 1] = ap;
    for i in (0..segs).rev() {
        let (y, _) = propagate(node(i + 1), node(i), x[2 * i + 2], x[2 * i + 3]);
        let (ga, gpa) = if node(i) < -5.0 { left_asymptotic(node(i)) } else { y };
        x[2 * i] = ga;
        x[2 * i + 1] = gpa;
    }

    let dim = 2 * (segs + 1);
    let mut residual = f64::INFINITY;
    for _ in 0..30 {
        let mut f = DVector::<f64>::zeros(dim);
        let mut jac = DMatrix::<f64>::zeros(dim, dim);
        f[0] = x[0] - left_asymptotic(ALPHA_LEFT).0;
        jac[(0, 0)] = 1.0;
        for i in 0..segs {
            let ((y, yp), m) = propagate(node(i), node(i + 1), x[2 * i], x[2 * i + 1]);
            let row = 1 + 2 * i;
            f[row] = y - x[2 * i + 2];
            f[row + 1] = yp - x[2 * i + 3];
            for r in 0..2 {
                for c in 0..2 {
                    jac[(row + r, 2 * i + c)] = m[r][c];
                }
                jac[(row + r, 2 * i + 2 + r)] = -1.0;
            }
        }
        f[dim - 1] = x[2 * segs] - a;
        jac[(dim - 1, 2 * segs)] = 1.0;
        residual = f.amax();
        let delta = jac
            .lu()
            .solve(&f)
            .ok_or(Error::NonConvergence { residual })?;
        for (xi, d) in x.iter_mut().zip(delta.iter()) {
            *xi -= d;
        }
        if delta.amax() < 1e-15 && residual < 1e-13 {
            break;
        }
    }
    if !(residual < 1e-11) {
        return Err(Error::NonConvergence { residual });
    }

    // dense table at 1/16 spacing
    let per = (width / STEP).round() as usize;
    let mut table = Vec::with_capacity(segs * per + 1);
    for i in 0..segs {
        let mut y = (x[2 * i], x[2 * i + 1]);
        let h = width / per as f64;
        for k in 0..per {
            table.push(y);
            y = step(node(i) + k as f64 * h, y.0, y.1, h);
        }
    }
    table.push((x[2 * segs], x[2 * segs + 1]));

    let mut sol = PainleveIISolution {
        alpha: Vec::new(),
        g: Vec::new(),
        gp: Vec::new(),
        residual,
        alpha_max,
        table,
    };
    let alpha: Vec<f64> = (0..n_nodes)
        .map(|i| alpha_min + (alpha_max - alpha_min) * i as f64 / (n_nodes - 1) as f64)
        .collect();
    let (g, gp): (Vec<f64>, Vec<f64>) = alpha.iter().map(|&t| sol.eval(t)).unzip();
    sol.alpha = alpha;
    sol.g = g;
    sol.gp = gp;
    Ok(sol)
}

impl PainleveIISolution {
    /// Solution on `[-12, 8]`, computed once per process.
    pub fn shared() -> &'static PainleveIISolution {
        static SOL: OnceLock<PainleveIISolution> = OnceLock::new();
        SOL.get_or_init(|| hastings_mcleod(ALPHA_LEFT, 8.0, 321).expect("Hastings–McLeod solve"))
    }

    pub fn alpha_max(&self) -> f64 {
        self.alpha_max
    }

    fn table_step(&self) -> f64 {
        (self.alpha_max - ALPHA_LEFT) / (self.table.len() - 1) as f64
    }

    fn nearest(&self, alpha: f64) -> (f64, f64, f64) {
        let h = self.table_step();
        let j = (((alpha - ALPHA_LEFT) / h).round().max(0.0) as usize).min(self.table.len() - 1);
        let (g, gp) = self.table[j];
        (ALPHA_LEFT + j as f64 * h, g, gp)
    }

    /// `(g, g')`. Beyond `α_max` the Airy function is returned; left of
    /// `-12` the large-negative series.
    pub fn eval(&self, alpha: f64) -> (f64, f64) {
        if alpha > self.alpha_max {
            return airy(alpha);
        }
        if alpha < ALPHA_LEFT {
            return left_asymptotic(alpha);
        }
        let (a0, g, gp) = self.nearest(alpha);
        step(a0, g, gp, alpha - a0)
    }

    /// Taylor coefficients of `g` about `alpha`.
    pub fn taylor(&self, alpha: f64, n: usize) -> Vec<f64> {
        let (g, gp) = self.eval(alpha);
        taylor_coefficients(alpha, g, gp, n)
    }

    /// `∫_x^∞ f(α, g(α)) dα`, with `g = A` past the right end.
    pub fn integrate_from<F: Fn(f64, f64) -> f64>(&self, x: f64, f: F) -> f64 {
        let rule = GaussLegendre::cached(20);
        let hi = self.alpha_max + 8.0;
        if x >= hi {
            return 0.0;
        }
        crate::quad::uniform_breaks(x, hi, 0.5)
            .windows(2)
            .map(|p| rule.integrate(p[0], p[1], |a| f(a, self.eval(a).0)))
            .sum()
    }

    /// `∫_x^∞ g²`.
    pub fn int_g2(&self, x: f64) -> f64 {
        if x >= self.alpha_max {
            let (a, ap) = airy(x);
            return ap * ap - x * a * a;
        }
        let (a, ap) = airy(self.alpha_max);
        let xm = self.alpha_max;
        self.integrate_range(x, xm, |_, g| g * g) + ap * ap - xm * a * a
    }

    /// `∫_x^∞ (α − x) g²`.
    pub fn int_linear_g2(&self, x: f64) -> f64 {
        let xm = self.alpha_max.max(x);
        let (a, ap) = airy(xm);
        let tail0 = ap * ap - xm * a * a;
        let tail1 = -(xm * xm * a * a - xm * ap * ap + a * ap) / 3.0;
        let body = if x < xm { self.integrate_range(x, xm, |al, g| (al - x) * g * g) } else { 0.0 };
        body + tail1 - x * tail0
    }

    fn integrate_range<F: Fn(f64, f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let rule = GaussLegendre::cached(20);
        crate::quad::uniform_breaks(a, b, 0.5)
            .windows(2)
            .map(|p| rule.integrate(p[0], p[1], |t| f(t, self.eval(t).0)))
            .sum()
    }
}
