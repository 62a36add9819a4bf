//! Gauss–Legendre rules and piecewise Chebyshev interpolation.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

const CACHE_MAX: usize = 128;
static CACHE: [OnceLock<GaussLegendre>; CACHE_MAX + 1] = [const { OnceLock::new() }; CACHE_MAX + 1];

impl GaussLegendre {
    /// Nodes by Newton iteration on the three-term recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Shared rule for `n <= 128`, built once.
    pub fn cached(n: usize) -> &'static GaussLegendre {
        assert!(n <= CACHE_MAX, "cached rules stop at {CACHE_MAX} nodes");
        CACHE[n].get_or_init(|| GaussLegendre::new(n))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule over `[a, b]` split at the given interior breakpoints.
pub fn composite(breaks: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::cached(order);
    let mut xs = Vec::with_capacity(order * breaks.len());
    let mut ws = Vec::with_capacity(order * breaks.len());
    for pair in breaks.windows(2) {
        for (x, w) in rule.mapped(pair[0], pair[1]) {
            xs.push(x);
            ws.push(w);
        }
    }
    (xs, ws)
}

/// Uniform panel breakpoints with widths no larger than `max_width`.
pub fn uniform_breaks(a: f64, b: f64, max_width: f64) -> Vec<f64> {
    let panels = ((b - a) / max_width).ceil().max(1.0) as usize;
    (0..=panels)
        .map(|i| a + (b - a) * i as f64 / panels as f64)
        .collect()
}

/// Integrate `f` over `[a, b]` with uniform panels of at most `max_width`.
pub fn integrate_panels<F: FnMut(f64) -> f64>(a: f64, b: f64, max_width: f64, order: usize, mut f: F) -> f64 {
    let rule = GaussLegendre::cached(order);
    uniform_breaks(a, b, max_width)
        .windows(2)
        .map(|p| rule.integrate(p[0], p[1], &mut f))
        .sum()
}

/// Piecewise Chebyshev–Lobatto interpolant with barycentric evaluation.
#[derive(Debug, Clone)]
pub struct ChebTable {
    lo: f64,
    width: f64,
    degree: usize,
    values: Vec<f64>,
    panels: usize,
}

impl ChebTable {
    pub fn new<F: Fn(f64) -> f64 + Sync>(lo: f64, hi: f64, max_width: f64, degree: usize, f: F) -> Self {
        use rayon::prelude::*;
        let panels = ((hi - lo) / max_width).ceil().max(1.0) as usize;
        let width = (hi - lo) / panels as f64;
        let points: Vec<f64> = (0..panels)
            .flat_map(|p| {
                let a = lo + p as f64 * width;
                (0..=degree).map(move |j| {
                    let t = (PI * j as f64 / degree as f64).cos();
                    a + 0.5 * width * (1.0 - t)
                })
            })
            .collect();
        let values = points.par_iter().map(|&x| f(x)).collect();
        Self { lo, width, degree, values, panels }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let s = (x - self.lo) / self.width;
        let p = (s.floor().max(0.0) as usize).min(self.panels - 1);
        let a = self.lo + p as f64 * self.width;
        let t = 1.0 - 2.0 * (x - a) / self.width;
        let vals = &self.values[p * (self.degree + 1)..(p + 1) * (self.degree + 1)];
        let n = self.degree;
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, &v) in vals.iter().enumerate() {
            let node = (PI * j as f64 / n as f64).cos();
            let diff = t - node;
            if diff == 0.0 {
                return v;
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n {
                w *= 0.5;
            }
            let c = w / diff;
            num += c * v;
            den += c;
        }
        num / den
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.lo + self.width * self.panels as f64)
    }
}
