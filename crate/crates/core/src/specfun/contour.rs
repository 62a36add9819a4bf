//! Direct quadrature of the contour integral defining `A_r^±`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::outlier::{OutlierAirySpec, Sign};
use crate::quad::GaussLegendre;
use crate::{Error, Result};

/// Piecewise-linear contour: a ray coming in at angle `5π/6`, straight
/// segments through `vertices`, and a ray leaving at angle `π/6`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourPath {
    pub vertices: Vec<Complex64>,
    pub order: usize,
    /// Length of each truncated ray.
    pub truncation: f64,
}

const MIN_POLE_DISTANCE: f64 = 0.1;

impl ContourPath {
    /// Default path for a given `τ`, with rays long enough for argument `u`.
    pub fn standard(tau: f64, u: f64) -> Self {
        let h = if tau.abs() >= 0.2 { (0.5f64).min(tau.abs() / 2.0) } else { -0.25 };
        Self {
            vertices: vec![Complex64::new(-1.0, h), Complex64::new(1.0, h)],
            order: 16,
            truncation: ray_length(u),
        }
    }

    fn incoming() -> Complex64 {
        Complex64::from_polar(1.0, 5.0 * PI / 6.0)
    }

    fn outgoing() -> Complex64 {
        Complex64::from_polar(1.0, PI / 6.0)
    }

    /// Smallest distance from `p` to the path.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        let first = self.vertices[0];
        let last = *self.vertices.last().unwrap();
        let mut d = ray_distance(first, Self::incoming(), p).min(ray_distance(last, Self::outgoing(), p));
        for w in self.vertices.windows(2) {
            d = d.min(segment_distance(w[0], w[1], p));
        }
        d
    }

    /// Height at which the path crosses the imaginary axis.
    fn crossing_height(&self) -> Option<f64> {
        let pieces = std::iter::once((self.vertices[0] + Self::incoming() * self.truncation, self.vertices[0]))
            .chain(self.vertices.windows(2).map(|w| (w[0], w[1])))
            .chain(std::iter::once((
                *self.vertices.last().unwrap(),
                *self.vertices.last().unwrap() + Self::outgoing() * self.truncation,
            )));
        for (a, b) in pieces {
            if (a.re <= 0.0 && b.re >= 0.0) && a.re != b.re {
                let t = -a.re / (b.re - a.re);
                return Some(a.im + t * (b.im - a.im));
            }
        }
        None
    }
}

fn ray_length(u: f64) -> f64 {
    // e^{-s³/3 + (|u|+2)s} below e^{-50}
    let mut s = 2.0;
    while s * s * s / 3.0 - (u.abs() + 2.0) * s < 50.0 {
        s += 0.25;
    }
    s
}

fn segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let d = b - a;
    let t = ((p - a) * d.conj()).re / d.norm_sqr();
    let t = t.clamp(0.0, 1.0);
    (a + d * t - p).norm()
}

fn ray_distance(a: Complex64, dir: Complex64, p: Complex64) -> f64 {
    let t = ((p - a) * dir.conj()).re.max(0.0);
    (a + dir * t - p).norm()
}

fn integrand(a: Complex64, u: f64, r: i32, tau: f64, sign: Sign) -> Complex64 {
    let i = Complex64::i();
    let base = (i * a * a * a / 3.0 + i * a * u).exp();
    let fac = match sign {
        Sign::Plus => (-i * a - tau).powi(r),
        Sign::Minus => (i * a - tau).powi(-r),
    };
    base * fac / (2.0 * PI)
}

/// Evaluate `(1/2π) ∫_C e^{ia³/3 + iau} (∓ia − τ)^{±r} da` along `path`.
pub fn contour_quadrature(u: f64, spec: OutlierAirySpec, path: &ContourPath) -> Result<Complex64> {
    spec.validate()?;
    if path.vertices.is_empty() {
        return Err(Error::InvalidArgument("contour needs at least one vertex".into()));
    }
    let pole = Complex64::new(0.0, -spec.tau);
    let has_pole = spec.sign == Sign::Minus && spec.r > 0;
    if has_pole {
        let d = path.distance_to(pole);
        if d < MIN_POLE_DISTANCE {
            return Err(Error::PathTooClose { distance: d });
        }
        if let Some(h) = path.crossing_height() {
            if h >= pole.im {
                return Err(Error::InvalidArgument("pole must lie above the contour".into()));
            }
        }
    }
    let r = spec.r as i32;
    let rule = GaussLegendre::cached(path.order);
    let f = |a: Complex64| integrand(a, u, r, spec.tau, spec.sign);
    let width_at = |a: Complex64| {
        if has_pole {
            (0.5f64).min((a - pole).norm())
        } else {
            0.5
        }
    };
    let piece = |start: Complex64, end: Complex64| -> Complex64 {
        let dir = end - start;
        let len = dir.norm();
        let mut total = Complex64::new(0.0, 0.0);
        let mut s = 0.0;
        while s < len {
            let here = start + dir * (s / len);
            let w = width_at(here).max(0.02);
            let e = (s + w).min(len);
            for (t, wt) in rule.mapped(s, e) {
                total += f(start + dir * (t / len)) * (dir / len) * wt;
            }
            s = e;
        }
        total
    };
    let first = path.vertices[0];
    let last = *path.vertices.last().unwrap();
    let mut total = piece(first + ContourPath::incoming() * path.truncation, first);
    for w in path.vertices.windows(2) {
        total += piece(w[0], w[1]);
    }
    total += piece(last, last + ContourPath::outgoing() * path.truncation);
    Ok(total)
}
