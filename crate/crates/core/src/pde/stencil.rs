//! Finite-difference weights (Fornberg's recursion) and 2-D tensor jets.

use crate::{Error, Result};

/// Weights `c[i][k]` such that `f^{(k)}(z) ≈ Σ_i c[i][k] f(x_i)`, for `k ≤ m`.
pub fn fornberg(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len() - 1;
    let mut c = vec![vec![0.0; m + 1]; n + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..=n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c
}

/// Partial derivatives at the centre of a `(2K+1) × (2K+1)` patch.
#[derive(Debug, Clone)]
pub struct Jet2 {
    /// `d[i][j] = ∂_1^i ∂_2^j f`.
    pub d: Vec<Vec<f64>>,
}

impl Jet2 {
    /// `patch[a][b]` is `f(c1 + (a−K)h1, c2 + (b−K)h2)`.
    pub fn from_patch(patch: &[Vec<f64>], h1: f64, h2: f64, max_order: usize) -> Result<Self> {
        let p = patch.len();
        if p < 3 || p.is_multiple_of(2) || patch.iter().any(|row| row.len() != p) {
            return Err(Error::Stencil("patch must be square with odd side".into()));
        }
        if max_order + 1 > p {
            return Err(Error::Stencil(format!("order {max_order} needs more than {p} points")));
        }
        let k = (p / 2) as f64;
        let off: Vec<f64> = (0..p).map(|i| i as f64 - k).collect();
        let w1 = fornberg(0.0, &off.iter().map(|o| o * h1).collect::<Vec<_>>(), max_order);
        let w2 = fornberg(0.0, &off.iter().map(|o| o * h2).collect::<Vec<_>>(), max_order);
        let mut d = vec![vec![0.0; max_order + 1]; max_order + 1];
        for i in 0..=max_order {
            for j in 0..=(max_order - i) {
                let mut s = 0.0;
                for a in 0..p {
                    let mut row = 0.0;
                    for b in 0..p {
                        row += patch[a][b] * w2[b][j];
                    }
                    s += w1[a][i] * row;
                }
                d[i][j] = s;
            }
        }
        Ok(Self { d })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i][j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_five_point() {
        let w = fornberg(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 2);
        let d1: Vec<f64> = w.iter().map(|r| r[1]).collect();
        let want = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        for (a, b) in d1.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        let d2: Vec<f64> = w.iter().map(|r| r[2]).collect();
        let want = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        for (a, b) in d2.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn polynomial_jets_are_exact() {
        // f = s³t² + 2st: ∂s∂t f = 6s²t + 2, ∂s³ f = 6t², ∂s²∂t² f = 12s
        let (s0, t0, h) = (0.3, -0.7, 0.1);
        let patch: Vec<Vec<f64>> = (0..9)
            .map(|a| {
                (0..9)
                    .map(|b| {
                        let s = s0 + (a as f64 - 4.0) * h;
                        let t = t0 + (b as f64 - 4.0) * h;
                        s.powi(3) * t * t + 2.0 * s * t
                    })
                    .collect()
            })
            .collect();
        let j = Jet2::from_patch(&patch, h, h, 5).unwrap();
        assert!((j.get(1, 1) - (6.0 * s0 * s0 * t0 + 2.0)).abs() < 1e-10);
        assert!((j.get(3, 0) - 6.0 * t0 * t0).abs() < 1e-9);
        assert!((j.get(2, 2) - 12.0 * s0).abs() < 1e-8);
        assert!(j.get(0, 4).abs() < 1e-7);
    }
}
