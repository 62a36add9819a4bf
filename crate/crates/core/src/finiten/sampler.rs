//! Monte Carlo spectra of `A + H`, `H` with density `∝ e^{−Tr H²/2}`.
//!
//! For `k1 ≤ 1` the source is `α e₁e₁ᵀ`, which commutes with the unitaries
//! fixing `e₁`, so Householder reduction gives a tridiagonal model with
//! diagonal `N(0,1)` (plus `α` in the first entry) and off-diagonal
//! `χ_{2(n−i)}/√2`. Larger `k1` use the dense matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;

use super::SourceEnsemble;
use crate::{Error, Result};

/// Largest supported matrix size.
pub const MAX_SAMPLE_N: usize = 4000;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSample {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub ensemble: SourceEnsemble,
    pub seed: u64,
}

impl SpectrumSample {
    pub fn lambda_max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }
}

/// Stream `index` of the generator family keyed by `seed`.
fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Symmetric tridiagonal matrix as diagonal and off-diagonal.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    fn draw<R: Rng>(ens: &SourceEnsemble, rng: &mut R) -> Self {
        let n = ens.n;
        let mut diag: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        if ens.k1 == 1 {
            diag[0] += ens.alpha;
        }
        let off = (1..n)
            .map(|i| {
                let chi2 = ChiSquared::new(2.0 * (n - i) as f64).unwrap().sample(rng);
                (chi2 / 2.0).sqrt()
            })
            .collect();
        Self { diag, off }
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..self.diag.len() {
            let e2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            d = self.diag[i] - x - if i == 0 { 0.0 } else { e2 / d };
            if d == 0.0 {
                d = -1e-300;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin bracket.
    fn bounds(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        (0..self.diag.len()).map(|k| self.eigenvalue(k)).collect()
    }
}

fn dense_eigenvalues<R: Rng>(ens: &SourceEnsemble, rng: &mut R) -> Vec<f64> {
    let n = ens.n;
    let mut h = DMatrix::<Complex64>::zeros(n, n);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        h[(i, i)] = Complex64::new(d + if i < ens.k1 { ens.alpha } else { 0.0 }, 0.0);
        for j in (i + 1)..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = Complex64::new(s * re, s * im);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn check(ens: &SourceEnsemble) -> Result<()> {
    if ens.n == 0 || ens.n > MAX_SAMPLE_N {
        return Err(Error::InvalidArgument(format!("n = {} outside 1..={MAX_SAMPLE_N}", ens.n)));
    }
    Ok(())
}

/// Full spectrum of one draw, sample `index` of the stream family `seed`.
pub fn sample_spectrum_indexed(ens: &SourceEnsemble, seed: u64, index: u64) -> Result<SpectrumSample> {
    check(ens)?;
    let mut rng = stream(seed, index);
    let eigenvalues = if ens.k1 <= 1 {
        Tridiagonal::draw(ens, &mut rng).eigenvalues()
    } else {
        dense_eigenvalues(ens, &mut rng)
    };
    Ok(SpectrumSample { eigenvalues, ensemble: *ens, seed })
}

pub fn sample_spectrum(ens: &SourceEnsemble, seed: u64) -> Result<SpectrumSample> {
    sample_spectrum_indexed(ens, seed, 0)
}

/// Tridiagonal draw, exposed for histogram checks by Sturm counts.
pub fn sample_tridiagonal(ens: &SourceEnsemble, seed: u64, index: u64) -> Result<Tridiagonal> {
    check(ens)?;
    if ens.k1 > 1 {
        return Err(Error::InvalidArgument("tridiagonal model needs k1 <= 1".into()));
    }
    Ok(Tridiagonal::draw(ens, &mut stream(seed, index)))
}

/// Largest eigenvalue of draw `index`.
pub fn sample_lambda_max(ens: &SourceEnsemble, seed: u64, index: u64) -> Result<f64> {
    check(ens)?;
    let mut rng = stream(seed, index);
    Ok(if ens.k1 <= 1 {
        Tridiagonal::draw(ens, &mut rng).eigenvalue(ens.n - 1)
    } else {
        *dense_eigenvalues(ens, &mut rng).last().unwrap()
    })
}

/// `(λmax − 2√n) n^{1/6}`.
pub fn edge_rescale(sample: &SpectrumSample) -> Result<f64> {
    rescale(sample.lambda_max(), sample.ensemble.n)
}

fn rescale(lmax: f64, n: usize) -> Result<f64> {
    if n < 16 {
        return Err(Error::InvalidArgument(format!("n = {n} < 16")));
    }
    let nf = n as f64;
    Ok((lmax - 2.0 * nf.sqrt()) * nf.powf(1.0 / 6.0))
}

/// Rescaled largest eigenvalues of `count` independent draws, in draw order.
pub fn sample_edges(ens: &SourceEnsemble, seed: u64, count: usize) -> Result<Vec<f64>> {
    check(ens)?;
    (0..count as u64)
        .into_par_iter()
        .map(|i| rescale(sample_lambda_max(ens, seed, i)?, ens.n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finiten::pn_probability;

    #[test]
    fn deterministic() {
        let ens = SourceEnsemble::new(20, 1, 3.0).unwrap();
        assert_eq!(sample_spectrum(&ens, 7).unwrap(), sample_spectrum(&ens, 7).unwrap());
        let ens = SourceEnsemble::new(8, 2, 1.0).unwrap();
        assert_eq!(sample_spectrum(&ens, 7).unwrap(), sample_spectrum(&ens, 7).unwrap());
    }

    #[test]
    fn sorted_and_sized() {
        let ens = SourceEnsemble::new(30, 1, 2.0).unwrap();
        let s = sample_spectrum(&ens, 3).unwrap();
        assert_eq!(s.eigenvalues.len(), 30);
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rescale_at_edge() {
        let n = 64;
        let s = SpectrumSample {
            eigenvalues: vec![0.0, 2.0 * (n as f64).sqrt()],
            ensemble: SourceEnsemble::new(n, 0, 0.0).unwrap(),
            seed: 0,
        };
        assert_eq!(edge_rescale(&s).unwrap(), 0.0);
    }

    #[test]
    fn tridiagonal_and_dense_agree_in_trace() {
        // E[Tr M] = k1 α and E[Tr M²] = n² + k1 α² for both models
        let n = 6;
        let ens = SourceEnsemble::new(n, 1, 1.5).unwrap();
        let draws = 4000;
        let mut tri = (0.0, 0.0);
        let mut den = (0.0, 0.0);
        for i in 0..draws {
            let a = sample_spectrum_indexed(&ens, 11, i).unwrap().eigenvalues;
            tri.0 += a.iter().sum::<f64>();
            tri.1 += a.iter().map(|v| v * v).sum::<f64>();
            let b = dense_eigenvalues(&ens, &mut stream(12, i));
            den.0 += b.iter().sum::<f64>();
            den.1 += b.iter().map(|v| v * v).sum::<f64>();
        }
        let d = draws as f64;
        for (m1, m2) in [tri, den] {
            assert!((m1 / d - 1.5).abs() < 0.15, "{}", m1 / d);
            assert!((m2 / d - (36.0 + 2.25)).abs() < 1.0, "{}", m2 / d);
        }
    }

    #[test]
    fn semicircle_bulk() {
        let n = 500;
        let ens = SourceEnsemble::new(n, 0, 0.0).unwrap();
        let edge = 2.0 * (n as f64).sqrt();
        let bins = 40;
        let edges: Vec<f64> = (0..=bins).map(|k| -edge + 2.0 * edge * k as f64 / bins as f64).collect();
        let mut hist = vec![0.0; bins];
        let samples = 200;
        for i in 0..samples {
            let t = sample_tridiagonal(&ens, 5, i).unwrap();
            let counts: Vec<usize> = edges.iter().map(|&x| t.count_below(x)).collect();
            for k in 0..bins {
                hist[k] += (counts[k + 1] - counts[k]) as f64;
            }
        }
        let width = edges[1] - edges[0];
        let peak = 1.0 / (std::f64::consts::PI * (n as f64).sqrt());
        for k in 0..bins {
            let density = hist[k] / (samples as f64 * n as f64 * width);
            // semicircle averaged over the bin
            let avg = crate::quad::integrate_panels(edges[k], edges[k + 1], width, 20, |x| {
                (4.0 * n as f64 - x * x).max(0.0).sqrt() / (2.0 * std::f64::consts::PI * n as f64)
            }) / width;
            assert!((density - avg).abs() < 0.05 * peak, "bin {k}: {density} {avg}");
        }
    }

    fn mc_cdf(ens: &SourceEnsemble, b: f64, draws: u64, seed: u64) -> (f64, f64) {
        let hits = (0..draws)
            .into_par_iter()
            .filter(|&i| sample_lambda_max(ens, seed, i).unwrap() <= b)
            .count() as f64;
        let p = hits / draws as f64;
        (p, (p * (1.0 - p) / draws as f64).sqrt())
    }

    #[test]
    fn mc_matches_exact_two_by_two() {
        let ens = SourceEnsemble::new(2, 1, 0.0).unwrap();
        let exact = pn_probability(&ens, 1.0).unwrap();
        let (p, se) = mc_cdf(&ens, 1.0, 1_000_000, 21);
        assert!((p - exact).abs() < 3.0 * se, "{p} {exact} {se}");
    }

    #[test]
    fn mc_matches_exact_four() {
        let ens = SourceEnsemble::new(4, 1, 2.0).unwrap();
        let exact = pn_probability(&ens, 5.0).unwrap();
        let (p, se) = mc_cdf(&ens, 5.0, 1_000_000, 41);
        assert!((p - exact).abs() < 3.0 * se, "{p} {exact} {se}");
    }

    #[test]
    fn mc_matches_exact_grid() {
        for (n, k1, alpha) in [(3, 1, 1.0), (4, 2, 1.5), (4, 0, 0.0)] {
            let ens = SourceEnsemble::new(n, k1, alpha).unwrap();
            for b in [1.0, 2.0, 3.0, 4.0, 5.0] {
                let exact = pn_probability(&ens, b).unwrap();
                let (p, se) = mc_cdf(&ens, b, 40_000, 31 + n as u64);
                assert!((p - exact).abs() < 4.0 * se.max(1e-4), "n={n} b={b}: {p} {exact}");
            }
        }
    }
}
