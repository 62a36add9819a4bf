//! Finite-difference checks of the bilinear (3-KP) and Virasoro identities.

use super::moments::tau_blocks;
use super::{Domain, MomentDeformation, SourceEnsemble};
use crate::{Error, Result};

/// One identity `lhs = rhs`, with centered differences at `h` and `h/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualPair {
    pub name: &'static str,
    /// Richardson-extrapolated sides.
    pub lhs: f64,
    pub rhs: f64,
    /// Relative residual of the extrapolated sides.
    pub relative: f64,
    /// Relative residuals from the raw differences at `h` and `h/2`.
    pub coarse: f64,
    pub fine: f64,
}

impl ResidualPair {
    /// Observed order `log₂(coarse/fine)` of the raw differences.
    pub fn observed_order(&self) -> f64 {
        (self.coarse / self.fine).log2()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub step: f64,
    pub residuals: Vec<ResidualPair>,
}

impl IdentityCheck {
    pub fn max_relative(&self) -> f64 {
        self.residuals.iter().map(|r| r.relative).fold(0.0, f64::max)
    }
}

fn relative(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}

/// Evaluate `lhs(h)` and `rhs(h)` at `h`, `h/2` and extrapolate.
fn pair<L, R>(name: &'static str, h: f64, lhs: L, rhs: R) -> Result<ResidualPair>
where
    L: Fn(f64) -> Result<f64>,
    R: Fn(f64) -> Result<f64>,
{
    let (l1, r1) = (lhs(h)?, rhs(h)?);
    let (l2, r2) = (lhs(h / 2.0)?, rhs(h / 2.0)?);
    let l = (4.0 * l2 - l1) / 3.0;
    let r = (4.0 * r2 - r1) / 3.0;
    Ok(ResidualPair {
        name,
        lhs: l,
        rhs: r,
        relative: relative(l, r),
        coarse: relative(l1, r1),
        fine: relative(l2, r2),
    })
}

#[derive(Debug, Clone, Copy)]
enum Var {
    T1,
    T2,
    S1,
    S2,
    U1,
    Alpha,
    B,
}

#[derive(Clone, Copy)]
struct LogTau {
    k1: usize,
    k2: usize,
    alpha: f64,
    domain: Domain,
}

impl LogTau {
    fn eval(&self, k1: usize, k2: usize, shifts: &[(Var, f64)]) -> Result<f64> {
        let mut def = MomentDeformation::default();
        let mut alpha = self.alpha;
        let mut domain = self.domain;
        for &(v, d) in shifts {
            match v {
                Var::T1 => def.t1 += d,
                Var::T2 => def.t2 += d,
                Var::S1 => def.s1 += d,
                Var::S2 => def.s2 += d,
                Var::U1 => def.u1 += d,
                Var::Alpha => alpha += d,
                Var::B => match domain {
                    Domain::HalfLine(b) => domain = Domain::HalfLine(b + d),
                    Domain::WholeLine => {
                        return Err(Error::InvalidArgument("b-derivative needs a half-line".into()))
                    }
                },
            }
        }
        let t = tau_blocks(k1, k2, alpha, domain, &def)?;
        if t == 0.0 {
            return Err(Error::NonPositiveDeterminant(t));
        }
        Ok(t.abs().ln())
    }

    fn f(&self, shifts: &[(Var, f64)]) -> Result<f64> {
        self.eval(self.k1, self.k2, shifts)
    }

    fn d1(&self, v: Var, h: f64) -> Result<f64> {
        Ok((self.f(&[(v, h)])? - self.f(&[(v, -h)])?) / (2.0 * h))
    }

    fn d2(&self, v: Var, w: Var, h: f64) -> Result<f64> {
        if std::mem::discriminant(&v) == std::mem::discriminant(&w) {
            return Ok((self.f(&[(v, h)])? - 2.0 * self.f(&[])? + self.f(&[(v, -h)])?) / (h * h));
        }
        let pp = self.f(&[(v, h), (w, h)])?;
        let pm = self.f(&[(v, h), (w, -h)])?;
        let mp = self.f(&[(v, -h), (w, h)])?;
        let mm = self.f(&[(v, -h), (w, -h)])?;
        Ok((pp - pm - mp + mm) / (4.0 * h * h))
    }

    /// `d/dv log(τ_{k1+1,k2}/τ_{k1−1,k2})`.
    fn d1_ratio(&self, v: Var, h: f64) -> Result<f64> {
        let g = |d: f64| -> Result<f64> {
            Ok(self.eval(self.k1 + 1, self.k2, &[(v, d)])? - self.eval(self.k1 - 1, self.k2, &[(v, d)])?)
        };
        Ok((g(h)? - g(-h)?) / (2.0 * h))
    }
}

fn check_preconditions(ens: &SourceEnsemble, step: f64) -> Result<()> {
    if ens.k1 < 1 || ens.k1 + 1 > ens.n {
        return Err(Error::InvalidArgument(format!(
            "k1 = {} must satisfy 1 <= k1 <= n - 1 (n = {})",
            ens.k1, ens.n
        )));
    }
    if !(1e-3..=5e-2).contains(&step) {
        return Err(Error::InvalidArgument(format!("step {step} outside [1e-3, 5e-2]")));
    }
    Ok(())
}

/// Bilinear identities for `j = 0` and the two ratio identities for `j = 1`.
pub fn kp_identity_check(ens: &SourceEnsemble, domain: Domain, step: f64) -> Result<IdentityCheck> {
    check_preconditions(ens, step)?;
    let lt = LogTau { k1: ens.k1, k2: ens.k2(), alpha: ens.alpha, domain };
    let (k1, k2) = (ens.k1, ens.k2());
    let base = lt.f(&[])?;
    let shifted = |a: usize, b: usize, c: usize, d: usize| -> Result<f64> {
        Ok(-(lt.eval(a, b, &[])? + lt.eval(c, d, &[])? - 2.0 * base).exp())
    };
    let sign = |a: usize, b: usize, c: usize, d: usize| -> Result<f64> {
        let s = tau_blocks(a, b, ens.alpha, domain, &MomentDeformation::default())?
            * tau_blocks(c, d, ens.alpha, domain, &MomentDeformation::default())?;
        Ok(s.signum())
    };
    let s_k1 = sign(k1 + 1, k2, k1 - 1, k2)?;
    let s_k2 = sign(k1, k2 + 1, k1, k2 - 1)?;
    let rhs_k1 = s_k1 * shifted(k1 + 1, k2, k1 - 1, k2)?;
    let rhs_k2 = s_k2 * shifted(k1, k2 + 1, k1, k2 - 1)?;
    let residuals = vec![
        pair("t1s1", step, |h| lt.d2(Var::T1, Var::S1, h), |_| Ok(rhs_k1))?,
        pair("t1u1", step, |h| lt.d2(Var::T1, Var::U1, h), |_| Ok(rhs_k2))?,
        pair(
            "ratio_t1",
            step,
            |h| lt.d1_ratio(Var::T1, h),
            |h| Ok(lt.d2(Var::T2, Var::S1, h)? / lt.d2(Var::T1, Var::S1, h)?),
        )?,
        pair(
            "ratio_s1",
            step,
            |h| Ok(-lt.d1_ratio(Var::S1, h)?),
            |h| Ok(lt.d2(Var::T1, Var::S2, h)? / lt.d2(Var::T1, Var::S1, h)?),
        )?,
    ];
    Ok(IdentityCheck { step, residuals })
}

/// Virasoro constraints on `t = s = u = β = 0`, with `B_{−1} = ∂/∂b`.
pub fn virasoro_check(ens: &SourceEnsemble, b: f64, step: f64) -> Result<IdentityCheck> {
    if !(1e-3..=5e-2).contains(&step) {
        return Err(Error::InvalidArgument(format!("step {step} outside [1e-3, 5e-2]")));
    }
    if ens.n == 0 {
        return Err(Error::InvalidArgument("empty ensemble".into()));
    }
    let lt = LogTau { k1: ens.k1, k2: ens.k2(), alpha: ens.alpha, domain: Domain::HalfLine(b) };
    let (k1, k2) = (ens.k1 as f64, ens.k2() as f64);
    let a = ens.alpha;
    let residuals = vec![
        pair("s1_alpha", step, |h| lt.d1(Var::S1, h), |h| Ok(-lt.d1(Var::Alpha, h)?))?,
        pair("t1_b", step, |h| lt.d1(Var::T1, h), |h| Ok(-lt.d1(Var::B, h)? + a * k1))?,
        pair(
            "t1u1",
            step,
            |h| lt.d2(Var::T1, Var::U1, h),
            |h| Ok(-(lt.d2(Var::B, Var::B, h)? + lt.d2(Var::B, Var::Alpha, h)?) - k2),
        )?,
        pair("t1s1", step, |h| lt.d2(Var::T1, Var::S1, h), |h| Ok(lt.d2(Var::B, Var::Alpha, h)? - k1))?,
    ];
    Ok(IdentityCheck { step, residuals })
}
