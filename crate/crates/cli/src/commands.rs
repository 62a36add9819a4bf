//! One function per subcommand, each producing a table and a verdict.

use rairy::asymptotics::{asymptotic_compare, edge_moments_direct, edge_moments_expansion};
use rairy::finiten::{
    cusp_geometry, edge_curve, kp_identity_check, sample_edges, tangency_point, virasoro_check, Domain,
    IdentityCheck, SourceEnsemble,
};
use rairy::fredholm::{build_rule, fredholm_logdet, q_rairy, q_rairy_with, tracy_widom_q0};
use rairy::kernels::KernelSpec;
use rairy::pde::{finite_n_pde_residual, local_surface, q_surface, r_airy_pde_residual, ResidualReport};
use rairy::quad::ChebTable;
use rairy::specfun::PainleveIISolution;
use rairy::stats::ks_test;
use rairy::verify::{run_criterion, Profile, CRITERIA};
use rairy::Error;

use crate::csv::{num, CsvTable};
use crate::{Cli, Cmd, Law, Which};

pub struct Outcome {
    pub name: &'static str,
    pub table: CsvTable,
    pub passed: bool,
}

/// Precondition failures are usage errors; everything else is a failed run.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UnsupportedDomain(_)
        | Error::InvalidArgument(_)
        | Error::Stencil(_)
        | Error::DivergentWeight(_)
        | Error::UnsupportedOrder(_)
        | Error::PathTooClose { .. } => 2,
        _ => 1,
    }
}

fn grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>, Error> {
    if !(step > 0.0) || hi < lo {
        return Err(Error::InvalidArgument(format!("bad range [{lo}, {hi}] step {step}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| lo + k as f64 * step).collect())
}

fn start(name: &'static str, header: &[&str], cli: &Cli) -> CsvTable {
    let mut t = CsvTable::new(header);
    t.meta(format!("rairy {}", env!("CARGO_PKG_VERSION")));
    t.meta(format!("command: {name}"));
    t.meta(format!("config: {:?}", cli.cmd));
    t
}

pub fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.cmd {
        Cmd::Tw(a) => {
            let sol = PainleveIISolution::shared();
            let mut t = start("tw", &["x", "q0_painleve", "f", "q0_fredholm", "route_diff"], cli);
            for x in grid(a.x_min, a.x_max, a.step)? {
                let p = tracy_widom_q0(x, sol)?;
                let f = fredholm_logdet(&KernelSpec::Airy, x, &build_rule(x, 1e-12)?)?;
                t.push(&[x, p, p.exp(), f, p - f]);
            }
            Ok(Outcome { name: "tw", table: t, passed: true })
        }
        Cmd::Rairy(a) => {
            let mut t = start("rairy", &["x", "tau", "r", "q", "f"], cli);
            for x in grid(a.range.x_min, a.range.x_max, a.range.step)? {
                let q = q_rairy_with(a.r, a.tau, x, a.nodes)?;
                t.push(&[x, a.tau, a.r as f64, q, q.exp()]);
            }
            Ok(Outcome { name: "rairy", table: t, passed: true })
        }
        Cmd::Surface(a) => {
            let s = q_surface(a.r, (a.tau_min, a.tau_max), (a.x_min, a.x_max), (a.n_tau, a.n_x), a.nodes)?;
            let mut t = start("surface", &["tau", "x", "q"], cli);
            t.meta(format!("max node-doubling change: {}", num(s.max_accuracy())));
            for (i, row) in s.q.iter().enumerate() {
                for (j, &q) in row.iter().enumerate() {
                    t.push(&[s.tau(i), s.x(j), q]);
                }
            }
            Ok(Outcome { name: "surface", table: t, passed: true })
        }
        Cmd::PdeCheck(a) => pde_check(a, cli),
        Cmd::KpCheck(a) => {
            let ens = SourceEnsemble::new(a.n, a.k1, a.alpha)?;
            let domain = a.b.map_or(Domain::WholeLine, Domain::HalfLine);
            let c = kp_identity_check(&ens, domain, a.step)?;
            Ok(identity_table("kp-check", c, a.tol, cli))
        }
        Cmd::VirasoroCheck(a) => {
            let ens = SourceEnsemble::new(a.n, a.k1, a.alpha)?;
            let c = virasoro_check(&ens, a.b, a.step)?;
            Ok(identity_table("virasoro-check", c, a.tol, cli))
        }
        Cmd::Mc(a) => {
            let ens = SourceEnsemble::peche(a.n, a.r, a.rho, a.tau)?;
            let xs = sample_edges(&ens, a.seed, a.samples)?;
            let table = match a.law {
                Law::Tw => {
                    let sol = PainleveIISolution::shared();
                    cdf_table(|x| tracy_widom_q0(x, sol).unwrap_or(f64::NEG_INFINITY))
                }
                Law::Rairy => cdf_table(|x| q_rairy(a.r, a.tau, x).unwrap_or(f64::NEG_INFINITY)),
            };
            let ks = ks_test(&xs, |x| eval_cdf(&table, x));
            let mut t = start("mc", &["index", "edge"], cli);
            t.meta(format!("seed: {}", a.seed));
            t.meta(format!("alpha: {}", num(ens.alpha)));
            t.meta(format!("ks statistic: {}", num(ks.statistic)));
            t.meta(format!("ks p-value: {}", num(ks.p_value)));
            for (i, &x) in xs.iter().enumerate() {
                t.push(&[i as f64, x]);
            }
            Ok(Outcome { name: "mc", table: t, passed: true })
        }
        Cmd::AsymCheck(a) => {
            let c = asymptotic_compare(a.r, a.x, &a.taus, a.order)?;
            let mut header = vec!["tau".to_string(), "exact".to_string()];
            header.extend((0..=a.order).map(|k| format!("remainder_{k}")));
            let mut t = start("asym-check", &header.iter().map(String::as_str).collect::<Vec<_>>(), cli);
            let mut passed = true;
            for (k, p) in c.exponents.iter().enumerate() {
                t.meta(format!("order {k} decay exponent: {}", num(*p)));
                if k % 2 == 1 {
                    passed &= (p - (k as f64 + 1.0)).abs() <= 0.7;
                }
            }
            for row in &c.rows {
                let mut v = vec![row.tau, row.exact];
                v.extend(&row.remainders);
                t.push(&v);
            }
            Ok(Outcome { name: "asym-check", table: t, passed })
        }
        Cmd::Moments(a) => {
            let base = edge_moments_direct(0, 0.0)?;
            let mut t = start(
                "moments",
                &["tau", "mean_direct", "mean_expansion", "var_direct", "var_expansion"],
                cli,
            );
            for &tau in &a.taus {
                let d = edge_moments_direct(a.r, tau)?;
                let e = edge_moments_expansion(a.r, tau, base)?;
                t.push(&[tau, d.mu1, e.mu1, d.var, e.var]);
            }
            Ok(Outcome { name: "moments", table: t, passed: true })
        }
        Cmd::Geometry(a) => {
            let (y0, t0) = tangency_point(a.rho0, a.n)?;
            let c = cusp_geometry(a.a, a.p)?;
            let mut t = start("geometry", &["kind", "x", "t", "edge_curve_x"], cli);
            t.push_raw(vec!["tangency".into(), num(y0), num(t0), num(edge_curve(a.n, t0))]);
            t.push_raw(vec!["cusp".into(), num(c.x0), num(c.t0), num(edge_curve(1, c.t0))]);
            Ok(Outcome { name: "geometry", table: t, passed: true })
        }
        Cmd::VerifyAll(a) => {
            let profile = if a.fast { Profile::Fast } else { Profile::Full };
            let ids: Vec<usize> = if a.only.is_empty() { (1..=12).collect() } else { a.only.clone() };
            if let Some(bad) = ids.iter().find(|&&i| !(1..=CRITERIA.len()).contains(&i)) {
                return Err(Error::InvalidArgument(format!("no criterion {bad}")));
            }
            let mut t = start("verify-all", &["id", "passed"], cli);
            let mut passed = true;
            for id in ids {
                let rep = run_criterion(id, profile);
                eprintln!("{}", rep.line());
                t.meta(format!("{id} {}: {}", rep.name, rep.detail));
                t.push_raw(vec![id.to_string(), u8::from(rep.passed).to_string()]);
                passed &= rep.passed;
            }
            Ok(Outcome { name: "verify-all", table: t, passed })
        }
    }
}

fn pde_check(a: &crate::PdeArgs, cli: &Cli) -> Result<Outcome, Error> {
    let mut t = start("pde-check", &["form", "h", "residual", "normalization", "relative"], cli);
    let mut reports: Vec<(&str, ResidualReport)> = Vec::new();
    match a.which {
        Which::Rairy => {
            let h = a.h.unwrap_or(0.15);
            for step in [h, h / 2.0] {
                let s = local_surface(a.r, a.tau, a.x, step, a.nodes)?;
                let rep = r_airy_pde_residual(&s, (a.tau, a.x))?;
                t.meta(format!("h = {}: surface accuracy {}", num(step), num(rep.surface_accuracy)));
                reports.push(("one-time", rep.one_time));
                reports.push(("factored", rep.factored));
            }
        }
        Which::FiniteN => {
            let h = a.h.unwrap_or(0.1);
            let ens = SourceEnsemble::new(a.n, a.k1, a.alpha)?;
            for step in [h, h / 2.0] {
                let rep = finite_n_pde_residual(&ens, a.b, step)?;
                reports.push(("quartic", rep.quartic));
                reports.push(("determinant", rep.determinant));
            }
        }
    }
    let mut passed = true;
    for (k, (form, rep)) in reports.iter().enumerate() {
        passed &= rep.relative <= a.tol;
        // the halved step must not be worse
        if k >= 2 {
            passed &= rep.relative < reports[k - 2].1.relative;
        }
        t.push_raw(vec![form.to_string(), num(rep.steps.0), num(rep.residual), num(rep.normalization), num(rep.relative)]);
    }
    Ok(Outcome { name: "pde-check", table: t, passed })
}

fn identity_table(name: &'static str, c: IdentityCheck, tol: f64, cli: &Cli) -> Outcome {
    let mut t = start(name, &["identity", "lhs", "rhs", "relative", "observed_order"], cli);
    t.meta(format!("step: {}", num(c.step)));
    for r in &c.residuals {
        t.push_raw(vec![r.name.to_string(), num(r.lhs), num(r.rhs), num(r.relative), num(r.observed_order())]);
    }
    let passed = c.max_relative() <= tol;
    Outcome { name, table: t, passed }
}

fn cdf_table<F: Fn(f64) -> f64 + Sync>(q: F) -> ChebTable {
    ChebTable::new(-9.0, 9.0, 1.0, 24, |x| q(x).exp())
}

fn eval_cdf(t: &ChebTable, x: f64) -> f64 {
    let (lo, hi) = t.range();
    if x < lo {
        0.0
    } else if x > hi {
        1.0
    } else {
        t.eval(x).clamp(0.0, 1.0)
    }
}
