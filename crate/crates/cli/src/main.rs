//! `rairy`: CSV tables and verification reports for the r-Airy process.

mod commands;
mod config;
mod csv;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

/// Default output directory when `--out` is not given.
pub const OUT_DIR_ENV: &str = "RAIRY_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "rairy", version, about = "Airy process with r outliers: tables and checks")]
pub struct Cli {
    /// Write the CSV here instead of stdout (or $RAIRY_OUT_DIR/<command>.csv).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Tracy-Widom log-distribution by the Painlevé and Fredholm routes.
    Tw(Range),
    /// log P(sup A^(r)(τ) ≤ x) along an x range.
    Rairy(RairyArgs),
    /// Q(τ, x) on a tensor grid.
    Surface(SurfaceArgs),
    /// Finite-difference residuals of the r-Airy or the finite-n PDE.
    PdeCheck(PdeArgs),
    /// Bilinear identities of the moment tau functions.
    KpCheck(KpArgs),
    /// Virasoro constraints for log P_n.
    VirasoroCheck(VirasoroArgs),
    /// Monte Carlo largest eigenvalues, rescaled at the edge, with a KS test.
    Mc(McArgs),
    /// Remainders of the τ → −∞ expansion against exact values.
    AsymCheck(AsymArgs),
    /// Edge mean and variance: expansion against direct integration.
    Moments(MomentArgs),
    /// Tangency point and cusp geometry.
    Geometry(GeometryArgs),
    /// Run the acceptance suite.
    VerifyAll(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Range {
    #[arg(long, default_value_t = -6.0, allow_hyphen_values = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
}

#[derive(Debug, Clone, Args)]
pub struct RairyArgs {
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub tau: f64,
    #[command(flatten)]
    pub range: Range,
    /// Quadrature nodes.
    #[arg(long, default_value_t = 60)]
    pub nodes: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SurfaceArgs {
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, default_value_t = -6.0, allow_hyphen_values = true)]
    pub tau_min: f64,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub tau_max: f64,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 21)]
    pub n_tau: usize,
    #[arg(long, default_value_t = 21)]
    pub n_x: usize,
    #[arg(long, default_value_t = 60)]
    pub nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Rairy,
    FiniteN,
}

#[derive(Debug, Clone, Args)]
pub struct PdeArgs {
    #[arg(long, value_enum, default_value_t = Which::Rairy)]
    pub which: Which,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k1: usize,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub b: f64,
    /// Base stencil step; the report also covers half this step.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long, default_value_t = 60)]
    pub nodes: usize,
    /// Largest accepted relative residual.
    #[arg(long, default_value_t = 5e-3)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct KpArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k1: usize,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Right end of the half line; whole line when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, default_value_t = 1e-2)]
    pub step: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VirasoroArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k1: usize,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub step: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Law {
    /// Tracy-Widom, `e^{Q_0}`.
    Tw,
    /// `e^{Q(τ, ·)}` with the r-Airy kernel.
    Rairy,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[arg(long, default_value_t = 400)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub tau: f64,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Law::Rairy)]
    pub law: Law,
}

#[derive(Debug, Clone, Args)]
pub struct AsymArgs {
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-6,-8,-12,-16")]
    pub taus: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    pub order: usize,
}

#[derive(Debug, Clone, Args)]
pub struct MomentArgs {
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-4,-6,-8,-12")]
    pub taus: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct GeometryArgs {
    #[arg(long, default_value_t = 1.0)]
    pub rho0: f64,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Cusp parameter `a`.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Cusp parameter `p` in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Smaller Monte Carlo runs.
    #[arg(long)]
    pub fast: bool,
    /// Run only these criteria.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<usize>,
}

fn parse(args: Vec<String>) -> Result<Cli, clap::Error> {
    let mut cmd = Cli::command().args_override_self(true);
    let names: Vec<String> = cmd.get_subcommands().map(|s| s.get_name().to_string()).collect();
    for name in &names {
        cmd = cmd.mut_subcommand(name, |s| s.args_override_self(true));
    }
    let matches = cmd.try_get_matches_from(args)?;
    Cli::from_arg_matches(&matches)
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let args = match config::splice(raw, &Cli::command()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match parse(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(outcome) => {
            if let Err(e) = csv::write(&outcome.table, cli.out.as_ref(), outcome.name) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
