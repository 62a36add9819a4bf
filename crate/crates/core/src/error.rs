use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),
    #[error("contour passes within {distance:.3e} of the pole (minimum 0.1)")]
    PathTooClose { distance: f64 },
    #[error("boundary matching did not converge (residual {residual:.3e})")]
    NonConvergence { residual: f64 },
    #[error("spectral radius {radius:.6} >= 1; domain too far left")]
    DomainTooFarLeft { radius: f64 },
    #[error("determinant is not positive ({0:.3e})")]
    NonPositiveDeterminant(f64),
    #[error("unsupported expansion order {0}")]
    UnsupportedOrder(usize),
    #[error("weight is not integrable (quadratic coefficient {0})")]
    DivergentWeight(f64),
    #[error("stencil leaves the grid: {0}")]
    Stencil(String),
    #[error("degenerate normalization: every term vanishes")]
    DegenerateNormalization,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
