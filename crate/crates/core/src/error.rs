use crate::numerics::IntegralResult;
use crate::Complex64;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("quadrature did not reach tolerance (estimate {}, error {:.3e})", .best.value, .best.error_estimate)]
    NonConvergence { best: IntegralResult },

    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("1F1 lower parameter {c} is a non-positive integer")]
    PoleAtC { c: Complex64 },

    #[error("series did not converge within {terms} terms")]
    SeriesNonConvergence { terms: usize },

    #[error("resolvent of X evaluated at its pole s = z = {z}")]
    PoleHit { z: f64 },

    #[error("resolvent kernel requires Im z != 0 (z = {z})")]
    RealZ { z: Complex64 },

    #[error("XP+PX resolvent formula needs Im z > -1 (z = {z})")]
    OutsideStrip { z: Complex64 },

    #[error("z = {z} is the eigenvalue {eigenvalue} of the oscillator")]
    AtEigenvalue { z: Complex64, eigenvalue: f64 },

    #[error("grid too coarse for finite differences (relative stencil disagreement {0:.3e})")]
    GridTooCoarse(f64),

    #[error("sampled function does not decay at the grid ends (|f| = {0:.3e})")]
    NonDecaying(f64),

    #[error("operation not available for {0}")]
    UnsupportedObservable(String),

    #[error("input must vanish near s = 0 (|g| = {0:.3e} there)")]
    BadSupport(f64),

    #[error("characteristic function does not decay (tail mean |cf| = {0:.3}); law has a point mass")]
    NonIntegrableCf(f64),

    #[error("epsilon sequence is not contracting at t = {t}")]
    JumpNonConvergence { t: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Recovers the best available estimate from a quadrature failure;
    /// other errors pass through unchanged.
    pub fn best_estimate(self) -> Result<IntegralResult> {
        match self {
            Error::NonConvergence { best } => Ok(best),
            other => Err(other),
        }
    }

    pub fn is_non_convergence(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::SeriesNonConvergence { .. }
                | Error::JumpNonConvergence { .. }
        )
    }
}
