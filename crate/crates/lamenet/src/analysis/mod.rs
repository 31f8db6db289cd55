//! Convergence harness: closed-form oracles, ε-sweeps with `C^ℓ` error
//! norms, and log-log rate fits.

mod build;
mod oracle;
mod sweep;

pub use build::{coordinate_curve, oracle_frame, ortho_data, solve_from_oracle, ProblemKind, Solved};
pub use oracle::{
    builtin_oracle, CircleOracle, EllipticOracle, EllipticValues, FlatOracle, Oracle, SphericalOracle, SINGULAR_TOL,
};
pub use sweep::{convergence_sweep, rate_fit, snapped_extent, RateFit, SweepConfig, SweepLevel, SweepReport, EXACT_TOL};

use crate::lattice::LatticeError;
use crate::orthogonal::OrthoError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("oracle is singular at ξ = {xi:?}")]
    SingularPoint { xi: Vec<f64> },
    #[error("unknown oracle `{0}`")]
    UnknownOracle(String),
    #[error("rate fit is degenerate: {0}")]
    DegenerateFit(String),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("solve at ε = {eps} failed: {source}")]
    Solver {
        eps: f64,
        #[source]
        source: OrthoError,
    },
    #[error(transparent)]
    Ortho(#[from] OrthoError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}
