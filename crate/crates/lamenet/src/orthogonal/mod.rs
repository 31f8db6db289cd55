//! Discrete orthogonal systems in the Clifford frame formalism.
//!
//! Two-dimensional systems (C-surfaces and Ribaucour pairs of curves) are
//! solved as a hyperbolic lattice system for the frame `ψ`, the metric
//! coefficients `h_i` and the rotation coefficients `β_ki`, closed by a
//! splitting function (`γ` or `α`). Higher-dimensional systems are assembled
//! from their coordinate C-surfaces through the conjugate-net solver.

mod assemble;
mod circles;
mod csurface;
mod curve;
mod frames;

pub use assemble::{
    orthosys_assemble, ribaucour_pair_3d, OrthoData, OrthoSystem, RibaucourPair, RibaucourTransform,
};
pub use circles::{circularity_residual, circumcircle, Circle as CircleFit};
pub use csurface::{
    csurface_solve, ribaucour_solve, LameGoursat, LameInvariants, LameSolution, LameSystem2D, Splitting,
};
pub use curve::{
    canonical_discretization, read_off_curve, Circle, DiscreteCurve, FnCurve, Line, ReadOff, SmoothCurve,
};
pub use frames::{frame_to_point, FrameStep, LameDerived, DEGENERATE_CIRCLE_TOL};

use crate::clifford::CliffordError;
use crate::conjugate::ConjugateError;
use crate::lattice::LatticeError;

/// Orthonormality loss of the read-off frame that aborts the integration.
pub const FRAME_DRIFT_TOL: f64 = 1e-6;
/// Speed below which a curve counts as not immersed.
pub const IMMERSION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OrthoError {
    #[error(transparent)]
    Clifford(#[from] CliffordError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Conjugate(#[from] ConjugateError),
    #[error("curve is not immersed at t = {t} (speed {speed:e})")]
    ImmersionFailure { t: f64, speed: f64 },
    #[error("read-off frame lost orthonormality at t = {t} (defect {defect:e})")]
    FrameDrift { t: f64, defect: f64 },
    #[error("initial frame is not suited to the curve (defect {defect:e})")]
    FrameNotSuited { defect: f64 },
    #[error("negative radicand in {quantity} ({value:e})")]
    SqrtDomain { quantity: &'static str, value: f64 },
    #[error("seed outside the Ribaucour domain: sum of squared rotation coefficients {sum} is not below 4")]
    OutsideDomain { sum: f64 },
    #[error("points coincide")]
    CoincidentPoints,
    #[error("points are collinear")]
    Collinear,
    #[error("inconsistent data: {0}")]
    DataMismatch(String),
}
