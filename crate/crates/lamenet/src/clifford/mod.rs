//! Minkowski space ℝ^{N+1,1}, its Clifford algebra and the Möbius-model maps.
//!
//! Points of ℝ^N are represented on the light cone through the lift
//! [`lift_lambda`]; frames are [`PinElement`]s acting by `A_ψ(v) = ψ⁻¹vψ`.

mod frame;
mod mobius;
mod multivector;
mod pin;
mod vector;

pub use frame::{frame_from_adapted_basis, translation_frame, unit_tangent, BASIS_TOL};
pub use mobius::{drop_to_euclidean, drop_vector, lift_lambda, project_pi, stereographic_inverse, tangent_lift, ConePoint};
pub use multivector::{blade_sign, geometric_product, Multivector};
pub use pin::{adjoint, invert_vector, Parity, PinElement};
pub use vector::{lorentz_dot, MinkowskiVector};

/// Tolerance for exact algebraic identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Tolerance for group-membership drift.
pub const GROUP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliffordError {
    #[error("vector is null (lightlike) and has no inverse")]
    NullVector,
    #[error("expected a unit vector, got square {square}")]
    NotUnit { square: f64 },
    #[error("multivector mixes even and odd grades")]
    MixedParity,
    #[error("not a Pin group element (defect {defect:e})")]
    NotInGroup { defect: f64 },
    #[error("adjoint action left grade 1 (residual {residual:e})")]
    NonVectorResult { residual: f64 },
    #[error("point lies at infinity")]
    AtInfinity,
    #[error("vector is not on the light cone (defect {defect:e})")]
    NotOnCone { defect: f64 },
    #[error("cone point is not in the Euclidean section (defect {defect:e})")]
    NotInSection { defect: f64 },
    #[error("degenerate basis: {reason}")]
    DegenerateBasis { reason: String },
    #[error("basis is negatively oriented; frames fixing e_inf are even")]
    OrientationReversed,
    #[error("dimension mismatch: expected N = {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}
