//! Discrete conjugate nets: the first-order system for `(x, w_i, c_ij)`, its
//! blockwise implicit coefficient solve, elementary hexahedra, Jonas
//! transformations and the associated consistency checks.

mod coeffs;
mod hexahedron;
mod net;
mod system;

pub use coeffs::{coplanarity_residual, extract_rotation_coeffs, jonas_coefficients, JonasData};
pub use hexahedron::{
    check_4d_consistency, elementary_hexahedron, hexahedron_by_planes, ConjugateState, Hexahedron,
};
pub use net::{jonas_permutability_check, solve_conjugate_net, ConjugateGoursat, ConjugateNet};
pub use system::{dcn_step_c, solve_triple, CoeffMatrix, ConjugateSystem, ShiftedCoeffs, BLOCK_DET_TOL};

use crate::lattice::{LatticeError, StepError};

/// Relative planarity tolerance for reading coefficients off a quad.
pub const PLANARITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConjugateError {
    #[error("degenerate hexahedron{} (determinant {det:e})", site.as_ref().map(|s| format!(" at {s:?}")).unwrap_or_default())]
    DegenerateHexahedron { site: Option<Vec<usize>>, det: f64 },
    #[error("quad is not planar (relative residual {residual:e})")]
    NonPlanarQuad { residual: f64 },
    #[error("edge vectors are linearly dependent")]
    DegenerateEdges,
    #[error("Jonas data not admissible: c_Mi = {c_mi} (must differ from -1)")]
    Inadmissible { c_mi: f64 },
    #[error("inconsistent data: {0}")]
    DataMismatch(String),
    #[error(transparent)]
    Step(StepError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}
