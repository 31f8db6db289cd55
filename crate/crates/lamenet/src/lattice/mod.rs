//! Lattices with mixed mesh sizes, shift and difference operators, discrete
//! `C^ℓ` norms, and a generic Goursat driver for consistent hyperbolic
//! lattice systems.
//!
//! The driver is sequential: it fills one level `Σ k_i` at a time, and all
//! inputs of a step lie on the previous level.

mod field;
mod mesh;
mod system;

pub use field::LatticeField;
pub use mesh::MeshSpec;
pub use system::{
    consistency_residual, goursat_solve, validate_system, ComponentSpec, Corner, FillOrder, GoursatData,
    GoursatSolution, HyperbolicSystem, StepError,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LatticeError {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("shift in direction {dir} leaves the box")]
    OutOfBounds { dir: usize },
    #[error("norm order {order} exceeds the available {max} steps")]
    OrderTooLarge { order: usize, max: usize },
    #[error("value undefined at site {site:?}")]
    UndefinedValue { site: Vec<usize> },
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("Goursat data for component {component} has width {found}, expected {expected}")]
    DataShape { component: usize, expected: usize, found: usize },
    #[error("step for {name} (component {component}) failed at site {site:?}: {source}")]
    DomainViolation { site: Vec<usize>, component: usize, name: String, source: StepError },
}
