//! Discrete conjugate nets, circular nets and discrete orthogonal systems.
//!
//! The crate solves lattice Goursat problems for discrete conjugate nets
//! (planar quadrilaterals) and discrete orthogonal systems (circular
//! quadrilaterals, built from Clifford frames), computes Jonas and Ribaucour
//! transforms, and measures the convergence of discrete solutions to their
//! smooth counterparts.
//!
//! ```
//! use lamenet::clifford::{lift_lambda, drop_to_euclidean};
//!
//! let p = lift_lambda(&[3.0, 4.0]);
//! assert_eq!(p.vector().norm_sq(), 0.0);
//! assert_eq!(drop_to_euclidean(&p).unwrap(), vec![3.0, 4.0]);
//! ```

pub mod analysis;
pub mod clifford;
pub mod conjugate;
pub mod lattice;
pub mod linalg;
pub mod orthogonal;

/// Version of this library, as recorded in exported artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/clifford.md")]
    mod clifford {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/conjugate.md")]
    mod conjugate {}
    #[doc = include_str!("../../../book/src/orthogonal.md")]
    mod orthogonal {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
