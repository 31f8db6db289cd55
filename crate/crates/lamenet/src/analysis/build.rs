use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::clifford::{frame_from_adapted_basis, lift_lambda, unit_tangent, PinElement};
use crate::lattice::{LatticeField, MeshSpec};
use crate::orthogonal::{
    canonical_discretization, csurface_solve, orthosys_assemble, FnCurve, LameGoursat, LameSolution, OrthoData,
    OrthoError, OrthoSystem, SmoothCurve,
};

use super::{AnalysisError, Oracle};

/// What is solved from an oracle's Goursat data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    /// Canonical discretization of the first coordinate curve.
    Curve,
    /// C-surface on the first two coordinates.
    Csurface,
    /// Orthogonal system on all coordinates (at least 3).
    Orthosys,
}

impl ProblemKind {
    /// Number of lattice directions.
    pub fn dim(self, oracle: &dyn Oracle) -> usize {
        match self {
            ProblemKind::Curve => 1,
            ProblemKind::Csurface => 2,
            ProblemKind::Orthosys => oracle.dim(),
        }
    }
}

/// `t ↦ F(ξ_0 + t e_i)`.
pub fn coordinate_curve(oracle: Arc<dyn Oracle>, base: &[f64], i: usize) -> FnCurve {
    let at = {
        let base = base.to_vec();
        move |t: f64| {
            let mut xi = base.clone();
            xi[i] += t;
            xi
        }
    };
    let (o1, o2, o3) = (oracle.clone(), oracle.clone(), oracle.clone());
    let (a1, a2, a3) = (at.clone(), at.clone(), at);
    FnCurve::new(
        oracle.ambient_dim(),
        move |t| o1.point(&a1(t)),
        move |t| o2.partial(i, &a2(t)),
        move |t| o3.second(i, &a3(t)),
    )
}

/// The adapted frame at `F(ξ_0)` whose tangent vectors are the normalized
/// coordinate directions.
pub fn oracle_frame(oracle: &dyn Oracle, base: &[f64]) -> Result<PinElement, AnalysisError> {
    oracle.check(base)?;
    let x = oracle.point(base);
    let basis: Vec<_> = (0..oracle.dim()).map(|i| unit_tangent(&x, &oracle.partial(i, base))).collect();
    Ok(frame_from_adapted_basis(&lift_lambda(&x), &basis).map_err(OrthoError::from)?)
}

/// A solved problem: the discrete points and, where available, the
/// underlying solution object.
#[derive(Clone, Debug)]
pub enum Solved {
    Curve(LatticeField),
    Csurface(LameSolution),
    Orthosys(OrthoSystem),
}

impl Solved {
    pub fn points(&self) -> &LatticeField {
        match self {
            Solved::Curve(p) => p,
            Solved::Csurface(s) => s.points(),
            Solved::Orthosys(s) => s.net.points(),
        }
    }
}

/// Builds the Goursat data of `kind` from the oracle at `base` and solves
/// it with `steps` cells of size `eps` in every direction.
pub fn solve_from_oracle(
    kind: ProblemKind,
    oracle: Arc<dyn Oracle>,
    base: &[f64],
    eps: f64,
    steps: usize,
    stagger: bool,
) -> Result<Solved, AnalysisError> {
    let m = kind.dim(oracle.as_ref());
    if base.len() != oracle.dim() || m > oracle.dim() || (kind == ProblemKind::Orthosys && m < 3) {
        return Err(AnalysisError::InvalidSweep(format!(
            "{kind:?} needs {} coordinates from oracle `{}` with {} (base has {})",
            m,
            oracle.name(),
            oracle.dim(),
            base.len()
        )));
    }
    let psi0 = oracle_frame(oracle.as_ref(), base)?;
    let mesh = MeshSpec::cube(m, eps, steps)?;
    match kind {
        ProblemKind::Curve => {
            let curve = coordinate_curve(oracle.clone(), base, 0);
            let d = canonical_discretization(&curve, &psi0, 1, eps, steps, stagger)?;
            let field = LatticeField::from_fn(mesh, oracle.ambient_dim(), |s| d.points[s[0]].clone());
            Ok(Solved::Curve(field))
        }
        ProblemKind::Csurface => {
            let (c1, c2) = (coordinate_curve(oracle.clone(), base, 0), coordinate_curve(oracle.clone(), base, 1));
            let gamma = |a: f64, b: f64| {
                let mut xi = base.to_vec();
                xi[0] += a;
                xi[1] += b;
                oracle.gamma(0, 1, &xi)
            };
            let data = LameGoursat::c_surface_from_curves([&c1, &c2], &gamma, &psi0, [1, 2], &mesh, stagger)?;
            Ok(Solved::Csurface(csurface_solve(&data, &mesh)?))
        }
        ProblemKind::Orthosys => {
            let data = ortho_data(oracle, base, m, stagger)?;
            Ok(Solved::Orthosys(orthosys_assemble(&data, &mesh)?))
        }
    }
}

/// Orthogonal-system data from the first `m` coordinate curves of an oracle
/// through `base`, with its `Γ_ij` and adapted frame.
pub fn ortho_data(oracle: Arc<dyn Oracle>, base: &[f64], m: usize, stagger: bool) -> Result<OrthoData, AnalysisError> {
    if m > oracle.dim() || base.len() != oracle.dim() {
        return Err(AnalysisError::InvalidSweep(format!("{m} curves from oracle `{}` at {base:?}", oracle.name())));
    }
    let psi0 = oracle_frame(oracle.as_ref(), base)?;
    let curves = (0..m)
        .map(|i| Box::new(coordinate_curve(oracle.clone(), base, i)) as Box<dyn SmoothCurve>)
        .collect();
    let b = base.to_vec();
    let gamma = Box::new(move |i: usize, j: usize, a: f64, c: f64| {
        let mut xi = b.clone();
        xi[i] += a;
        xi[j] += c;
        oracle.gamma(i, j, &xi)
    });
    Ok(OrthoData { curves, gamma, psi0, stagger })
}
