use std::collections::HashMap;

use crate::clifford::PinElement;
use crate::conjugate::{extract_rotation_coeffs, solve_conjugate_net, ConjugateGoursat, ConjugateNet};
use crate::lattice::MeshSpec;
use crate::linalg::sub;

use super::circles::arc_point;
use super::csurface::{csurface_solve, relative_circularity, ribaucour_solve, LameGoursat, LameSolution};
use super::curve::SmoothCurve;
use super::OrthoError;

/// `Γ_ij(ξ_i, ξ_j)` for lattice directions `i < j`.
pub type GammaFn = Box<dyn Fn(usize, usize, f64, f64) -> f64>;

/// Smooth data of an orthogonal system: the coordinate curves through a
/// common point, the splitting functions of the coordinate C-surfaces and a
/// frame suited to the curves' tangents (`A_Ψ(e_i) = v̂_i(0)`).
pub struct OrthoData {
    pub curves: Vec<Box<dyn SmoothCurve>>,
    pub gamma: GammaFn,
    pub psi0: PinElement,
    pub stagger: bool,
}

impl std::fmt::Debug for OrthoData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OrthoData").field("curves", &self.curves.len()).field("stagger", &self.stagger).finish()
    }
}

/// A discrete orthogonal system with the coordinate C-surfaces it was
/// assembled from.
#[derive(Clone, Debug)]
pub struct OrthoSystem {
    pub net: ConjugateNet,
    pub surfaces: Vec<([usize; 2], LameSolution)>,
}

impl OrthoSystem {
    pub fn surface(&self, i: usize, j: usize) -> Option<&LameSolution> {
        self.surfaces.iter().find(|(p, _)| *p == [i, j]).map(|(_, s)| s)
    }

    /// Largest relative concircularity defect over every elementary quad.
    pub fn circularity(&self) -> Result<f64, OrthoError> {
        net_circularity(&self.net)
    }
}

/// A smooth Ribaucour transform: the transformed common point and the
/// splitting function `A_i` along each coordinate curve.
pub struct RibaucourTransform {
    pub x_plus0: Vec<f64>,
    pub alpha: Vec<Box<dyn Fn(f64) -> f64>>,
}

impl std::fmt::Debug for RibaucourTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RibaucourTransform").field("x_plus0", &self.x_plus0).finish_non_exhaustive()
    }
}

/// An orthogonal system together with `m'` Ribaucour transforms, as one
/// net with `m'` transformation directions.
#[derive(Clone, Debug)]
pub struct RibaucourPair {
    pub net: ConjugateNet,
    pub surfaces: Vec<([usize; 2], LameSolution)>,
    /// `curves[a][i]`: the pair of curves along direction `i` for transform `a`.
    pub curves: Vec<Vec<LameSolution>>,
}

impl RibaucourPair {
    pub fn circularity(&self) -> Result<f64, OrthoError> {
        net_circularity(&self.net)
    }
}

/// Largest `circularity_residual / diameter` over all elementary quads of a net.
pub(crate) fn net_circularity(net: &ConjugateNet) -> Result<f64, OrthoError> {
    let mesh = net.mesh();
    let m = mesh.dim();
    let mut worst: f64 = 0.0;
    for site in mesh.sites() {
        for i in 0..m {
            for j in i + 1..m {
                if site[i] >= mesh.steps(i) || site[j] >= mesh.steps(j) {
                    continue;
                }
                let mut si = site.clone();
                si[i] += 1;
                let mut sj = site.clone();
                sj[j] += 1;
                let mut sij = si.clone();
                sij[j] += 1;
                let q = [net.point(&site), net.point(&si), net.point(&sij), net.point(&sj)];
                worst = worst.max(relative_circularity(q)?);
            }
        }
    }
    Ok(worst)
}

/// Coefficients `c_ij`, `c_ji` on one coordinate plane, keyed by the site
/// on that plane (`(k_i, k_j)`).
type PlaneCoeffs = HashMap<(usize, usize), (f64, f64)>;

struct Assembly {
    origin: Vec<f64>,
    edges: Vec<Vec<Vec<f64>>>,
    coeffs: HashMap<(usize, usize), PlaneCoeffs>,
}

impl Assembly {
    fn goursat(&self, mesh: &MeshSpec) -> Result<ConjugateGoursat, OrthoError> {
        let coeff = |i: usize, j: usize, site: &[usize]| -> f64 {
            let (a, b) = (i.min(j), i.max(j));
            let (cab, cba) = self.coeffs[&(a, b)][&(site[a], site[b])];
            if i == a {
                cab
            } else {
                cba
            }
        };
        Ok(ConjugateGoursat::from_fns(mesh, self.origin.clone(), |i, k| self.edges[i][k].clone(), coeff)?)
    }
}

/// Builds the C-surfaces on every coordinate plane of the continuous
/// directions and reads their conjugate-net data.
fn base_assembly(
    data: &OrthoData,
    mesh: &MeshSpec,
) -> Result<(Assembly, Vec<([usize; 2], LameSolution)>), OrthoError> {
    let m = mesh.continuous();
    if data.curves.len() != m || m < 2 {
        return Err(OrthoError::DataMismatch(format!(
            "{} curves for {m} continuous directions (need at least 2)",
            data.curves.len()
        )));
    }
    let n = data.psi0.n();
    if m > n || data.curves.iter().any(|c| c.dim() != n) {
        return Err(OrthoError::DataMismatch(format!("{m} curves do not fit a frame over N = {n}")));
    }
    let eps = mesh.eps(0);
    let mut surfaces = Vec::new();
    let mut coeffs = HashMap::new();
    let mut edges: Vec<Vec<Vec<f64>>> = vec![Vec::new(); mesh.dim()];
    for i in 0..m {
        for j in i + 1..m {
            let sub_mesh = MeshSpec::new(&[eps, eps], &[mesh.steps(i), mesh.steps(j)], 0)?;
            let gamma = |a: f64, b: f64| (data.gamma)(i, j, a, b);
            let goursat = LameGoursat::c_surface_from_curves(
                [data.curves[i].as_ref(), data.curves[j].as_ref()],
                &gamma,
                &data.psi0,
                [i + 1, j + 1],
                &sub_mesh,
                data.stagger,
            )?;
            let surface = csurface_solve(&goursat, &sub_mesh)?;
            let mut plane = PlaneCoeffs::new();
            for s in surface.quad_sites() {
                let [x, xi, xij, xj] = surface.quad(&s);
                plane.insert((s[0], s[1]), extract_rotation_coeffs([x, xi, xj, xij], eps, eps)?);
            }
            coeffs.insert((i, j), plane);
            for (dir, axis) in [(i, 0), (j, 1)] {
                if edges[dir].is_empty() {
                    edges[dir] = (0..mesh.steps(dir))
                        .map(|k| {
                            let mut a = [0, 0];
                            a[axis] = k;
                            let mut b = a;
                            b[axis] += 1;
                            sub(surface.point(&b), surface.point(&a)).iter().map(|d| d / eps).collect()
                        })
                        .collect();
                }
            }
            surfaces.push(([i, j], surface));
        }
    }
    let origin = surfaces[0].1.point(&[0, 0]).to_vec();
    Ok((Assembly { origin, edges, coeffs }, surfaces))
}

/// Assembles a discrete orthogonal system from its coordinate C-surfaces.
///
/// Each plane `(i, j)` carries the discrete C-surface of the curves `X_i`,
/// `X_j` with frame indices `(i+1, j+1)` and splitting `Γ_ij`; its rotation
/// coefficients are read off and propagated into the bulk by the
/// conjugate-net solver.
pub fn orthosys_assemble(data: &OrthoData, mesh: &MeshSpec) -> Result<OrthoSystem, OrthoError> {
    if mesh.tail() != 0 {
        return Err(OrthoError::DataMismatch("use ribaucour_pair_3d for transformation directions".into()));
    }
    let (assembly, surfaces) = base_assembly(data, mesh)?;
    let net = solve_conjugate_net(&assembly.goursat(mesh)?)?;
    Ok(OrthoSystem { net, surfaces })
}

/// An orthogonal system with `m'` Ribaucour transforms (the mesh's tail).
///
/// Every transformed coordinate curve is the second layer of a discrete
/// Ribaucour pair of curves. For each pair of transforms `a < b`
/// (lexicographic), `diagonals` holds the fraction along the arc from
/// `x_a⁺(0)` to `x_b⁺(0)` (avoiding `x(0)`) of the circle through the three
/// points where the doubly transformed point is placed.
pub fn ribaucour_pair_3d(
    data: &OrthoData,
    transforms: &[RibaucourTransform],
    diagonals: &[f64],
    mesh: &MeshSpec,
) -> Result<RibaucourPair, OrthoError> {
    let m = mesh.continuous();
    let mt = mesh.tail();
    if transforms.len() != mt || mt == 0 {
        return Err(OrthoError::DataMismatch(format!("{} transforms for {mt} transformation directions", transforms.len())));
    }
    if diagonals.len() != mt * (mt - 1) / 2 || diagonals.iter().any(|s| !(*s > 0.0 && *s < 1.0)) {
        return Err(OrthoError::DataMismatch("one arc fraction in (0, 1) per pair of transforms".into()));
    }
    let (mut assembly, surfaces) = base_assembly(data, mesh)?;
    let eps = mesh.eps(0);
    let mut curves = Vec::with_capacity(mt);
    for (a, t) in transforms.iter().enumerate() {
        if t.alpha.len() != m {
            return Err(OrthoError::DataMismatch(format!("transform {a} needs {m} splitting functions")));
        }
        let dir = m + a;
        let mut per_dir = Vec::with_capacity(m);
        for i in 0..m {
            let sub_mesh = MeshSpec::new(&[eps, 1.0], &[mesh.steps(i), 1], 1)?;
            let goursat = LameGoursat::ribaucour_from_curve(
                data.curves[i].as_ref(),
                t.alpha[i].as_ref(),
                &t.x_plus0,
                None,
                &sub_mesh,
                data.stagger,
            )?;
            let pair = ribaucour_solve(&goursat, &sub_mesh)?;
            let mut plane = PlaneCoeffs::new();
            for k in 0..mesh.steps(i) {
                let q = [pair.point(&[k, 0]), pair.point(&[k + 1, 0]), pair.point(&[k, 1]), pair.point(&[k + 1, 1])];
                plane.insert((k, 0), extract_rotation_coeffs(q, eps, 1.0)?);
            }
            assembly.coeffs.insert((i, dir), plane);
            per_dir.push(pair);
        }
        assembly.edges[dir] = vec![sub(&t.x_plus0, &assembly.origin)];
        curves.push(per_dir);
    }
    let mut s = diagonals.iter();
    for a in 0..mt {
        for b in a + 1..mt {
            let (pa, pb) = (&transforms[a].x_plus0, &transforms[b].x_plus0);
            let pab = arc_point(&assembly.origin, pa, pb, *s.next().expect("counted above"))?;
            let c = extract_rotation_coeffs([&assembly.origin, pa, pb, &pab], 1.0, 1.0)?;
            assembly.coeffs.insert((m + a, m + b), PlaneCoeffs::from([((0, 0), c)]));
        }
    }
    let net = solve_conjugate_net(&assembly.goursat(mesh)?)?;
    Ok(RibaucourPair { net, surfaces, curves })
}
