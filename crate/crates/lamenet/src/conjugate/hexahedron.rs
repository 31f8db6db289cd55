use nalgebra::{DMatrix, Matrix3, Vector3};

use super::system::{dcn_step_c, CoeffMatrix};
use super::ConjugateError;
use crate::lattice::StepError;
use crate::linalg::{axpy, dist, norm, sub};

/// Data of a conjugate net at one corner: the point, the edge vectors
/// `w_i = δ_i x` and the rotation coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugateState {
    pub x: Vec<f64>,
    pub w: Vec<Vec<f64>>,
    pub c: CoeffMatrix,
}

impl ConjugateState {
    pub fn dim(&self) -> usize {
        self.w.len()
    }

    /// Longest edge `ε_i |w_i|`, the length scale of the cube.
    pub fn scale(&self, eps: &[f64]) -> f64 {
        self.w.iter().zip(eps).map(|(w, e)| e * norm(w)).fold(0.0, f64::max)
    }

    /// `τ_i x`.
    pub fn shifted_point(&self, i: usize, eps: &[f64]) -> Vec<f64> {
        axpy(&self.x, eps[i], &self.w[i])
    }

    /// `τ_i w_j = w_j + ε_i (c_ji w_i + c_ij w_j)`.
    pub fn shifted_edge(&self, i: usize, j: usize, eps: &[f64]) -> Vec<f64> {
        let (cji, cij) = (self.c.get(j, i), self.c.get(i, j));
        self.w[j].iter().zip(&self.w[i]).map(|(b, a)| b + eps[i] * (cji * a + cij * b)).collect()
    }

    /// The corner data at `τ_i ξ` restricted to the directions `dirs`
    /// (which must not contain `i`).
    pub fn shifted_state(&self, i: usize, dirs: &[usize], eps: &[f64]) -> Result<ConjugateState, ConjugateError> {
        let tc = dcn_step_c(&self.c, eps).map_err(degenerate)?;
        let x = self.shifted_point(i, eps);
        let w = dirs.iter().map(|&j| self.shifted_edge(i, j, eps)).collect();
        let c = CoeffMatrix::from_fn(dirs.len(), |a, b| tc.get(i, dirs[a], dirs[b]));
        Ok(ConjugateState { x, w, c })
    }
}

pub(crate) fn degenerate(e: StepError) -> ConjugateError {
    match e {
        StepError::Singular { det, .. } => ConjugateError::DegenerateHexahedron { site: None, det },
        other => ConjugateError::Step(other),
    }
}

/// The eight vertices of an elementary hexahedron, indexed by bitmask
/// (bit `i` set ⇔ shifted in direction `i`).
#[derive(Clone, Debug, PartialEq)]
pub struct Hexahedron {
    pub vertices: [Vec<f64>; 8],
}

impl Hexahedron {
    pub fn vertex(&self, shifts: [bool; 3]) -> &[f64] {
        let idx = shifts.iter().enumerate().fold(0, |a, (i, s)| a | ((*s as usize) << i));
        &self.vertices[idx]
    }

    /// The four vertices of the face spanned by directions `i, j` at offset
    /// `base` in the remaining direction, in cyclic order.
    pub fn face(&self, i: usize, j: usize, base: bool) -> [&[f64]; 4] {
        let k = 3 - i - j;
        let b = (base as usize) << k;
        let (ei, ej) = (1 << i, 1 << j);
        [&self.vertices[b], &self.vertices[b | ei], &self.vertices[b | ei | ej], &self.vertices[b | ej]]
    }

    pub fn faces(&self) -> Vec<[&[f64]; 4]> {
        let mut out = Vec::new();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            for base in [false, true] {
                out.push(self.face(i, j, base));
            }
        }
        out
    }
}

/// Builds the elementary hexahedron from corner data (`M = 3`) by the
/// algebraic route: shifted edges, the implicit coefficient solve, and then
/// `τ_3τ_2τ_1 x = τ_2τ_1 x + ε_3 τ_2τ_1 w_3`.
pub fn elementary_hexahedron(state: &ConjugateState, eps: &[f64; 3]) -> Result<Hexahedron, ConjugateError> {
    if state.dim() != 3 {
        return Err(ConjugateError::DataMismatch(format!("hexahedron needs 3 directions, got {}", state.dim())));
    }
    let tc = dcn_step_c(&state.c, eps).map_err(degenerate)?;
    let mut v: [Vec<f64>; 8] = Default::default();
    v[0] = state.x.clone();
    for i in 0..3 {
        v[1 << i] = state.shifted_point(i, eps);
    }
    for i in 0..3 {
        for j in i + 1..3 {
            v[(1 << i) | (1 << j)] = axpy(&v[1 << i], eps[j], &state.shifted_edge(i, j, eps));
        }
    }
    // τ_2τ_1 w_3 = τ_1 w_3 + ε_2 (τ_1 c_32 τ_1 w_2 + τ_1 c_23 τ_1 w_3)
    let t1w2 = state.shifted_edge(0, 1, eps);
    let t1w3 = state.shifted_edge(0, 2, eps);
    let (c32, c23) = (tc.get(0, 2, 1), tc.get(0, 1, 2));
    let t21w3: Vec<f64> = t1w3.iter().zip(&t1w2).map(|(a, b)| a + eps[1] * (c32 * b + c23 * a)).collect();
    v[7] = axpy(&v[3], eps[2], &t21w3);
    // the eighth vertex may not collapse onto a vertex of the opposite faces
    let scale = state.scale(eps);
    for m in [3, 5, 6] {
        if dist(&v[7], &v[m]) <= 1e-9 * scale {
            return Err(ConjugateError::DegenerateHexahedron { site: None, det: 0.0 });
        }
    }
    Ok(Hexahedron { vertices: v })
}

/// Geometric route to the eighth vertex: the intersection of the planes
/// `τ_1Π_23`, `τ_2Π_13`, `τ_3Π_12` through the seven given vertices
/// (`seven[mask]` for masks `0..7`).
///
/// Fails with `DegenerateHexahedron` if the planes are not in general
/// position or the intersection collapses onto one of its neighbours.
pub fn hexahedron_by_planes(seven: &[Vec<f64>]) -> Result<Vec<f64>, ConjugateError> {
    assert!(seven.len() >= 7, "need the seven vertices with masks 0..7");
    let x = &seven[0];
    let n = x.len();
    // coordinates in the affine frame x + span(w_1, w_2, w_3)
    let basis = DMatrix::from_fn(n, 3, |r, c| seven[1 << c][r] - x[r]);
    let svd = basis.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.min() <= 1e-12 * smax {
        return Err(ConjugateError::DegenerateEdges);
    }
    let coords = |p: &[f64]| -> Vector3<f64> {
        let rhs = nalgebra::DVector::from_iterator(n, p.iter().zip(x).map(|(a, b)| a - b));
        let s = svd.solve(&rhs, 1e-14).expect("svd with vectors");
        Vector3::new(s[0], s[1], s[2])
    };
    let mut a = Matrix3::zeros();
    let mut b = Vector3::zeros();
    let mut norms = 1.0;
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let p = coords(&seven[1 << i]);
        let pj = coords(&seven[(1 << i) | (1 << j)]);
        let pk = coords(&seven[(1 << i) | (1 << k)]);
        let normal = (pj - p).cross(&(pk - p));
        norms *= normal.norm();
        a.set_row(i, &normal.transpose());
        b[i] = normal.dot(&p);
    }
    let det = a.determinant();
    if det.abs() <= 1e-12 * norms {
        return Err(ConjugateError::DegenerateHexahedron { site: None, det });
    }
    let t = a.lu().solve(&b).ok_or(ConjugateError::DegenerateHexahedron { site: None, det })?;
    let mut y = x.clone();
    for c in 0..3 {
        y = axpy(&y, t[c], &sub(&seven[1 << c], x));
    }
    let scale = (1..7).map(|m| dist(&seven[m], x)).fold(0.0, f64::max);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if dist(&y, &seven[(1 << i) | (1 << j)]) <= 1e-9 * scale {
            return Err(ConjugateError::DegenerateHexahedron { site: None, det });
        }
    }
    Ok(y)
}

/// Builds `τ_1τ_2τ_3τ_4 x` in four ways, once per choice of the direction
/// applied first, and returns the largest pairwise distance.
pub fn check_4d_consistency(state: &ConjugateState, eps: &[f64; 4]) -> Result<f64, ConjugateError> {
    if state.dim() != 4 {
        return Err(ConjugateError::DataMismatch(format!("4D check needs 4 directions, got {}", state.dim())));
    }
    let mut tips = Vec::with_capacity(4);
    for i in 0..4 {
        let rest: Vec<usize> = (0..4).filter(|&d| d != i).collect();
        let sub_state = state.shifted_state(i, &rest, eps)?;
        let sub_eps = [eps[rest[0]], eps[rest[1]], eps[rest[2]]];
        let hex = elementary_hexahedron(&sub_state, &sub_eps)?;
        tips.push(hex.vertices[7].clone());
    }
    let mut worst: f64 = 0.0;
    for a in 0..4 {
        for b in a + 1..4 {
            worst = worst.max(dist(&tips[a], &tips[b]));
        }
    }
    Ok(worst)
}
