use nalgebra::{DMatrix, DVector};

use super::{ConjugateError, PLANARITY_TOL};
use crate::linalg::{dist, singular_values, sub};

/// Rank-2 defect of a point set: the third singular value of the difference
/// vectors `p_k − p_0`. Zero for coplanar points; has units of length.
pub fn coplanarity_residual(points: &[&[f64]]) -> f64 {
    if points.len() < 4 {
        return 0.0;
    }
    let rows: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, points[0])).collect();
    singular_values(&rows).get(2).copied().unwrap_or(0.0)
}

/// Longest pairwise distance of a point set.
pub(crate) fn spread(points: &[&[f64]]) -> f64 {
    let mut s: f64 = 0.0;
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            s = s.max(dist(points[a], points[b]));
        }
    }
    s
}

/// Least-squares solution of `d = α a + β b` by QR, or `DegenerateEdges` if
/// `a, b` are (numerically) parallel.
pub(crate) fn two_column_fit(a: &[f64], b: &[f64], d: &[f64]) -> Result<(f64, f64), ConjugateError> {
    let n = a.len();
    let m = DMatrix::from_fn(n, 2, |r, c| if c == 0 { a[r] } else { b[r] });
    let sv = m.singular_values();
    if sv.max() == 0.0 || sv.min() <= 1e-12 * sv.max() {
        return Err(ConjugateError::DegenerateEdges);
    }
    let qr = m.qr();
    let qtd = qr.q().transpose() * DVector::from_column_slice(d);
    let sol = qr.r().solve_upper_triangular(&qtd).ok_or(ConjugateError::DegenerateEdges)?;
    Ok((sol[0], sol[1]))
}

/// Reads the rotation coefficients off one quad `(x, τ_i x, τ_j x, τ_iτ_j x)`
/// by solving `δ_iδ_j x = c_ji δ_i x + c_ij δ_j x`. Returns `(c_ij, c_ji)`.
///
/// ```
/// use lamenet::conjugate::extract_rotation_coeffs;
/// let q: [&[f64]; 4] = [&[0.0, 0.0], &[0.5, 0.0], &[0.0, 0.5], &[0.5, 0.5]];
/// assert_eq!(extract_rotation_coeffs(q, 0.5, 0.5).unwrap(), (0.0, 0.0));
/// ```
pub fn extract_rotation_coeffs(quad: [&[f64]; 4], eps_i: f64, eps_j: f64) -> Result<(f64, f64), ConjugateError> {
    let [x, xi, xj, xij] = quad;
    let scale = spread(&quad);
    let residual = coplanarity_residual(&quad);
    if residual > PLANARITY_TOL * scale {
        return Err(ConjugateError::NonPlanarQuad { residual: residual / scale });
    }
    let di: Vec<f64> = xi.iter().zip(x).map(|(a, b)| (a - b) / eps_i).collect();
    let dj: Vec<f64> = xj.iter().zip(x).map(|(a, b)| (a - b) / eps_j).collect();
    let dij: Vec<f64> = (0..x.len()).map(|k| (xij[k] - xi[k] - xj[k] + x[k]) / (eps_i * eps_j)).collect();
    let (cji, cij) = two_column_fit(&di, &dj, &dij)?;
    Ok((cij, cji))
}

/// Rotation coefficients of a Jonas pair along one curve.
#[derive(Clone, Debug, PartialEq)]
pub struct JonasData {
    pub c_mi: f64,
    pub c_im: f64,
    /// The displacement `x⁺ − x`.
    pub w_m: Vec<f64>,
}

impl JonasData {
    /// `c_Mi ≠ −1`, with a relative margin.
    pub fn is_admissible(&self) -> bool {
        (1.0 + self.c_mi).abs() > 1e-12
    }
}

/// Solves `∂X⁺ − ∂X = C_Mi ∂X + C_iM (X⁺ − X)` at one point of a curve,
/// given the tangents `dx = ∂X`, `dx_plus = ∂X⁺` and the displacement
/// `w_m = X⁺ − X` (which must be coplanar with the tangents).
pub fn jonas_coefficients(dx: &[f64], dx_plus: &[f64], w_m: &[f64]) -> Result<JonasData, ConjugateError> {
    let zero = vec![0.0; dx.len()];
    let scale = spread(&[&zero, dx, dx_plus, w_m]);
    let residual = coplanarity_residual(&[&zero, dx, dx_plus, w_m]);
    if residual > PLANARITY_TOL * scale {
        return Err(ConjugateError::NonPlanarQuad { residual: residual / scale });
    }
    let rhs = sub(dx_plus, dx);
    let (c_mi, c_im) = two_column_fit(dx, w_m, &rhs)?;
    let data = JonasData { c_mi, c_im, w_m: w_m.to_vec() };
    if !data.is_admissible() {
        return Err(ConjugateError::Inadmissible { c_mi });
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_edges() {
        let q: [&[f64]; 4] = [&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[2.0, 0.0, 0.0], &[3.0, 0.0, 0.0]];
        assert_eq!(extract_rotation_coeffs(q, 1.0, 1.0), Err(ConjugateError::DegenerateEdges));
    }

    #[test]
    fn twisted_quad_is_rejected() {
        let q: [&[f64]; 4] = [&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[1.0, 1.0, 0.1]];
        assert!(matches!(extract_rotation_coeffs(q, 1.0, 1.0), Err(ConjugateError::NonPlanarQuad { .. })));
    }

    #[test]
    fn round_trip() {
        let (ei, ej) = (0.1, 0.2);
        let (cij, cji) = (0.3, -0.7);
        let a = [1.0, 0.2, 0.5];
        let b = [-0.3, 1.0, 0.1];
        let x = [0.4, 0.1, -0.2];
        let xi: Vec<f64> = (0..3).map(|k| x[k] + ei * a[k]).collect();
        let xj: Vec<f64> = (0..3).map(|k| x[k] + ej * b[k]).collect();
        // τ_i w_j = w_j + ε_i (c_ji w_i + c_ij w_j)
        let xij: Vec<f64> = (0..3).map(|k| xi[k] + ej * (b[k] + ei * (cji * a[k] + cij * b[k]))).collect();
        let (u, v) = extract_rotation_coeffs([&x, &xi, &xj, &xij], ei, ej).unwrap();
        assert!((u - cij).abs() < 1e-10 && (v - cji).abs() < 1e-10, "{u} {v}");
    }
}
