use crate::clifford::lift_lambda;
use crate::linalg::{axpy, diameter, dist, dot, singular_values, sub};

use super::OrthoError;

/// Concircularity defect of four points in ℝ^N.
///
/// The points are translated to the first one and scaled by their diameter
/// `s`; the four lifts `λ(p)` then span a 3-dimensional subspace exactly when
/// the points lie on a common circle (or line). The result is `s·σ_4` of
/// the 4×(N+2) lift matrix, a length comparable with `1e−9·s` tolerances.
///
/// ```
/// use lamenet::orthogonal::circularity_residual;
/// let square: [&[f64]; 4] = [&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]];
/// assert!(circularity_residual(&square).unwrap() < 1e-13);
/// ```
pub fn circularity_residual(points: &[&[f64]]) -> Result<f64, OrthoError> {
    assert_eq!(points.len(), 4, "circularity is a four-point test");
    let s = diameter(points);
    for a in 0..4 {
        for b in a + 1..4 {
            if !(dist(points[a], points[b]) > 1e-14 * s) {
                return Err(OrthoError::CoincidentPoints);
            }
        }
    }
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            let q: Vec<f64> = sub(p, points[0]).iter().map(|c| c / s).collect();
            lift_lambda(&q).into_vector().coords().to_vec()
        })
        .collect();
    Ok(s * singular_values(&rows).get(3).copied().unwrap_or(0.0))
}

/// A circle in ℝ^N, given by centre and radius.
#[derive(Clone, Debug, PartialEq)]
pub struct Circle {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Circle {
    /// `|p − c| − r`.
    pub fn offset(&self, p: &[f64]) -> f64 {
        dist(p, &self.center) - self.radius
    }
}

/// The circle through three points.
///
/// ```
/// use lamenet::orthogonal::circumcircle;
/// let c = circumcircle(&[0.0, 0.0], &[2.0, 0.0], &[0.0, 2.0]).unwrap();
/// assert!((c.center[0] - 1.0).abs() < 1e-15 && (c.radius - 2f64.sqrt()).abs() < 1e-15);
/// ```
pub fn circumcircle(a: &[f64], b: &[f64], c: &[f64]) -> Result<Circle, OrthoError> {
    let u = sub(b, a);
    let v = sub(c, a);
    let (uu, uv, vv) = (dot(&u, &u), dot(&u, &v), dot(&v, &v));
    if uu == 0.0 || vv == 0.0 || dist(b, c) == 0.0 {
        return Err(OrthoError::CoincidentPoints);
    }
    let det = uu * vv - uv * uv;
    if det <= 1e-24 * uu * vv {
        return Err(OrthoError::Collinear);
    }
    // centre a + αu + βv with |centre − a|² = |centre − b|² = |centre − c|²
    let alpha = vv * (uu - uv) / (2.0 * det);
    let beta = uu * (vv - uv) / (2.0 * det);
    let center = axpy(&axpy(a, alpha, &u), beta, &v);
    let radius = dist(&center, a);
    Ok(Circle { center, radius })
}

/// The point at fraction `s ∈ (0, 1)` along the arc from `p1` to `p2` that
/// avoids `p0`, on the circle through the three points.
pub(crate) fn arc_point(p0: &[f64], p1: &[f64], p2: &[f64], s: f64) -> Result<Vec<f64>, OrthoError> {
    let circle = circumcircle(p0, p1, p2)?;
    let r1 = sub(p1, &circle.center);
    let r2 = sub(p2, &circle.center);
    // orthonormal basis (e, g) of the circle's plane with e along r1
    let e: Vec<f64> = r1.iter().map(|x| x / circle.radius).collect();
    let g0 = axpy(&r2, -dot(&r2, &e), &e);
    let gl = dot(&g0, &g0).sqrt();
    let g: Vec<f64> = if gl > 1e-14 * circle.radius {
        g0.iter().map(|x| x / gl).collect()
    } else {
        let r0 = sub(p0, &circle.center);
        let h = axpy(&r0, -dot(&r0, &e), &e);
        let hl = dot(&h, &h).sqrt();
        h.iter().map(|x| -x / hl).collect()
    };
    let angle = |p: &[f64]| {
        let r = sub(p, &circle.center);
        dot(&r, &g).atan2(dot(&r, &e)).rem_euclid(std::f64::consts::TAU)
    };
    let (a0, a2) = (angle(p0), angle(p2));
    // counter-clockwise from p1 (angle 0) reaches p2 before p0, or go the other way
    let sweep = if a2 < a0 { a2 } else { a2 - std::f64::consts::TAU };
    let t = s * sweep;
    let dir = axpy(&e.iter().map(|x| x * t.cos()).collect::<Vec<_>>(), t.sin(), &g);
    Ok(axpy(&circle.center, circle.radius, &dir))
}
