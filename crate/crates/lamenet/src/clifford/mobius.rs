use super::vector::MinkowskiVector;
use super::{CliffordError, IDENTITY_TOL};

/// A null vector of ℝ^{N+1,1}, i.e. a point of the light cone.
#[derive(Clone, Debug, PartialEq)]
pub struct ConePoint {
    vector: MinkowskiVector,
}

impl ConePoint {
    /// Accepts `v` if `⟨v,v⟩` vanishes relative to its coordinate size.
    pub fn new(v: MinkowskiVector) -> Result<Self, CliffordError> {
        let defect = v.norm_sq().abs() / v.coord_norm_sq().max(1.0);
        if defect > 1e-10 {
            return Err(CliffordError::NotOnCone { defect });
        }
        Ok(Self { vector: v })
    }

    pub fn vector(&self) -> &MinkowskiVector {
        &self.vector
    }

    pub fn into_vector(self) -> MinkowskiVector {
        self.vector
    }

    pub fn n(&self) -> usize {
        self.vector.n()
    }

    /// `|⟨u,e_∞⟩ + 1/2|`; zero for points of the Euclidean section 𝒦.
    pub fn section_defect(&self) -> f64 {
        (self.vector.dot(&MinkowskiVector::e_inf(self.n())) + 0.5).abs()
    }

    pub fn in_section(&self, tol: f64) -> bool {
        self.section_defect() <= tol
    }
}

/// The canonical lift `λ(x) = x + e_0 + |x|² e_∞`.
pub fn lift_lambda(x: &[f64]) -> ConePoint {
    let n = x.len();
    let q: f64 = x.iter().map(|a| a * a).sum();
    let mut c = vec![0.0; n + 2];
    c[..n].copy_from_slice(x);
    c[n] = (1.0 - q) / 2.0;
    c[n + 1] = (1.0 + q) / 2.0;
    ConePoint { vector: MinkowskiVector::new(&c) }
}

/// Central projection `π(u) = (u_1, …, u_{N+1}) / u_{N+2}` onto the unit sphere.
pub fn project_pi(u: &MinkowskiVector) -> Result<Vec<f64>, CliffordError> {
    let c = u.coords();
    let last = c[c.len() - 1];
    if last.abs() <= IDENTITY_TOL * u.max_abs() || last == 0.0 {
        return Err(CliffordError::AtInfinity);
    }
    Ok(c[..c.len() - 1].iter().map(|a| a / last).collect())
}

/// Inverse of [`lift_lambda`] on the cone: the Euclidean point represented by
/// `p`, after normalizing `⟨p,e_∞⟩ = −1/2`.
pub fn drop_to_euclidean(p: &ConePoint) -> Result<Vec<f64>, CliffordError> {
    drop_vector(p.vector())
}

/// As [`drop_to_euclidean`], without the null check.
pub fn drop_vector(u: &MinkowskiVector) -> Result<Vec<f64>, CliffordError> {
    let n = u.n();
    let c = u.coords();
    let s = c[n] + c[n + 1];
    if s.abs() <= IDENTITY_TOL * u.max_abs() || s == 0.0 {
        return Err(CliffordError::AtInfinity);
    }
    if s == 1.0 {
        Ok(c[..n].to_vec())
    } else {
        Ok(c[..n].iter().map(|a| a / s).collect())
    }
}

/// `σ⁻¹(x) = 2x/(1+|x|²) + (1−|x|²)/(1+|x|²) p_0`, a point of 𝕊^N ⊂ ℝ^{N+1}.
pub fn stereographic_inverse(x: &[f64]) -> Vec<f64> {
    let q: f64 = x.iter().map(|a| a * a).sum();
    let mut out: Vec<f64> = x.iter().map(|a| 2.0 * a / (1.0 + q)).collect();
    out.push((1.0 - q) / (1.0 + q));
    out
}

/// Derivative of `λ` at `x` in direction `v`: `v + 2(x·v) e_∞`.
pub fn tangent_lift(x: &[f64], v: &[f64]) -> MinkowskiVector {
    assert_eq!(x.len(), v.len());
    let xv: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
    MinkowskiVector::from_euclidean(v).axpy(2.0 * xv, &MinkowskiVector::e_inf(x.len()))
}
