use super::mobius::{drop_to_euclidean, lift_lambda, tangent_lift, ConePoint};
use super::multivector::Multivector;
use super::pin::{Parity, PinElement};
use super::vector::MinkowskiVector;
use super::CliffordError;

/// Tolerance for accepting an adapted basis as orthonormal.
pub const BASIS_TOL: f64 = 1e-9;

/// Builds `ψ ∈ ℋ_∞` with `A_ψ(e_0) = x̂` and `A_ψ(e_k) = basis[k-1]`.
///
/// `basis` holds `M ≤ N` unit tangent vectors at `x̂`. Missing directions are
/// completed by Gram–Schmidt over the canonical basis, always choosing the
/// candidate with the largest residual, and the last completed vector is
/// signed to make the frame positively oriented. The result is an even
/// element with sign normalized by [`PinElement::normalized_sign`].
pub fn frame_from_adapted_basis(x_hat: &ConePoint, basis: &[MinkowskiVector]) -> Result<PinElement, CliffordError> {
    let n = x_hat.n();
    if basis.len() > n {
        return Err(CliffordError::DegenerateBasis { reason: format!("{} vectors for N = {n}", basis.len()) });
    }
    if !x_hat.in_section(BASIS_TOL) {
        return Err(CliffordError::NotInSection { defect: x_hat.section_defect() });
    }
    let ei = MinkowskiVector::e_inf(n);
    for (k, b) in basis.iter().enumerate() {
        if b.n() != n {
            return Err(CliffordError::DimensionMismatch { expected: n, found: b.n() });
        }
        let checks = [
            ((b.norm_sq() - 1.0).abs(), "not a unit vector"),
            (b.dot(&ei).abs(), "not orthogonal to e_inf"),
            (b.dot(x_hat.vector()).abs(), "not tangent at the point"),
        ];
        for (defect, what) in checks {
            if defect > BASIS_TOL {
                return Err(CliffordError::DegenerateBasis { reason: format!("vector {}: {what} ({defect:e})", k + 1) });
            }
        }
        for (l, c) in basis.iter().enumerate().take(k) {
            let g = b.dot(c).abs();
            if g > BASIS_TOL {
                return Err(CliffordError::DegenerateBasis {
                    reason: format!("vectors {} and {} not orthogonal ({g:e})", l + 1, k + 1),
                });
            }
        }
    }
    let x = drop_to_euclidean(x_hat)?;
    let mut frame: Vec<Vec<f64>> = basis.iter().map(|b| b.euclidean_part().to_vec()).collect();
    complete_basis(&mut frame, n, basis.len())?;
    let psi = rotation_then_translation(&frame, &x)?;
    let psi = psi.normalized_sign();

    // post-condition self-check
    let target0 = lift_lambda(&x);
    let got0 = psi.adjoint(&MinkowskiVector::e0(n))?;
    let mut defect = (&got0 - target0.vector()).max_abs();
    for (k, b) in basis.iter().enumerate() {
        let got = psi.adjoint(&MinkowskiVector::basis(n, k + 1))?;
        defect = defect.max((&got - b).max_abs());
    }
    let scale = 1.0 + x.iter().map(|a| a * a).sum::<f64>();
    if defect > 1e-9 * scale {
        return Err(CliffordError::DegenerateBasis { reason: format!("frame post-check failed ({defect:e})") });
    }
    Ok(psi)
}

/// The translation frame taking `e_0` to `λ(t)` and fixing every `e_k`
/// direction.
pub fn translation_frame(t: &[f64]) -> PinElement {
    let n = t.len();
    let identity: Vec<Vec<f64>> = (0..n).map(|k| unit(n, k)).collect();
    rotation_then_translation(&identity, t)
        .expect("translations are always representable")
        .normalized_sign()
}

fn unit(n: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[k] = 1.0;
    v
}

fn reflect(c: &mut [f64], u: &[f64]) {
    let s = 2.0 * dot(c, u);
    c.iter_mut().zip(u).for_each(|(a, b)| *a -= s * b);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn complete_basis(frame: &mut Vec<Vec<f64>>, n: usize, given: usize) -> Result<(), CliffordError> {
    while frame.len() < n {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for k in 0..n {
            let mut r = unit(n, k);
            for f in frame.iter() {
                let c = dot(&r, f);
                r.iter_mut().zip(f).for_each(|(a, b)| *a -= c * b);
            }
            let norm = dot(&r, &r).sqrt();
            if best.as_ref().map_or(true, |(b, _)| norm > *b + 1e-12) {
                best = Some((norm, r));
            }
        }
        let (norm, r) = best.expect("n > 0");
        if norm < 1e-6 {
            return Err(CliffordError::DegenerateBasis { reason: "completion failed".into() });
        }
        frame.push(r.into_iter().map(|a| a / norm).collect());
    }
    let det = nalgebra::DMatrix::from_fn(n, n, |i, j| frame[j][i]).determinant();
    if det < 0.0 {
        if given == n {
            return Err(CliffordError::OrientationReversed);
        }
        frame[n - 1].iter_mut().for_each(|a| *a = -*a);
    }
    Ok(())
}

/// `ψ = (a_1 m_1)⋯(a_N m_N) · d · (d + |x| e_∞)`: plane rotations carrying the
/// canonical basis to `frame` (each a pair of reflections through the
/// half-way vector), followed by the translation by `x`.
fn rotation_then_translation(frame: &[Vec<f64>], x: &[f64]) -> Result<PinElement, CliffordError> {
    let n = x.len();
    let mut current: Vec<Vec<f64>> = (0..n).map(|k| unit(n, k)).collect();
    let mut value = Multivector::one(n);
    for k in 0..n {
        let a = current[k].clone();
        let b = frame[k].clone();
        let waypoints = if dot(&a, &b) > -0.5 {
            vec![b]
        } else if k + 1 < n {
            // nearly antipodal: pass through an orthogonal unused direction
            vec![current[k + 1].clone(), b]
        } else {
            return Err(CliffordError::OrientationReversed);
        };
        let mut from = a;
        for to in waypoints {
            let mid: Vec<f64> = from.iter().zip(&to).map(|(p, q)| p + q).collect();
            let mn = dot(&mid, &mid).sqrt();
            let m: Vec<f64> = mid.iter().map(|c| c / mn).collect();
            for c in current.iter_mut() {
                reflect(c, &from);
                reflect(c, &m);
            }
            value = &(&value * &Multivector::from_vector(&MinkowskiVector::from_euclidean(&from)))
                * &Multivector::from_vector(&MinkowskiVector::from_euclidean(&m));
            from = to;
        }
    }
    let r = dot(x, x).sqrt();
    if r > 0.0 {
        let d: Vec<f64> = x.iter().map(|a| a / r).collect();
        let dv = MinkowskiVector::from_euclidean(&d);
        let shifted = dv.axpy(r, &MinkowskiVector::e_inf(n));
        value = &(&value * &Multivector::from_vector(&dv)) * &Multivector::from_vector(&shifted);
    }
    Ok(PinElement::from_trusted(value, Parity::Even))
}

/// Unit tangent vector at `λ(x)` for the Euclidean direction `v` (normalized).
pub fn unit_tangent(x: &[f64], v: &[f64]) -> MinkowskiVector {
    let norm = dot(v, v).sqrt();
    let u: Vec<f64> = v.iter().map(|a| a / norm).collect();
    tangent_lift(x, &u)
}
