use super::multivector::Multivector;
use super::vector::MinkowskiVector;
use super::{CliffordError, GROUP_TOL, IDENTITY_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn flip(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// An element of the Pin group: a product of unit vectors `u` with `u² = −1`.
///
/// Frames of nets are stored as `PinElement`s whose adjoint action fixes
/// `e_∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct PinElement {
    value: Multivector,
    parity: Parity,
}

/// `u⁻¹ = −u/⟨u,u⟩`.
pub fn invert_vector(u: &MinkowskiVector) -> Result<Multivector, CliffordError> {
    let q = u.norm_sq();
    if q.abs() <= IDENTITY_TOL * u.coord_norm_sq().max(f64::MIN_POSITIVE) {
        return Err(CliffordError::NullVector);
    }
    Ok(Multivector::from_vector(u).scaled(-1.0 / q))
}

impl PinElement {
    pub fn identity(n: usize) -> Self {
        Self { value: Multivector::one(n), parity: Parity::Even }
    }

    /// A unit spacelike vector (`⟨u,u⟩ = 1`, so `u² = −1`) as a Pin element.
    pub fn from_unit_vector(u: &MinkowskiVector) -> Result<Self, CliffordError> {
        let q = u.norm_sq();
        if (q - 1.0).abs() > GROUP_TOL {
            return Err(CliffordError::NotUnit { square: q });
        }
        Ok(Self { value: Multivector::from_vector(u), parity: Parity::Odd })
    }

    /// Validates an arbitrary multivector as a Pin element.
    pub fn try_new(value: Multivector) -> Result<Self, CliffordError> {
        let even = value.parity_mass(true);
        let odd = value.parity_mass(false);
        let total = even + odd;
        let parity = if odd <= GROUP_TOL * GROUP_TOL * total {
            Parity::Even
        } else if even <= GROUP_TOL * GROUP_TOL * total {
            Parity::Odd
        } else {
            return Err(CliffordError::MixedParity);
        };
        let norm = &value * &value.reverse();
        let s = norm.scalar_part();
        let rest = (&norm - &Multivector::scalar(value.n(), s)).max_abs();
        if (s.abs() - 1.0).abs() > GROUP_TOL || rest > GROUP_TOL {
            return Err(CliffordError::NotInGroup { defect: (s.abs() - 1.0).abs().max(rest) });
        }
        Ok(Self { value, parity })
    }

    /// Wraps a multivector known to be a Pin element (e.g. a product of
    /// validated factors). Only the parity is recomputed.
    pub(crate) fn from_trusted(value: Multivector, parity: Parity) -> Self {
        Self { value, parity }
    }

    pub fn value(&self) -> &Multivector {
        &self.value
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn n(&self) -> usize {
        self.value.n()
    }

    pub fn mul(&self, other: &PinElement) -> PinElement {
        PinElement { value: &self.value * &other.value, parity: self.parity.flip(other.parity) }
    }

    /// Left multiplication by a unit vector: `u·ψ`.
    pub fn left_mul_vector(&self, u: &MinkowskiVector) -> PinElement {
        PinElement {
            value: &Multivector::from_vector(u) * &self.value,
            parity: self.parity.flip(Parity::Odd),
        }
    }

    pub fn negated(&self) -> PinElement {
        PinElement { value: -&self.value, parity: self.parity }
    }

    pub fn inverse(&self) -> Multivector {
        let rev = self.value.reverse();
        let s = (&self.value * &rev).scalar_part();
        rev.scaled(1.0 / s)
    }

    /// `A_ψ(v) = ψ⁻¹ v ψ`.
    pub fn adjoint(&self, v: &MinkowskiVector) -> Result<MinkowskiVector, CliffordError> {
        adjoint(self, v)
    }

    /// `|A_ψ(e_∞) − e_∞|`, in max-norm.
    pub fn e_inf_drift(&self) -> f64 {
        let ei = MinkowskiVector::e_inf(self.n());
        match self.adjoint(&ei) {
            Ok(a) => (&a - &ei).max_abs(),
            Err(_) => f64::INFINITY,
        }
    }

    /// Whether the adjoint action fixes `e_∞` up to the group tolerance.
    pub fn fixes_e_inf(&self) -> bool {
        self.e_inf_drift() <= GROUP_TOL
    }

    /// Picks the representative of `±ψ` whose largest-magnitude coefficient
    /// is positive; ties within 1e−12 go to the lowest blade index.
    pub fn normalized_sign(&self) -> PinElement {
        let c = self.value.coeffs();
        let max = self.value.max_abs();
        let lead = c.iter().position(|x| x.abs() >= max - 1e-12 * max).unwrap_or(0);
        if c[lead] < 0.0 {
            self.negated()
        } else {
            self.clone()
        }
    }

    /// Max-norm distance between the coefficient arrays.
    pub fn distance(&self, other: &PinElement) -> f64 {
        (&self.value - &other.value).max_abs()
    }
}

/// `A_ψ(v) = ψ⁻¹ v ψ`, projected to grade 1.
///
/// Fails with `NonVectorResult` when the product has non-vector parts beyond
/// tolerance, which indicates a corrupted `ψ`.
pub fn adjoint(psi: &PinElement, v: &MinkowskiVector) -> Result<MinkowskiVector, CliffordError> {
    let full = &(&psi.inverse() * &Multivector::from_vector(v)) * psi.value();
    let vec = full.vector_part();
    let rest = (&full - &Multivector::from_vector(&vec)).max_abs();
    let scale = vec.max_abs().max(v.max_abs()).max(1.0);
    if rest > GROUP_TOL * scale {
        return Err(CliffordError::NonVectorResult { residual: rest });
    }
    Ok(vec)
}
