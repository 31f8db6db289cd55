use crate::clifford::{drop_vector, Multivector, MinkowskiVector, PinElement};
use crate::lattice::StepError;

use super::OrthoError;

/// Threshold on `|⟨v̂_1, v̂_2⟩ − 1|` below which a quad's circle degenerates
/// to a line.
pub const DEGENERATE_CIRCLE_TOL: f64 = 1e-10;

/// The Euclidean point `A_ψ(e_0)` of a frame.
///
/// ```
/// use lamenet::clifford::{translation_frame, PinElement};
/// use lamenet::orthogonal::frame_to_point;
///
/// assert_eq!(frame_to_point(&PinElement::identity(2)).unwrap(), vec![0.0, 0.0]);
/// let p = frame_to_point(&translation_frame(&[1.0, -2.0])).unwrap();
/// assert!((p[0] - 1.0).abs() < 1e-12 && (p[1] + 2.0).abs() < 1e-12);
/// ```
pub fn frame_to_point(psi: &PinElement) -> Result<Vec<f64>, OrthoError> {
    let x = psi.adjoint(&MinkowskiVector::e0(psi.n()))?;
    Ok(drop_vector(&x)?)
}

/// One step `τ_iψ = −Σ_i e_f ψ` of the discrete moving frame equation, with
/// `Σ_i = N_i e_f + (ε/2) Σ_{k≠f} β_k e_k − ε h e_∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameStep {
    f: usize,
    sigma: MinkowskiVector,
    big_n: f64,
}

impl FrameStep {
    /// `f` is the 1-based basis index of the step direction; `beta` holds
    /// `β_k` for `k ≠ f` in ascending order.
    pub fn new(n: usize, f: usize, eps: f64, h: f64, beta: &[f64]) -> Result<Self, StepError> {
        assert!(f >= 1 && f <= n && beta.len() + 1 == n, "one β per basis vector other than e_f");
        let big_n = norm_factor(eps, beta).ok_or(StepError::SqrtDomain {
            quantity: "N_i",
            value: 1.0 - eps * eps / 4.0 * beta.iter().map(|b| b * b).sum::<f64>(),
        })?;
        let mut c = vec![0.0; n + 2];
        for (idx, k) in others(n, f).enumerate() {
            c[k - 1] = eps / 2.0 * beta[idx];
        }
        c[f - 1] = big_n;
        let sigma = MinkowskiVector::new(&c).axpy(-eps * h, &MinkowskiVector::e_inf(n));
        Ok(Self { f, sigma, big_n })
    }

    pub fn sigma(&self) -> &MinkowskiVector {
        &self.sigma
    }

    pub fn big_n(&self) -> f64 {
        self.big_n
    }

    pub fn apply(&self, psi: &PinElement) -> PinElement {
        let n = psi.n();
        let se = &Multivector::from_vector(&self.sigma) * &Multivector::from_vector(&MinkowskiVector::basis(n, self.f));
        PinElement::from_trusted(-(&se * psi.value()), psi.parity())
    }

    /// `v̂ = A_{e_fψ}(Σ)`, the unit vector of the reflection taking the point
    /// of `ψ` to the point of the shifted frame.
    pub fn direction(&self, psi: &PinElement) -> Result<MinkowskiVector, OrthoError> {
        let n = psi.n();
        let ef = MinkowskiVector::basis(n, self.f);
        // A_{e_f}(Σ) = −Σ + 2⟨e_f, Σ⟩ e_f
        let reflected = (-&self.sigma).axpy(2.0 * self.big_n, &ef);
        Ok(psi.adjoint(&reflected)?)
    }
}

/// `N = (1 − ε²/4 Σ β²)^{1/2}`, or `None` off the domain.
pub(crate) fn norm_factor(eps: f64, beta: &[f64]) -> Option<f64> {
    let q = 1.0 - eps * eps / 4.0 * beta.iter().map(|b| b * b).sum::<f64>();
    (q > 0.0).then(|| q.sqrt())
}

/// Basis indices `1..=n` other than `f`, ascending.
pub(crate) fn others(n: usize, f: usize) -> impl Iterator<Item = usize> {
    (1..=n).filter(move |&k| k != f)
}

/// Position of `β_k` in a coefficient list that skips `f`.
pub(crate) fn slot(k: usize, f: usize) -> usize {
    debug_assert!(k != f);
    if k < f {
        k - 1
    } else {
        k - 2
    }
}

/// Quantities of a two-dimensional discrete orthogonal system derived at
/// one site from `h`, `β` and the splitting function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LameDerived {
    pub big_n: [f64; 2],
    pub theta: f64,
    pub rho12: f64,
    pub rho21: f64,
    pub n: f64,
}

impl LameDerived {
    /// `ρ_ij` for lattice directions `i ≠ j ∈ {0, 1}`.
    pub fn rho(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (0, 1) => self.rho12,
            (1, 0) => self.rho21,
            _ => panic!("ρ needs two distinct directions"),
        }
    }

    /// `⟨v̂_1, v̂_2⟩ = −(ρ_12 + ρ_21)/2`.
    pub fn cos_angle(&self) -> f64 {
        -(self.rho12 + self.rho21) / 2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::lorentz_dot;

    #[test]
    fn sigma_is_unit_without_e0_part() {
        let step = FrameStep::new(3, 2, 0.3, 1.7, &[0.4, -1.1]).unwrap();
        let s = step.sigma();
        assert!((s.norm_sq() - 1.0).abs() < 1e-12);
        assert!(lorentz_dot(s, &MinkowskiVector::e_inf(3)).abs() < 1e-15);
    }

    #[test]
    fn coarse_mesh_fails_the_square_root() {
        let r = FrameStep::new(2, 1, 1.0, 1.0, &[2.5]);
        assert!(matches!(r, Err(StepError::SqrtDomain { .. })));
    }

    #[test]
    fn slots_skip_the_step_index() {
        assert_eq!(others(4, 2).collect::<Vec<_>>(), vec![1, 3, 4]);
        assert_eq!([1, 3, 4].map(|k| slot(k, 2)), [0, 1, 2]);
    }
}
