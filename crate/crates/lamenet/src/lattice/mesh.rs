use serde::Serialize;

use super::LatticeError;

/// A rectangular box of lattice sites `ξ = (k_1 ε_1, …, k_M ε_M)` with
/// `0 ≤ k_i ≤ steps_i`.
///
/// The first `M − tail` directions are continuous-limit directions sharing a
/// common mesh size; the last `tail` directions are transformation
/// directions with `ε_i = 1` and two layers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeshSpec {
    eps: Vec<f64>,
    steps: Vec<usize>,
    tail: usize,
}

impl MeshSpec {
    pub fn new(eps: &[f64], steps: &[usize], tail: usize) -> Result<Self, LatticeError> {
        let m = eps.len();
        if m == 0 || steps.len() != m || tail > m {
            return Err(LatticeError::InvalidMesh("dimension mismatch".into()));
        }
        for (i, (&e, &s)) in eps.iter().zip(steps).enumerate() {
            if !(e > 0.0 && e.is_finite()) {
                return Err(LatticeError::InvalidMesh(format!("eps[{i}] = {e} must be positive")));
            }
            if i >= m - tail && (e != 1.0 || s != 1) {
                return Err(LatticeError::InvalidMesh(format!("tail direction {i} needs eps = 1 and two layers")));
            }
        }
        if eps[..m - tail].windows(2).any(|w| w[0] != w[1]) {
            return Err(LatticeError::InvalidMesh("continuous directions must share one mesh size".into()));
        }
        Ok(Self { eps: eps.to_vec(), steps: steps.to_vec(), tail })
    }

    /// `m` continuous directions with mesh size `eps` and `steps` cells each.
    pub fn cube(m: usize, eps: f64, steps: usize) -> Result<Self, LatticeError> {
        Self::with_tail(m, 0, eps, steps)
    }

    /// `m` continuous directions followed by `tail` transformation directions.
    pub fn with_tail(m: usize, tail: usize, eps: f64, steps: usize) -> Result<Self, LatticeError> {
        let mut e = vec![eps; m];
        let mut s = vec![steps; m];
        e.extend(std::iter::repeat(1.0).take(tail));
        s.extend(std::iter::repeat(1).take(tail));
        Self::new(&e, &s, tail)
    }

    /// Number of cells covering `[0, r]` at mesh size `eps` (rounded down,
    /// with a small allowance so that `r = kε` in floating point gives `k`).
    pub fn steps_for(eps: f64, r: f64) -> usize {
        ((r / eps) * (1.0 + 1e-12) + 1e-9).floor() as usize
    }

    /// Mesh derived by an operator, exempt from the tail-shape invariant.
    pub(crate) fn derived(eps: Vec<f64>, steps: Vec<usize>, tail: usize) -> Self {
        Self { eps, steps, tail }
    }

    pub fn dim(&self) -> usize {
        self.eps.len()
    }

    pub fn tail(&self) -> usize {
        self.tail
    }

    /// Number of continuous directions.
    pub fn continuous(&self) -> usize {
        self.dim() - self.tail
    }

    pub fn is_tail(&self, i: usize) -> bool {
        i >= self.continuous()
    }

    pub fn eps(&self, i: usize) -> f64 {
        self.eps[i]
    }

    pub fn eps_all(&self) -> &[f64] {
        &self.eps
    }

    pub fn steps(&self, i: usize) -> usize {
        self.steps[i]
    }

    pub fn steps_all(&self) -> &[usize] {
        &self.steps
    }

    pub fn extent(&self, i: usize) -> f64 {
        self.steps[i] as f64 * self.eps[i]
    }

    pub fn num_sites(&self) -> usize {
        self.steps.iter().map(|s| s + 1).product()
    }

    pub fn contains(&self, site: &[usize]) -> bool {
        site.len() == self.dim() && site.iter().zip(&self.steps).all(|(k, s)| k <= s)
    }

    /// Row-major (lexicographic) linear index.
    pub fn index(&self, site: &[usize]) -> usize {
        debug_assert!(self.contains(site), "site {site:?} outside mesh {:?}", self.steps);
        site.iter().zip(&self.steps).fold(0, |acc, (k, s)| acc * (s + 1) + k)
    }

    pub fn site(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for i in (0..self.dim()).rev() {
            let w = self.steps[i] + 1;
            out[i] = index % w;
            index /= w;
        }
        out
    }

    /// Lattice coordinates `ξ_i = k_i ε_i`.
    pub fn coords(&self, site: &[usize]) -> Vec<f64> {
        site.iter().zip(&self.eps).map(|(k, e)| *k as f64 * e).collect()
    }

    pub fn level(site: &[usize]) -> usize {
        site.iter().sum()
    }

    /// All sites in lexicographic order.
    pub fn sites(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.num_sites()).map(move |i| self.site(i))
    }
}
