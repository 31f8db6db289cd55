use std::ops::{Add, Mul, Neg, Sub};

use smallvec::SmallVec;

/// A vector of the Minkowski space ℝ^{N+1,1}.
///
/// Coordinates are taken in the basis `e_1..e_{N+2}`; the last basis vector
/// is timelike.
#[derive(Clone, Debug, PartialEq)]
pub struct MinkowskiVector {
    coords: SmallVec<[f64; 8]>,
}

impl MinkowskiVector {
    /// Builds a vector from its `N+2` coordinates.
    ///
    /// # Panics
    /// If fewer than three coordinates are given.
    pub fn new(coords: &[f64]) -> Self {
        assert!(coords.len() >= 3, "Minkowski vectors need N + 2 >= 3 coordinates");
        Self { coords: SmallVec::from_slice(coords) }
    }

    pub fn zero(n: usize) -> Self {
        Self { coords: SmallVec::from_elem(0.0, n + 2) }
    }

    /// The basis vector `e_k`, with `k` counted from 1 up to `N+2`.
    pub fn basis(n: usize, k: usize) -> Self {
        assert!((1..=n + 2).contains(&k), "basis index {k} out of range for N = {n}");
        let mut v = Self::zero(n);
        v.coords[k - 1] = 1.0;
        v
    }

    /// `e_0 = (e_{N+2} + e_{N+1})/2`, the lift of the origin.
    pub fn e0(n: usize) -> Self {
        let mut v = Self::zero(n);
        v.coords[n] = 0.5;
        v.coords[n + 1] = 0.5;
        v
    }

    /// `e_∞ = (e_{N+2} − e_{N+1})/2`, the point at infinity.
    pub fn e_inf(n: usize) -> Self {
        let mut v = Self::zero(n);
        v.coords[n] = -0.5;
        v.coords[n + 1] = 0.5;
        v
    }

    /// Embeds a Euclidean vector of ℝ^N as `Σ v_k e_k`.
    pub fn from_euclidean(v: &[f64]) -> Self {
        let mut out = Self::zero(v.len());
        out.coords[..v.len()].copy_from_slice(v);
        out
    }

    /// The Euclidean dimension `N`.
    pub fn n(&self) -> usize {
        self.coords.len() - 2
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// The first `N` coordinates.
    pub fn euclidean_part(&self) -> &[f64] {
        &self.coords[..self.n()]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        lorentz_dot(self, other)
    }

    pub fn norm_sq(&self) -> f64 {
        lorentz_dot(self, self)
    }

    /// Largest absolute coordinate.
    pub fn max_abs(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Sum of squared coordinates (Euclidean, not Lorentzian).
    pub fn coord_norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { coords: self.coords.iter().map(|c| c * s).collect() }
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        assert_eq!(self.coords.len(), other.coords.len());
        Self { coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + s * b).collect() }
    }
}

/// Lorentz product `Σ_{k≤N+1} u_k v_k − u_{N+2} v_{N+2}`.
pub fn lorentz_dot(u: &MinkowskiVector, v: &MinkowskiVector) -> f64 {
    assert_eq!(u.coords.len(), v.coords.len(), "dimension mismatch");
    let last = u.coords.len() - 1;
    let space: f64 = u.coords[..last].iter().zip(&v.coords[..last]).map(|(a, b)| a * b).sum();
    space - u.coords[last] * v.coords[last]
}

impl Add for &MinkowskiVector {
    type Output = MinkowskiVector;
    fn add(self, rhs: Self) -> MinkowskiVector {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &MinkowskiVector {
    type Output = MinkowskiVector;
    fn sub(self, rhs: Self) -> MinkowskiVector {
        self.axpy(-1.0, rhs)
    }
}

impl Neg for &MinkowskiVector {
    type Output = MinkowskiVector;
    fn neg(self) -> MinkowskiVector {
        self.scaled(-1.0)
    }
}

impl Mul<f64> for &MinkowskiVector {
    type Output = MinkowskiVector;
    fn mul(self, rhs: f64) -> MinkowskiVector {
        self.scaled(rhs)
    }
}

impl Add for MinkowskiVector {
    type Output = MinkowskiVector;
    fn add(self, rhs: Self) -> MinkowskiVector {
        &self + &rhs
    }
}

impl Sub for MinkowskiVector {
    type Output = MinkowskiVector;
    fn sub(self, rhs: Self) -> MinkowskiVector {
        &self - &rhs
    }
}

impl Mul<f64> for MinkowskiVector {
    type Output = MinkowskiVector;
    fn mul(self, rhs: f64) -> MinkowskiVector {
        self.scaled(rhs)
    }
}
