use std::ops::{Add, Mul, Neg, Sub};

use smallvec::SmallVec;

use super::vector::MinkowskiVector;

/// An element of the Clifford algebra 𝒞(N+1,1).
///
/// Coefficients are stored densely, indexed by blade bitmask: bit `k` stands
/// for `e_{k+1}`. The algebra relation is `uv + vu = −2⟨u,v⟩`, so spacelike
/// basis vectors square to −1 and `e_{N+2}` squares to +1.
#[derive(Clone, Debug, PartialEq)]
pub struct Multivector {
    n: usize,
    coeffs: SmallVec<[f64; 32]>,
}

/// Sign of `e_A e_B = sign · e_{A xor B}` for basis blades given as bitmasks.
pub fn blade_sign(n: usize, a: usize, b: usize) -> f64 {
    let mut swaps = 0u32;
    let mut x = a >> 1;
    while x != 0 {
        swaps += (x & b).count_ones();
        x >>= 1;
    }
    let mut sign = if swaps % 2 == 0 { 1.0 } else { -1.0 };
    let common = a & b;
    // every common spacelike generator contributes e_k² = −1
    let timelike = 1usize << (n + 1);
    let spacelike_common = (common & !timelike).count_ones();
    if spacelike_common % 2 == 1 {
        sign = -sign;
    }
    sign
}

impl Multivector {
    pub fn zero(n: usize) -> Self {
        Self { n, coeffs: SmallVec::from_elem(0.0, 1 << (n + 2)) }
    }

    pub fn scalar(n: usize, s: f64) -> Self {
        let mut m = Self::zero(n);
        m.coeffs[0] = s;
        m
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    pub fn from_vector(v: &MinkowskiVector) -> Self {
        let mut m = Self::zero(v.n());
        for (k, c) in v.coords().iter().enumerate() {
            m.coeffs[1 << k] = *c;
        }
        m
    }

    /// Builds a multivector from its full coefficient list (length `2^{N+2}`).
    pub fn from_coeffs(n: usize, coeffs: &[f64]) -> Self {
        assert_eq!(coeffs.len(), 1 << (n + 2), "wrong coefficient count");
        Self { n, coeffs: SmallVec::from_slice(coeffs) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, blade: usize) -> f64 {
        self.coeffs[blade]
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    /// The grade-1 part as a Minkowski vector.
    pub fn vector_part(&self) -> MinkowskiVector {
        let d = self.n + 2;
        let c: SmallVec<[f64; 8]> = (0..d).map(|k| self.coeffs[1 << k]).collect();
        MinkowskiVector::new(&c)
    }

    pub fn grade_part(&self, g: u32) -> Self {
        let mut out = Self::zero(self.n);
        for (i, c) in self.coeffs.iter().enumerate() {
            if i.count_ones() == g {
                out.coeffs[i] = *c;
            }
        }
        out
    }

    /// Reversion: reverses the order of generators in every blade.
    pub fn reverse(&self) -> Self {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let g = i.count_ones();
            if (g * g.saturating_sub(1) / 2) % 2 == 1 {
                *c = -*c;
            }
        }
        out
    }

    /// Grade involution: negates odd grades.
    pub fn grade_involution(&self) -> Self {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            if i.count_ones() % 2 == 1 {
                *c = -*c;
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Sum of squared coefficients of blades with even (`true`) or odd grade.
    pub fn parity_mass(&self, even: bool) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| (i.count_ones() % 2 == 0) == even)
            .map(|(_, c)| c * c)
            .sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { n: self.n, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn geometric_product(&self, other: &Self) -> Self {
        geometric_product(self, other)
    }
}

/// The Clifford product of two multivectors.
pub fn geometric_product(a: &Multivector, b: &Multivector) -> Multivector {
    assert_eq!(a.n, b.n, "dimension mismatch");
    let mut out = Multivector::zero(a.n);
    for (i, &x) in a.coeffs.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.coeffs.iter().enumerate() {
            if y == 0.0 {
                continue;
            }
            out.coeffs[i ^ j] += blade_sign(a.n, i, j) * x * y;
        }
    }
    out
}

impl Mul for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: Self) -> Multivector {
        geometric_product(self, rhs)
    }
}

impl Mul for Multivector {
    type Output = Multivector;
    fn mul(self, rhs: Self) -> Multivector {
        geometric_product(&self, &rhs)
    }
}

impl Mul<f64> for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: f64) -> Multivector {
        self.scaled(rhs)
    }
}

impl Add for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: Self) -> Multivector {
        assert_eq!(self.n, rhs.n);
        Multivector { n: self.n, coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: Self) -> Multivector {
        assert_eq!(self.n, rhs.n);
        Multivector { n: self.n, coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scaled(-1.0)
    }
}

impl Add for Multivector {
    type Output = Multivector;
    fn add(self, rhs: Self) -> Multivector {
        &self + &rhs
    }
}

impl Sub for Multivector {
    type Output = Multivector;
    fn sub(self, rhs: Self) -> Multivector {
        &self - &rhs
    }
}

impl Neg for Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scaled(-1.0)
    }
}
