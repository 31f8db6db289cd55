use nalgebra::DMatrix;

use crate::lattice::{ComponentSpec, Corner, HyperbolicSystem, StepError};

/// Threshold on `|det| / Π‖row‖` below which a 6×6 block is singular.
pub const BLOCK_DET_TOL: f64 = 1e-12;

/// Rotation coefficients `c_ij` (`i ≠ j`) of one site, stored as a dense
/// `M×M` array whose diagonal is unused.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffMatrix {
    m: usize,
    values: Vec<f64>,
}

impl CoeffMatrix {
    pub fn zeros(m: usize) -> Self {
        Self { m, values: vec![0.0; m * m] }
    }

    pub fn from_fn(m: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut c = Self::zeros(m);
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    c.set(i, j, f(i, j));
                }
            }
        }
        c
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i != j);
        self.values[i * self.m + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i != j, "diagonal coefficients are not defined");
        self.values[i * self.m + j] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

/// Shifted coefficients `τ_i c_kj` for all pairwise distinct `i, j, k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftedCoeffs {
    m: usize,
    values: Vec<f64>,
}

impl ShiftedCoeffs {
    /// `τ_i c_kj`.
    pub fn get(&self, i: usize, k: usize, j: usize) -> f64 {
        self.values[(i * self.m + k) * self.m + j]
    }
}

/// The six orderings `(a, b, c)` of a triple, in a fixed order.
pub(crate) fn permutations(t: [usize; 3]) -> [[usize; 3]; 6] {
    let [a, b, c] = t;
    [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]]
}

/// Solves the 6×6 block of the implicit coefficient equations for the
/// unordered triple `t`. Returns `δ_a c_cb` for the orderings of
/// [`permutations`], in that order.
///
/// The rows are
/// `δ_a c_cb − ε_b c_cb δ_b c_ac − ε_b c_ab δ_b c_ca + ε_a c_ab δ_a c_cb
///  = c_ac c_cb + c_ca c_ab − c_cb c_ab`.
pub fn solve_triple(c: &dyn Fn(usize, usize) -> f64, eps: &[f64], t: [usize; 3]) -> Result<[f64; 6], StepError> {
    solve_block(c, eps, t, false)
}

fn solve_block(
    c: &dyn Fn(usize, usize) -> f64,
    eps: &[f64],
    t: [usize; 3],
    drop_last: bool,
) -> Result<[f64; 6], StepError> {
    let perms = permutations(t);
    let pos = |p: [usize; 3]| perms.iter().position(|q| *q == p).expect("ordering of the triple");
    let mut mat = DMatrix::<f64>::zeros(6, 6);
    let mut rhs = [0.0; 6];
    for (row, &[a, b, cc]) in perms.iter().enumerate() {
        mat[(row, row)] += 1.0 + eps[a] * c(a, b);
        mat[(row, pos([b, cc, a]))] -= eps[b] * c(cc, b);
        mat[(row, pos([b, a, cc]))] -= eps[b] * c(a, b);
        rhs[row] = c(a, cc) * c(cc, b) + c(cc, a) * c(a, b);
        if !drop_last {
            rhs[row] -= c(cc, b) * c(a, b);
        }
    }
    // Hadamard ratio: |det| relative to the product of the row norms
    let rows: f64 = (0..6).map(|r| mat.row(r).norm()).product();
    let det = mat.determinant();
    if !(det.abs() >= BLOCK_DET_TOL * rows) {
        return Err(StepError::Singular { what: "coefficient block", det });
    }
    let sol = crate::linalg::lu_solve(mat, &rhs).ok_or(StepError::Singular { what: "coefficient block", det })?;
    let mut out = [0.0; 6];
    out.copy_from_slice(&sol);
    Ok(out)
}

/// Solves all blocks of the implicit coefficient equations at one site and
/// returns every `τ_i c_kj = c_kj + ε_i δ_i c_kj`.
pub fn dcn_step_c(c: &CoeffMatrix, eps: &[f64]) -> Result<ShiftedCoeffs, StepError> {
    let m = c.dim();
    assert_eq!(eps.len(), m, "one mesh size per direction");
    let mut values = vec![f64::NAN; m * m * m];
    for a in 0..m {
        for b in a + 1..m {
            for d in b + 1..m {
                let t = [a, b, d];
                let delta = solve_triple(&|i, j| c.get(i, j), eps, t)?;
                for (p, &[i, j, k]) in permutations(t).iter().enumerate() {
                    values[(i * m + k) * m + j] = c.get(k, j) + eps[i] * delta[p];
                }
            }
        }
    }
    Ok(ShiftedCoeffs { m, values })
}

/// The first-order system for discrete conjugate nets in `M` directions:
/// `δ_i x = w_i`, `δ_i w_j = c_ji w_i + c_ij w_j`, and the implicit
/// equations for `c`.
///
/// Components are `x`, then `w_0..w_{M-1}`, then `c_ij` for ordered pairs.
#[derive(Clone, Debug)]
pub struct ConjugateSystem {
    m: usize,
    n: usize,
    comps: Vec<ComponentSpec>,
    drop_term: bool,
}

impl ConjugateSystem {
    pub fn new(m: usize, n: usize) -> Self {
        let all: Vec<usize> = (0..m).collect();
        let mut comps = vec![ComponentSpec::new("x", n, all.clone())];
        for i in 0..m {
            comps.push(ComponentSpec::new(format!("w{}", i + 1), n, all.iter().copied().filter(|&d| d != i).collect()));
        }
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    let ev = all.iter().copied().filter(|&d| d != i && d != j).collect();
                    comps.push(ComponentSpec::new(format!("c{}{}", i + 1, j + 1), 1, ev));
                }
            }
        }
        Self { m, n, comps, drop_term: false }
    }

    /// A deliberately wrong variant that drops the term `−c_kj c_ij` from
    /// the coefficient equations; used as a negative control.
    #[doc(hidden)]
    pub fn broken(m: usize, n: usize) -> Self {
        Self { drop_term: true, ..Self::new(m, n) }
    }

    pub fn directions(&self) -> usize {
        self.m
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> usize {
        0
    }

    pub fn w(&self, i: usize) -> usize {
        1 + i
    }

    pub fn c(&self, i: usize, j: usize) -> usize {
        assert!(i != j && i < self.m && j < self.m);
        1 + self.m + i * (self.m - 1) + if j > i { j - 1 } else { j }
    }

    /// Corner values in component order, for [`crate::lattice::consistency_residual`].
    pub fn corner_values(&self, x: &[f64], w: &[Vec<f64>], c: &CoeffMatrix) -> Vec<Vec<f64>> {
        let mut out = vec![x.to_vec()];
        out.extend(w.iter().cloned());
        for i in 0..self.m {
            for j in 0..self.m {
                if i != j {
                    out.push(vec![c.get(i, j)]);
                }
            }
        }
        out
    }

    fn decode(&self, k: usize) -> Kind {
        if k == 0 {
            Kind::X
        } else if k <= self.m {
            Kind::W(k - 1)
        } else {
            let r = k - 1 - self.m;
            let i = r / (self.m - 1);
            let jj = r % (self.m - 1);
            Kind::C(i, if jj >= i { jj + 1 } else { jj })
        }
    }
}

enum Kind {
    X,
    W(usize),
    C(usize, usize),
}

impl HyperbolicSystem for ConjugateSystem {
    fn dim(&self) -> usize {
        self.m
    }

    fn components(&self) -> &[ComponentSpec] {
        &self.comps
    }

    fn dependencies(&self, k: usize, dir: usize) -> Vec<usize> {
        match self.decode(k) {
            Kind::X => vec![self.x(), self.w(dir)],
            Kind::W(j) => vec![self.w(dir), self.w(j), self.c(j, dir), self.c(dir, j)],
            Kind::C(a, b) => {
                let t = [dir, a, b];
                let mut out = Vec::new();
                for p in t {
                    for q in t {
                        if p != q {
                            out.push(self.c(p, q));
                        }
                    }
                }
                out
            }
        }
    }

    fn step(&self, k: usize, i: usize, eps: &[f64], corner: &Corner<'_>) -> Result<Vec<f64>, StepError> {
        match self.decode(k) {
            Kind::X => {
                let (x, w) = (corner.get(self.x())?, corner.get(self.w(i))?);
                Ok(x.iter().zip(w).map(|(a, b)| a + eps[i] * b).collect())
            }
            Kind::W(j) => {
                let wi = corner.get(self.w(i))?;
                let wj = corner.get(self.w(j))?;
                let cji = corner.get(self.c(j, i))?[0];
                let cij = corner.get(self.c(i, j))?[0];
                Ok(wj.iter().zip(wi).map(|(b, a)| b + eps[i] * (cji * a + cij * b)).collect())
            }
            Kind::C(kk, j) => {
                // τ_i c_kj from the block of the triple {i, j, k}
                let t = [i, j, kk];
                let mut vals = [[0.0; 3]; 3];
                for (p, &a) in t.iter().enumerate() {
                    for (q, &b) in t.iter().enumerate() {
                        if p != q {
                            vals[p][q] = corner.get(self.c(a, b))?[0];
                        }
                    }
                }
                let lookup = |a: usize, b: usize| {
                    let p = t.iter().position(|&v| v == a).expect("index of triple");
                    let q = t.iter().position(|&v| v == b).expect("index of triple");
                    vals[p][q]
                };
                let delta = solve_block(&lookup, eps, sorted(t), self.drop_term)?;
                let p = permutations(sorted(t)).iter().position(|q| *q == [i, j, kk]).expect("ordering");
                Ok(vec![lookup(kk, j) + eps[i] * delta[p]])
            }
        }
    }
}

fn sorted(mut t: [usize; 3]) -> [usize; 3] {
    t.sort_unstable();
    t
}
