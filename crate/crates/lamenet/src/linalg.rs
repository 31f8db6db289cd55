//! Small dense helpers on `f64` slices, plus thin wrappers over `nalgebra`.

use nalgebra::DMatrix;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `a + s·b`.
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Largest pairwise distance in a point set.
pub fn diameter(points: &[&[f64]]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max(dist(p, q));
        }
    }
    d
}

/// Singular values of the matrix whose rows are `rows`, in decreasing order.
pub fn singular_values(rows: &[Vec<f64>]) -> Vec<f64> {
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// The `k`-th singular value (0-based, decreasing) of the row matrix, or 0
/// when the matrix has fewer than `k+1` of them.
pub fn singular_value(rows: &[Vec<f64>], k: usize) -> f64 {
    singular_values(rows).get(k).copied().unwrap_or(0.0)
}

/// Solves the square system `a·x = b` by LU with partial pivoting.
pub fn lu_solve(a: DMatrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let rhs = nalgebra::DVector::from_column_slice(b);
    a.lu().solve(&rhs).map(|x| x.iter().copied().collect())
}
