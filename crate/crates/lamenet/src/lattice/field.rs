use super::{LatticeError, MeshSpec};

/// Vector-valued data on the sites of a mesh. Sites may be undefined (for
/// instance components outside their domain of definition).
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeField {
    mesh: MeshSpec,
    width: usize,
    values: Vec<f64>,
    defined: Vec<bool>,
}

impl LatticeField {
    /// A field with every site undefined.
    pub fn empty(mesh: MeshSpec, width: usize) -> Self {
        let n = mesh.num_sites();
        Self { mesh, width, values: vec![f64::NAN; n * width], defined: vec![false; n] }
    }

    pub fn from_fn(mesh: MeshSpec, width: usize, mut f: impl FnMut(&[usize]) -> Vec<f64>) -> Self {
        let mut out = Self::empty(mesh, width);
        for i in 0..out.mesh.num_sites() {
            let site = out.mesh.site(i);
            let v = f(&site);
            out.set(&site, &v);
        }
        out
    }

    pub fn mesh(&self) -> &MeshSpec {
        &self.mesh
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, site: &[usize]) -> Option<&[f64]> {
        let i = self.mesh.index(site);
        self.defined[i].then(|| &self.values[i * self.width..(i + 1) * self.width])
    }

    pub fn get_index(&self, i: usize) -> Option<&[f64]> {
        self.defined[i].then(|| &self.values[i * self.width..(i + 1) * self.width])
    }

    /// The value at `site`; panics if it is undefined.
    pub fn at(&self, site: &[usize]) -> &[f64] {
        self.get(site).unwrap_or_else(|| panic!("undefined value at {site:?}"))
    }

    pub fn set(&mut self, site: &[usize], v: &[f64]) {
        assert_eq!(v.len(), self.width, "value width mismatch");
        let i = self.mesh.index(site);
        self.values[i * self.width..(i + 1) * self.width].copy_from_slice(v);
        self.defined[i] = true;
    }

    pub fn is_defined(&self, site: &[usize]) -> bool {
        self.defined[self.mesh.index(site)]
    }

    pub fn is_complete(&self) -> bool {
        self.defined.iter().all(|d| *d)
    }

    /// Raw storage (row-major; undefined sites hold NaN).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Pointwise `self − other` on a common mesh.
    pub fn sub(&self, other: &LatticeField) -> Result<LatticeField, LatticeError> {
        if self.mesh != other.mesh || self.width != other.width {
            return Err(LatticeError::InvalidMesh("field shapes differ".into()));
        }
        let mut out = LatticeField::empty(self.mesh.clone(), self.width);
        for i in 0..self.mesh.num_sites() {
            if let (Some(a), Some(b)) = (self.get_index(i), other.get_index(i)) {
                let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                out.set(&self.mesh.site(i), &d);
            }
        }
        Ok(out)
    }

    /// `τ_i f`, defined on the sites where `ξ + ε_i e_i` is in the box.
    pub fn shift(&self, i: usize) -> Result<LatticeField, LatticeError> {
        self.derived(i, |next, _| next.to_vec())
    }

    /// `δ_i f = (τ_i f − f)/ε_i`.
    pub fn diff(&self, i: usize) -> Result<LatticeField, LatticeError> {
        let e = self.mesh.eps(i);
        self.derived(i, |next, cur| next.iter().zip(cur).map(|(a, b)| (a - b) / e).collect())
    }

    fn derived(&self, i: usize, op: impl Fn(&[f64], &[f64]) -> Vec<f64>) -> Result<LatticeField, LatticeError> {
        if i >= self.mesh.dim() || self.mesh.steps(i) == 0 {
            return Err(LatticeError::OutOfBounds { dir: i });
        }
        let mut steps = self.mesh.steps_all().to_vec();
        steps[i] -= 1;
        let mesh = MeshSpec::derived(self.mesh.eps_all().to_vec(), steps, self.mesh.tail());
        let mut out = LatticeField::empty(mesh, self.width);
        for idx in 0..out.mesh.num_sites() {
            let site = out.mesh.site(idx);
            let mut up = site.clone();
            up[i] += 1;
            if let (Some(a), Some(b)) = (self.get(&up), self.get(&site)) {
                let v = op(a, b);
                out.set(&site, &v);
            }
        }
        Ok(out)
    }

    /// `‖f‖_ℓ = sup |δ^α f(ξ)|` over multi-indices `|α| ≤ ℓ` supported on the
    /// continuous directions, with `ξ` in the box shrunk by `|α|` steps in
    /// every continuous direction. Values are measured in the Euclidean norm.
    pub fn cl_norm(&self, order: usize) -> Result<f64, LatticeError> {
        let m = self.mesh.continuous();
        let max = (0..m).map(|i| self.mesh.steps(i)).min().unwrap_or(0);
        if order > max {
            return Err(LatticeError::OrderTooLarge { order, max });
        }
        let mut best: f64 = 0.0;
        for alpha in multi_indices(m, order) {
            let total: usize = alpha.iter().sum();
            let mut f = self.clone();
            for (i, &a) in alpha.iter().enumerate() {
                for _ in 0..a {
                    f = f.diff(i)?;
                }
            }
            for idx in 0..f.mesh.num_sites() {
                let site = f.mesh.site(idx);
                let inside = (0..m).all(|i| site[i] + total <= self.mesh.steps(i));
                if !inside {
                    continue;
                }
                let v = f.get(&site).ok_or_else(|| LatticeError::UndefinedValue { site: site.clone() })?;
                best = best.max(v.iter().map(|x| x * x).sum::<f64>().sqrt());
            }
        }
        Ok(best)
    }
}

/// All multi-indices in `m` variables with total degree at most `order`.
fn multi_indices(m: usize, order: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0; m]];
    for _ in 0..order {
        let mut next = Vec::new();
        for a in &out {
            for i in 0..m {
                let mut b = a.clone();
                b[i] += 1;
                if !out.contains(&b) && !next.contains(&b) {
                    next.push(b);
                }
            }
        }
        out.extend(next);
    }
    out
}
