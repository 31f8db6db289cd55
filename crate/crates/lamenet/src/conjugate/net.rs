use super::coeffs::{coplanarity_residual, spread};
use super::system::ConjugateSystem;
use super::ConjugateError;
use crate::lattice::{goursat_solve, FillOrder, GoursatSolution, HyperbolicSystem, LatticeField, MeshSpec};
use crate::linalg::norm;

/// Goursat data for a discrete conjugate net: the point at the origin, the
/// edge vectors `w_i` on the axes and the rotation coefficients `c_ij` on
/// the coordinate planes. Tail (Jonas) directions carry `w_M(0) = x⁺ − x`
/// and `c_Mi, c_iM` on the axes of the continuous directions.
#[derive(Clone, Debug)]
pub struct ConjugateGoursat {
    mesh: MeshSpec,
    origin: Vec<f64>,
    edges: Vec<Vec<Vec<f64>>>,
    coeffs: Vec<LatticeField>,
}

impl ConjugateGoursat {
    /// Samples `edge(i, k)` for `w_i` at `k·e_i` and `coeff(i, j, site)` for
    /// `c_ij` on the plane `(i, j)`.
    pub fn from_fns(
        mesh: &MeshSpec,
        origin: Vec<f64>,
        edge: impl Fn(usize, usize) -> Vec<f64>,
        coeff: impl Fn(usize, usize, &[usize]) -> f64,
    ) -> Result<Self, ConjugateError> {
        let m = mesh.dim();
        let n = origin.len();
        let mut edges = Vec::with_capacity(m);
        for i in 0..m {
            let row: Vec<Vec<f64>> = (0..mesh.steps(i)).map(|k| edge(i, k)).collect();
            if let Some(bad) = row.iter().find(|w| w.len() != n) {
                return Err(ConjugateError::DataMismatch(format!("edge {i} has length {}, expected {n}", bad.len())));
            }
            edges.push(row);
        }
        let mut coeffs = Vec::with_capacity(m * m.saturating_sub(1));
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let mut f = LatticeField::empty(mesh.clone(), 1);
                for site in mesh.sites() {
                    let on_plane = (0..m).all(|d| d == i || d == j || site[d] == 0);
                    if on_plane && site[i] < mesh.steps(i) && site[j] < mesh.steps(j) {
                        f.set(&site, &[coeff(i, j, &site)]);
                    }
                }
                coeffs.push(f);
            }
        }
        Ok(Self { mesh: mesh.clone(), origin, edges, coeffs })
    }

    /// Data from curves `X_i` on the axes and coefficient functions on the
    /// planes, evaluated at the physical coordinates of each site. The
    /// edges are the exact difference quotients `δ_i X_i`.
    pub fn from_curves(
        mesh: &MeshSpec,
        curves: &[&dyn Fn(f64) -> Vec<f64>],
        coeff: impl Fn(usize, usize, &[f64]) -> f64,
    ) -> Result<Self, ConjugateError> {
        if curves.len() != mesh.dim() || mesh.tail() != 0 {
            return Err(ConjugateError::DataMismatch(format!(
                "{} curves for a mesh with {} continuous directions",
                curves.len(),
                mesh.dim()
            )));
        }
        let origin = curves[0](0.0);
        for (i, c) in curves.iter().enumerate() {
            let p = c(0.0);
            let gap = p.iter().zip(&origin).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if gap > 1e-12 * (1.0 + norm(&origin)) {
                return Err(ConjugateError::DataMismatch(format!("curve {i} misses the common point")));
            }
        }
        let edge = |i: usize, k: usize| {
            let e = mesh.eps(i);
            let (a, b) = (curves[i](k as f64 * e), curves[i]((k + 1) as f64 * e));
            b.iter().zip(&a).map(|(p, q)| (p - q) / e).collect()
        };
        Self::from_fns(mesh, origin, edge, |i, j, site| coeff(i, j, &mesh.coords(site)))
    }

    pub fn mesh(&self) -> &MeshSpec {
        &self.mesh
    }

    pub fn ambient_dim(&self) -> usize {
        self.origin.len()
    }
}

/// A solved discrete conjugate net with its edge and coefficient fields.
#[derive(Clone, Debug)]
pub struct ConjugateNet {
    system: ConjugateSystem,
    solution: GoursatSolution,
}

/// Solves the Goursat problem for a discrete conjugate net.
pub fn solve_conjugate_net(data: &ConjugateGoursat) -> Result<ConjugateNet, ConjugateError> {
    let mesh = &data.mesh;
    let m = mesh.dim();
    let sys = ConjugateSystem::new(m, data.ambient_dim());
    let mut pair_of = vec![None; sys.components().len()];
    let mut slot = 0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                pair_of[sys.c(i, j)] = Some(slot);
                slot += 1;
            }
        }
    }
    let lookup = |k: usize, site: &[usize]| -> Vec<f64> {
        if k == sys.x() {
            data.origin.clone()
        } else if k <= m {
            let i = k - 1;
            data.edges[i][site[i]].clone()
        } else {
            let p = pair_of[k].expect("coefficient component");
            data.coeffs[p].at(site).to_vec()
        }
    };
    let solution = goursat_solve(&sys, &lookup, mesh, FillOrder::Forward)?;
    Ok(ConjugateNet { system: sys, solution })
}

impl ConjugateNet {
    pub fn mesh(&self) -> &MeshSpec {
        &self.solution.mesh
    }

    /// The point field `x`.
    pub fn points(&self) -> &LatticeField {
        self.solution.field(self.system.x())
    }

    pub fn point(&self, site: &[usize]) -> &[f64] {
        self.points().at(site)
    }

    /// `w_i` at `site`, where defined.
    pub fn edge(&self, i: usize, site: &[usize]) -> Option<&[f64]> {
        self.solution.field(self.system.w(i)).get(site)
    }

    /// `c_ij` at `site`, where defined.
    pub fn coeff(&self, i: usize, j: usize, site: &[usize]) -> Option<f64> {
        self.solution.field(self.system.c(i, j)).get(site).map(|v| v[0])
    }

    /// The restriction of `x` to a layer with fixed tail coordinates, as a
    /// field on the continuous directions.
    pub fn layer(&self, tail: &[usize]) -> LatticeField {
        let mesh = self.mesh();
        let mc = mesh.continuous();
        assert_eq!(tail.len(), mesh.tail(), "one value per tail direction");
        let sub = MeshSpec::derived(mesh.eps_all()[..mc].to_vec(), mesh.steps_all()[..mc].to_vec(), 0);
        LatticeField::from_fn(sub, self.points().width(), |s| {
            let full: Vec<usize> = s.iter().chain(tail).copied().collect();
            self.point(&full).to_vec()
        })
    }

    fn quads(&self) -> impl Iterator<Item = (usize, usize, Vec<usize>)> + '_ {
        let mesh = self.mesh();
        let m = mesh.dim();
        mesh.sites().flat_map(move |site| {
            let mut out = Vec::new();
            for i in 0..m {
                for j in i + 1..m {
                    if site[i] < mesh.steps(i) && site[j] < mesh.steps(j) {
                        out.push((i, j, site.clone()));
                    }
                }
            }
            out
        })
    }

    fn quad_points(&self, i: usize, j: usize, site: &[usize]) -> [&[f64]; 4] {
        let mut si = site.to_vec();
        si[i] += 1;
        let mut sj = site.to_vec();
        sj[j] += 1;
        let mut sij = si.clone();
        sij[j] += 1;
        [self.point(site), self.point(&si), self.point(&sj), self.point(&sij)]
    }

    /// Largest planarity defect `σ_3 / scale` over all elementary quads,
    /// with `scale` the longest distance between the quad's vertices.
    pub fn planarity_residual(&self) -> f64 {
        self.quads()
            .map(|(i, j, site)| {
                let q = self.quad_points(i, j, &site);
                coplanarity_residual(&q) / spread(&q).max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }

    /// Largest relative defect of `δ_iδ_j x = c_ji δ_i x + c_ij δ_j x`.
    pub fn dcn_residual(&self) -> f64 {
        let mesh = self.mesh();
        self.quads()
            .map(|(i, j, site)| {
                let [x, xi, xj, xij] = self.quad_points(i, j, &site);
                let (ei, ej) = (mesh.eps(i), mesh.eps(j));
                let cij = self.coeff(i, j, &site).expect("coefficient on the quad");
                let cji = self.coeff(j, i, &site).expect("coefficient on the quad");
                let mut defect: f64 = 0.0;
                let mut size: f64 = 0.0;
                for k in 0..x.len() {
                    let di = (xi[k] - x[k]) / ei;
                    let dj = (xj[k] - x[k]) / ej;
                    let dij = (xij[k] - xi[k] - xj[k] + x[k]) / (ei * ej);
                    defect = defect.max((dij - cji * di - cij * dj).abs());
                    size = size.max(di.abs()).max(dj.abs()).max(dij.abs());
                }
                defect / size.max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }
}

/// Coplanarity of corresponding points of the four nets
/// `x(·,0,0), x(·,1,0), x(·,0,1), x(·,1,1)` of a solved net with two tail
/// directions: the largest per-site `σ_3 / scale`.
///
/// Panics if the net does not have exactly two tail directions.
pub fn jonas_permutability_check(net: &ConjugateNet) -> f64 {
    let mesh = net.mesh();
    assert_eq!(mesh.tail(), 2, "permutability needs two Jonas directions");
    let mc = mesh.continuous();
    mesh.sites()
        .filter(|s| s[mc] == 0 && s[mc + 1] == 0)
        .map(|s| {
            let q = net.quad_points(mc, mc + 1, &s);
            coplanarity_residual(&q) / spread(&q).max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}
