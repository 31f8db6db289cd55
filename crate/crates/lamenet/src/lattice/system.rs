use super::{LatticeError, LatticeField, MeshSpec};

/// One dependent variable of a hyperbolic lattice system.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentSpec {
    pub name: String,
    pub width: usize,
    /// Directions in which the component evolves; the others are static.
    pub evolution: Vec<usize>,
}

impl ComponentSpec {
    pub fn new(name: impl Into<String>, width: usize, evolution: Vec<usize>) -> Self {
        Self { name: name.into(), width, evolution }
    }

    pub fn evolves_in(&self, dir: usize) -> bool {
        self.evolution.contains(&dir)
    }
}

/// Why a local step rule refused to produce a value.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StepError {
    #[error("negative radicand in {quantity} ({value:e})")]
    SqrtDomain { quantity: &'static str, value: f64 },
    #[error("singular local solve in {what} (determinant {det:e})")]
    Singular { what: &'static str, det: f64 },
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("rule read component {0}, which it did not declare")]
    Undeclared(usize),
    #[error("rule produced a non-finite value")]
    NonFinite,
}

/// Read access to the component values at the base corner of a step.
pub struct Corner<'a> {
    values: Vec<Option<&'a [f64]>>,
}

impl<'a> Corner<'a> {
    pub fn new(values: Vec<Option<&'a [f64]>>) -> Self {
        Self { values }
    }

    pub fn get(&self, component: usize) -> Result<&'a [f64], StepError> {
        self.values.get(component).copied().flatten().ok_or(StepError::Undeclared(component))
    }
}

/// A consistent first-order hyperbolic system on a lattice.
///
/// Component `k` evolves in the directions `components()[k].evolution`; its
/// step in direction `j` reads the components returned by
/// `dependencies(k, j)` at the base corner. Each dependency `ℓ` must evolve in
/// every direction in which `k` evolves, except possibly `j`.
pub trait HyperbolicSystem {
    fn dim(&self) -> usize;
    fn components(&self) -> &[ComponentSpec];
    fn dependencies(&self, component: usize, dir: usize) -> Vec<usize>;
    /// `τ_dir u_component` from the values at the base corner.
    fn step(&self, component: usize, dir: usize, eps: &[f64], corner: &Corner<'_>) -> Result<Vec<f64>, StepError>;
}

/// Goursat data: the value of `component` at a site of its static subspace.
pub trait GoursatData {
    fn value(&self, component: usize, site: &[usize]) -> Vec<f64>;
}

impl<F: Fn(usize, &[usize]) -> Vec<f64>> GoursatData for F {
    fn value(&self, component: usize, site: &[usize]) -> Vec<f64> {
        self(component, site)
    }
}

/// Order in which the driver visits sites within a level, and which
/// admissible direction it steps from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FillOrder {
    /// Lexicographic sites, stepping in the smallest admissible direction.
    #[default]
    Forward,
    /// Reverse lexicographic sites, stepping in the largest admissible direction.
    Reversed,
}

/// The solved fields of a Goursat problem, one per component.
#[derive(Clone, Debug)]
pub struct GoursatSolution {
    pub mesh: MeshSpec,
    pub fields: Vec<LatticeField>,
}

impl GoursatSolution {
    pub fn field(&self, k: usize) -> &LatticeField {
        &self.fields[k]
    }
}

/// Checks the dependency structure of a system.
pub fn validate_system(sys: &dyn HyperbolicSystem) -> Result<(), LatticeError> {
    let comps = sys.components();
    for (k, c) in comps.iter().enumerate() {
        if let Some(d) = c.evolution.iter().find(|d| **d >= sys.dim()) {
            return Err(LatticeError::InvalidSystem(format!("{}: direction {d} out of range", c.name)));
        }
        for &j in &c.evolution {
            for l in sys.dependencies(k, j) {
                let dep = comps
                    .get(l)
                    .ok_or_else(|| LatticeError::InvalidSystem(format!("{}: unknown dependency {l}", c.name)))?;
                if let Some(i) = c.evolution.iter().find(|i| **i != j && !dep.evolves_in(**i)) {
                    return Err(LatticeError::InvalidSystem(format!(
                        "{} stepping in {j} reads {}, which is static in direction {i}",
                        c.name, dep.name
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Whether component `spec` is needed at `site`: every static direction must
/// still have room for one step.
fn in_domain(spec: &ComponentSpec, mesh: &MeshSpec, site: &[usize]) -> bool {
    (0..mesh.dim()).all(|s| spec.evolves_in(s) || site[s] < mesh.steps(s))
}

/// Solves the Goursat problem for `sys` on `mesh`.
///
/// Sites are visited level by level (`Σ k_i`), lexicographically within a
/// level for [`FillOrder::Forward`]. Each component is stored where it is
/// needed, i.e. where every static direction still has a forward neighbour;
/// data is read on the static subspaces, all other values are stepped from a
/// neighbour on the previous level. The first failing step is reported as a
/// [`LatticeError::DomainViolation`].
pub fn goursat_solve(
    sys: &dyn HyperbolicSystem,
    data: &dyn GoursatData,
    mesh: &MeshSpec,
    order: FillOrder,
) -> Result<GoursatSolution, LatticeError> {
    validate_system(sys)?;
    if mesh.dim() != sys.dim() {
        return Err(LatticeError::InvalidMesh(format!("system has {} directions, mesh {}", sys.dim(), mesh.dim())));
    }
    let comps = sys.components();
    let mut fields: Vec<LatticeField> = comps.iter().map(|c| LatticeField::empty(mesh.clone(), c.width)).collect();

    let mut sites: Vec<Vec<usize>> = mesh.sites().collect();
    match order {
        FillOrder::Forward => sites.sort_by_key(|s| MeshSpec::level(s)),
        FillOrder::Reversed => {
            sites.reverse();
            sites.sort_by_key(|s| MeshSpec::level(s));
        }
    }

    let eps = mesh.eps_all();
    for site in &sites {
        for (k, spec) in comps.iter().enumerate() {
            if !in_domain(spec, mesh, site) {
                continue;
            }
            let dirs = spec.evolution.iter().copied().filter(|&j| site[j] > 0);
            let dir = match order {
                FillOrder::Forward => dirs.min(),
                FillOrder::Reversed => dirs.max(),
            };
            let value = match dir {
                None => {
                    let v = data.value(k, site);
                    if v.len() != spec.width {
                        return Err(LatticeError::DataShape { component: k, expected: spec.width, found: v.len() });
                    }
                    v
                }
                Some(j) => {
                    let mut base = site.clone();
                    base[j] -= 1;
                    let deps = sys.dependencies(k, j);
                    let mut view = vec![None; comps.len()];
                    for l in deps {
                        view[l] = fields[l].get(&base);
                    }
                    let v = sys.step(k, j, eps, &Corner::new(view)).and_then(|v| {
                        if v.iter().all(|x| x.is_finite()) {
                            Ok(v)
                        } else {
                            Err(StepError::NonFinite)
                        }
                    });
                    v.map_err(|source| LatticeError::DomainViolation {
                        site: site.clone(),
                        component: k,
                        name: spec.name.clone(),
                        source,
                    })?
                }
            };
            fields[k].set(site, &value);
        }
    }
    Ok(GoursatSolution { mesh: mesh.clone(), fields })
}

/// Consistency defect of `sys` on one elementary cube with corner values
/// `corner` (one entry per component): the largest
/// `|τ_jτ_i u_k − τ_iτ_j u_k| / (ε_i ε_j)` over components and direction
/// pairs in which they evolve.
pub fn consistency_residual(sys: &dyn HyperbolicSystem, corner: &[Vec<f64>], eps: &[f64]) -> Result<f64, LatticeError> {
    validate_system(sys)?;
    let comps = sys.components();
    let site0 = vec![0; sys.dim()];
    let fail = |k: usize, site: Vec<usize>, source: StepError| LatticeError::DomainViolation {
        site,
        component: k,
        name: comps[k].name.clone(),
        source,
    };
    let step_all = |dir: usize, values: &[Option<Vec<f64>>]| -> Result<Vec<Option<Vec<f64>>>, LatticeError> {
        let mut out = vec![None; comps.len()];
        for (k, spec) in comps.iter().enumerate() {
            if !spec.evolves_in(dir) {
                continue;
            }
            let mut view = vec![None; comps.len()];
            for l in sys.dependencies(k, dir) {
                view[l] = values[l].as_deref();
            }
            let v = sys.step(k, dir, eps, &Corner::new(view)).map_err(|e| fail(k, site0.clone(), e))?;
            out[k] = Some(v);
        }
        Ok(out)
    };
    let base: Vec<Option<Vec<f64>>> = corner.iter().cloned().map(Some).collect();
    let mut worst: f64 = 0.0;
    for i in 0..sys.dim() {
        for j in i + 1..sys.dim() {
            let ti = step_all(i, &base)?;
            let tj = step_all(j, &base)?;
            for (k, spec) in comps.iter().enumerate() {
                if !(spec.evolves_in(i) && spec.evolves_in(j)) {
                    continue;
                }
                let run = |dir: usize, values: &[Option<Vec<f64>>], at: usize| -> Result<Vec<f64>, LatticeError> {
                    let mut view = vec![None; comps.len()];
                    for l in sys.dependencies(k, dir) {
                        view[l] = values[l].as_deref();
                    }
                    let mut s = site0.clone();
                    s[at] = 1;
                    sys.step(k, dir, eps, &Corner::new(view)).map_err(|e| fail(k, s, e))
                };
                let a = run(j, &ti, i)?;
                let b = run(i, &tj, j)?;
                let d = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                worst = worst.max(d / (eps[i] * eps[j]));
            }
        }
    }
    Ok(worst)
}
