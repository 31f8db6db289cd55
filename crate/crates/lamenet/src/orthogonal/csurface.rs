use crate::clifford::{frame_from_adapted_basis, lift_lambda, tangent_lift, Multivector, MinkowskiVector, Parity, PinElement};
use crate::lattice::{
    goursat_solve, ComponentSpec, Corner, FillOrder, GoursatSolution, HyperbolicSystem, LatticeField, MeshSpec,
    StepError,
};
use crate::linalg::{diameter, dist, dot, norm, scale, sub};

use super::circles::circularity_residual;
use super::curve::{read_off_curve, sample_times, SmoothCurve};
use super::frames::{frame_to_point, norm_factor, others, slot, FrameStep, LameDerived, DEGENERATE_CIRCLE_TOL};
use super::OrthoError;

/// How the orthogonality constraint `ρ_12 + ρ_21 = …` is split.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitting {
    /// C-surfaces: `ρ_12 = ε_2N_1β_12 − (ε_1ε_2/2)(Θ − γ)`,
    /// `ρ_21 = ε_1N_2β_21 − (ε_1ε_2/2)(Θ + γ)`.
    Gamma,
    /// Ribaucour pairs of curves: `ρ_21 = ε_1α`,
    /// `ρ_12 = ε_2N_1β_12 + ε_1(N_2β_21 − ε_2Θ − α)`.
    Alpha,
}

const PSI: usize = 0;
const SPLIT: usize = 5;

fn h_comp(i: usize) -> usize {
    1 + i
}

fn beta_comp(i: usize) -> usize {
    3 + i
}

/// The two-dimensional discrete Lamé system as a hyperbolic lattice system.
///
/// Lattice direction `i ∈ {0, 1}` moves along the frame vector `e_{f[i]}`.
/// Components: `ψ` (both directions), `h_1, β_·1` (evolving in direction 1),
/// `h_2, β_·2` (evolving in direction 0) and the static splitting function.
#[derive(Clone, Debug)]
pub struct LameSystem2D {
    n: usize,
    f: [usize; 2],
    splitting: Splitting,
    comps: Vec<ComponentSpec>,
}

impl LameSystem2D {
    pub fn new(n: usize, f: [usize; 2], splitting: Splitting) -> Self {
        assert!(n >= 2 && f[0] != f[1] && f.iter().all(|&k| k >= 1 && k <= n), "invalid frame indices {f:?}");
        let comps = vec![
            ComponentSpec::new("psi", 1 << (n + 2), vec![0, 1]),
            ComponentSpec::new("h1", 1, vec![1]),
            ComponentSpec::new("h2", 1, vec![0]),
            ComponentSpec::new("beta1", n - 1, vec![1]),
            ComponentSpec::new("beta2", n - 1, vec![0]),
            ComponentSpec::new(
                match splitting {
                    Splitting::Gamma => "gamma",
                    Splitting::Alpha => "alpha",
                },
                1,
                vec![],
            ),
        ];
        Self { n, f, splitting, comps }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn frame_indices(&self) -> [usize; 2] {
        self.f
    }

    /// Corner values in component order, for consistency checks.
    pub fn corner_values(&self, psi: &PinElement, h: [f64; 2], beta: [&[f64]; 2], split: f64) -> Vec<Vec<f64>> {
        vec![psi.value().coeffs().to_vec(), vec![h[0]], vec![h[1]], beta[0].to_vec(), beta[1].to_vec(), vec![split]]
    }

    /// `N_i`, `Θ`, `ρ_12`, `ρ_21` and `n` at one site.
    pub fn derived(&self, eps: &[f64], beta: [&[f64]; 2], split: f64) -> Result<LameDerived, StepError> {
        let [f1, f2] = self.f;
        let mut big_n = [0.0; 2];
        for i in 0..2 {
            big_n[i] = norm_factor(eps[i], beta[i]).ok_or(StepError::SqrtDomain {
                quantity: if i == 0 { "N_1" } else { "N_2" },
                value: 1.0 - eps[i] * eps[i] / 4.0 * beta[i].iter().map(|b| b * b).sum::<f64>(),
            })?;
        }
        let b12 = beta[1][slot(f1, f2)];
        let b21 = beta[0][slot(f2, f1)];
        let theta = 0.5
            * (1..=self.n)
                .filter(|k| !self.f.contains(k))
                .map(|k| beta[0][slot(k, f1)] * beta[1][slot(k, f2)])
                .sum::<f64>();
        let (e1, e2) = (eps[0], eps[1]);
        let (rho12, rho21) = match self.splitting {
            Splitting::Gamma => (
                e2 * big_n[0] * b12 - e1 * e2 / 2.0 * (theta - split),
                e1 * big_n[1] * b21 - e1 * e2 / 2.0 * (theta + split),
            ),
            Splitting::Alpha => (e2 * big_n[0] * b12 + e1 * (big_n[1] * b21 - e2 * theta - split), e1 * split),
        };
        let q = 1.0 - rho12 * rho21;
        if !(q > 0.0) {
            return Err(StepError::SqrtDomain { quantity: "n", value: q });
        }
        let d = LameDerived { big_n, theta, rho12, rho21, n: q.sqrt() };
        if (d.cos_angle() - 1.0).abs() < DEGENERATE_CIRCLE_TOL {
            return Err(StepError::Degenerate("circle degenerates to a line".into()));
        }
        Ok(d)
    }

    fn corner_derived(&self, eps: &[f64], corner: &Corner<'_>) -> Result<LameDerived, StepError> {
        let beta = [corner.get(beta_comp(0))?, corner.get(beta_comp(1))?];
        self.derived(eps, beta, corner.get(SPLIT)?[0])
    }
}

fn pin_from_coeffs(n: usize, c: &[f64]) -> PinElement {
    let m = Multivector::from_coeffs(n, c);
    let parity = if m.parity_mass(true) >= m.parity_mass(false) { Parity::Even } else { Parity::Odd };
    PinElement::from_trusted(m, parity)
}

impl HyperbolicSystem for LameSystem2D {
    fn dim(&self) -> usize {
        2
    }

    fn components(&self) -> &[ComponentSpec] {
        &self.comps
    }

    fn dependencies(&self, k: usize, dir: usize) -> Vec<usize> {
        if k == PSI {
            vec![PSI, h_comp(dir), beta_comp(dir)]
        } else {
            vec![h_comp(0), h_comp(1), beta_comp(0), beta_comp(1), SPLIT]
        }
    }

    fn step(&self, k: usize, i: usize, eps: &[f64], corner: &Corner<'_>) -> Result<Vec<f64>, StepError> {
        let j = 1 - i;
        if k == PSI {
            let psi = pin_from_coeffs(self.n, corner.get(PSI)?);
            let step = FrameStep::new(self.n, self.f[i], eps[i], corner.get(h_comp(i))?[0], corner.get(beta_comp(i))?)?;
            return Ok(step.apply(&psi).value().coeffs().to_vec());
        }
        let d = self.corner_derived(eps, corner)?;
        let rho = d.rho(i, j);
        let (ei, ej) = (eps[i], eps[j]);
        if k == h_comp(j) {
            let (hi, hj) = (corner.get(h_comp(i))?[0], corner.get(h_comp(j))?[0]);
            return Ok(vec![(ej * hj + ei * hi * rho) / (d.n * ej)]);
        }
        if k == beta_comp(j) {
            let (bi, bj) = (corner.get(beta_comp(i))?, corner.get(beta_comp(j))?);
            let (fi, fj) = (self.f[i], self.f[j]);
            let out = others(self.n, fj)
                .map(|kk| {
                    let bkj = bj[slot(kk, fj)];
                    if kk == fi {
                        (2.0 * d.big_n[i] * rho - ej * bkj) / (d.n * ej)
                    } else {
                        (ej * bkj + ei * bi[slot(kk, fi)] * rho) / (d.n * ej)
                    }
                })
                .collect();
            return Ok(out);
        }
        Err(StepError::Degenerate(format!("component {k} does not evolve in direction {i}")))
    }
}

/// Goursat data for a two-dimensional discrete orthogonal system.
///
/// `h[i][k]`, `beta[i][k]` are given on the axis of direction `i`
/// (`k < steps_i`; `beta` lists `β_{k,i}` for `k ≠ f[i]` ascending), and
/// `split[a][b]` on the sites with `a < steps_0`, `b < steps_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct LameGoursat {
    pub psi0: PinElement,
    pub f: [usize; 2],
    pub splitting: Splitting,
    pub h: [Vec<f64>; 2],
    pub beta: [Vec<Vec<f64>>; 2],
    pub split: Vec<Vec<f64>>,
}

impl LameGoursat {
    /// C-surface data read off two curves through a common point, with
    /// `Γ(ξ_1, ξ_2)` sampled on the plane. When `stagger` is set every
    /// sample is taken half a step further (`kε + ε/2`).
    pub fn c_surface_from_curves(
        curves: [&dyn SmoothCurve; 2],
        gamma: &dyn Fn(f64, f64) -> f64,
        psi0: &PinElement,
        f: [usize; 2],
        mesh: &MeshSpec,
        stagger: bool,
    ) -> Result<Self, OrthoError> {
        check_mesh(mesh, 0)?;
        let mut h: [Vec<f64>; 2] = Default::default();
        let mut beta: [Vec<Vec<f64>>; 2] = Default::default();
        let mut times: [Vec<f64>; 2] = Default::default();
        for i in 0..2 {
            let eps = mesh.eps(i);
            times[i] = sample_times(eps, mesh.steps(i), stagger);
            let r = read_off_curve(curves[i], psi0, f[i], &times[i], eps / 4.0)?;
            h[i] = r.h;
            beta[i] = r.beta;
        }
        let split = times[0].iter().map(|&a| times[1].iter().map(|&b| gamma(a, b)).collect()).collect();
        Ok(Self { psi0: psi0.clone(), f, splitting: Splitting::Gamma, h, beta, split })
    }

    /// Ribaucour data for a curve `X`, a splitting function `A` along it and
    /// the transformed initial point `X⁺(0)`.
    ///
    /// Without an explicit frame, `Ψ` is built from `v_1 = T(0)` and the
    /// unit component of `X⁺(0) − X(0)` orthogonal to it; when that basis is
    /// negatively oriented (N = 2) the two frame indices are swapped. With
    /// an explicit `(Ψ, f)`, `X⁺(0) − X(0)` must have a positive component
    /// along `A_Ψ(e_{f[1]})`.
    pub fn ribaucour_from_curve(
        curve: &dyn SmoothCurve,
        alpha: &dyn Fn(f64) -> f64,
        x_plus0: &[f64],
        frame: Option<(PinElement, [usize; 2])>,
        mesh: &MeshSpec,
        stagger: bool,
    ) -> Result<Self, OrthoError> {
        check_mesh(mesh, 1)?;
        let n = curve.dim();
        let x0 = curve.point(0.0);
        if x_plus0.len() != n {
            return Err(OrthoError::DataMismatch(format!("X⁺(0) has {} coordinates, expected {n}", x_plus0.len())));
        }
        let d = sub(x_plus0, &x0);
        let h2 = norm(&d);
        if !(h2 > 1e-14 * (1.0 + norm(&x0))) {
            return Err(OrthoError::CoincidentPoints);
        }
        let dhat = scale(&d, 1.0 / h2);
        let (psi0, f) = match frame {
            Some(pf) => pf,
            None => auto_frame(curve, &x0, &dhat)?,
        };
        let basis: Vec<Vec<f64>> = (1..=n)
            .map(|k| psi0.adjoint(&MinkowskiVector::basis(n, k)).map(|v| v.euclidean_part().to_vec()))
            .collect::<Result<_, _>>()?;
        if !(dot(&dhat, &basis[f[1] - 1]) > 0.0) {
            return Err(OrthoError::DataMismatch(format!(
                "X⁺(0) − X(0) has no positive component along frame vector {}",
                f[1]
            )));
        }
        let eps = mesh.eps(0);
        let times = sample_times(eps, mesh.steps(0), stagger);
        let r = read_off_curve(curve, &psi0, f[0], &times, eps / 4.0)?;
        let beta2 = others(n, f[1]).map(|k| -2.0 * dot(&dhat, &basis[k - 1])).collect();
        Ok(Self {
            psi0,
            f,
            splitting: Splitting::Alpha,
            h: [r.h, vec![h2]],
            beta: [r.beta, vec![beta2]],
            split: times.iter().map(|&t| vec![alpha(t)]).collect(),
        })
    }

    fn validate(&self, mesh: &MeshSpec) -> Result<(), OrthoError> {
        let n = self.psi0.n();
        let bad = |what: String| Err(OrthoError::DataMismatch(what));
        if self.f[0] == self.f[1] || self.f.iter().any(|&k| k == 0 || k > n) {
            return bad(format!("frame indices {:?} for N = {n}", self.f));
        }
        for i in 0..2 {
            if self.h[i].len() < mesh.steps(i) || self.beta[i].len() < mesh.steps(i) {
                return bad(format!("axis data for direction {i} shorter than {} steps", mesh.steps(i)));
            }
            if self.beta[i].iter().any(|b| b.len() != n - 1) {
                return bad(format!("each β list in direction {i} needs {} entries", n - 1));
            }
        }
        if self.split.len() < mesh.steps(0) || self.split.iter().any(|r| r.len() < mesh.steps(1)) {
            return bad("splitting function does not cover the plane".into());
        }
        Ok(())
    }
}

fn check_mesh(mesh: &MeshSpec, tail: usize) -> Result<(), OrthoError> {
    if mesh.dim() != 2 || mesh.tail() != tail {
        return Err(OrthoError::DataMismatch(format!(
            "expected a 2-direction mesh with {tail} transformation direction(s), got {} with {}",
            mesh.dim(),
            mesh.tail()
        )));
    }
    Ok(())
}

fn auto_frame(curve: &dyn SmoothCurve, x0: &[f64], dhat: &[f64]) -> Result<(PinElement, [usize; 2]), OrthoError> {
    let d1 = curve.d1(0.0);
    let v1 = scale(&d1, 1.0 / norm(&d1));
    let perp: Vec<f64> = dhat.iter().zip(&v1).map(|(a, b)| a - dot(dhat, &v1) * b).collect();
    let pl = norm(&perp);
    if pl < 1e-9 {
        return Err(OrthoError::DataMismatch("X⁺(0) − X(0) is tangent to the curve".into()));
    }
    let u = scale(&perp, 1.0 / pl);
    let point = lift_lambda(x0);
    let (a, b) = (tangent_lift(x0, &v1), tangent_lift(x0, &u));
    match frame_from_adapted_basis(&point, &[a.clone(), b.clone()]) {
        Ok(psi) => Ok((psi, [1, 2])),
        Err(crate::clifford::CliffordError::OrientationReversed) => Ok((frame_from_adapted_basis(&point, &[b, a])?, [2, 1])),
        Err(e) => Err(e.into()),
    }
}

fn solve(data: &LameGoursat, mesh: &MeshSpec) -> Result<LameSolution, OrthoError> {
    data.validate(mesh)?;
    let n = data.psi0.n();
    let sys = LameSystem2D::new(n, data.f, data.splitting);
    let lookup = |k: usize, site: &[usize]| -> Vec<f64> {
        match k {
            PSI => data.psi0.value().coeffs().to_vec(),
            1 => vec![data.h[0][site[0]]],
            2 => vec![data.h[1][site[1]]],
            3 => data.beta[0][site[0]].clone(),
            4 => data.beta[1][site[1]].clone(),
            _ => vec![data.split[site[0]][site[1]]],
        }
    };
    let solution = goursat_solve(&sys, &lookup, mesh, FillOrder::Forward)?;
    let psi = solution.field(PSI);
    let mut points = LatticeField::empty(mesh.clone(), n);
    for site in mesh.sites() {
        let p = frame_to_point(&pin_from_coeffs(n, psi.at(&site)))?;
        points.set(&site, &p);
    }
    Ok(LameSolution { system: sys, solution, points })
}

/// Solves the Goursat problem for a discrete C-surface (γ-splitting).
pub fn csurface_solve(data: &LameGoursat, mesh: &MeshSpec) -> Result<LameSolution, OrthoError> {
    check_mesh(mesh, 0)?;
    if data.splitting != Splitting::Gamma {
        return Err(OrthoError::DataMismatch("C-surfaces use the γ-splitting".into()));
    }
    solve(data, mesh)
}

/// Solves the Goursat problem for a pair of discrete curves enveloping a
/// circle congruence (α-splitting, second direction a transformation).
///
/// Fails with `OutsideDomain` unless `Σ_{k≠f_2} β_{k2}² < 4` at the seed.
pub fn ribaucour_solve(data: &LameGoursat, mesh: &MeshSpec) -> Result<LameSolution, OrthoError> {
    check_mesh(mesh, 1)?;
    if data.splitting != Splitting::Alpha {
        return Err(OrthoError::DataMismatch("Ribaucour pairs use the α-splitting".into()));
    }
    let sum: f64 = data.beta[1].first().map(|b| b.iter().map(|x| x * x).sum()).unwrap_or(0.0);
    if !(sum < 4.0) {
        return Err(OrthoError::OutsideDomain { sum });
    }
    solve(data, mesh)
}

/// Residuals of the structural identities of a solved system; each is the
/// largest violation over the lattice.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LameInvariants {
    /// `|τ_iψ + Σ_i e_i ψ|`.
    pub frame: f64,
    /// `|λ(τ_i x) − λ(x) − ε_i h_i v̂_i|`, relative to `1 + |x|²`.
    pub edge: f64,
    /// `|ρ_12 + ρ_21 + 2⟨v̂_1, v̂_2⟩|`.
    pub circle_constraint: f64,
    /// `|n_ji² − (1 − ρ_12ρ_21)|` with `n_ji² = 1 + ρ_ji² + 2ρ_ji⟨v̂_i, v̂_j⟩`.
    pub normalizer: f64,
    /// `|n·τ_i v̂_j − v̂_j − ρ_ji v̂_i|`.
    pub rotation: f64,
    /// `|A_ψ(e_∞) − e_∞|`.
    pub e_inf_drift: f64,
    /// Largest relative concircularity defect of an elementary quad.
    pub circularity: f64,
}

/// A solved two-dimensional discrete orthogonal system.
#[derive(Clone, Debug)]
pub struct LameSolution {
    system: LameSystem2D,
    solution: GoursatSolution,
    points: LatticeField,
}

pub(crate) fn relative_circularity(q: [&[f64]; 4]) -> Result<f64, OrthoError> {
    Ok(circularity_residual(&q)? / diameter(&q))
}

impl LameSolution {
    pub fn mesh(&self) -> &MeshSpec {
        &self.solution.mesh
    }

    pub fn system(&self) -> &LameSystem2D {
        &self.system
    }

    pub fn frame(&self, site: &[usize]) -> PinElement {
        pin_from_coeffs(self.system.n, self.solution.field(PSI).at(site))
    }

    pub fn points(&self) -> &LatticeField {
        &self.points
    }

    pub fn point(&self, site: &[usize]) -> &[f64] {
        self.points.at(site)
    }

    /// `h_{i+1}` at `site`, where stored.
    pub fn h(&self, i: usize, site: &[usize]) -> Option<f64> {
        self.solution.field(h_comp(i)).get(site).map(|v| v[0])
    }

    /// `β_{k,i+1}` for `k ≠ f[i]` at `site`, where stored.
    pub fn beta(&self, i: usize, site: &[usize]) -> Option<&[f64]> {
        self.solution.field(beta_comp(i)).get(site)
    }

    /// The splitting function at `site`, where stored.
    pub fn split(&self, site: &[usize]) -> Option<f64> {
        self.solution.field(SPLIT).get(site).map(|v| v[0])
    }

    /// Derived quantities at a site with a full elementary quad.
    pub fn derived(&self, site: &[usize]) -> Option<LameDerived> {
        let beta = [self.beta(0, site)?, self.beta(1, site)?];
        self.system.derived(self.mesh().eps_all(), beta, self.split(site)?).ok()
    }

    /// The frame step in direction `i` from `site`, where `h_i, β_i` are stored.
    pub fn frame_step(&self, i: usize, site: &[usize]) -> Option<FrameStep> {
        let (h, beta) = (self.h(i, site)?, self.beta(i, site)?);
        FrameStep::new(self.system.n, self.system.f[i], self.mesh().eps(i), h, beta).ok()
    }

    /// `v̂_i = A_{e_iψ}(Σ_i)` at `site`.
    pub fn direction(&self, i: usize, site: &[usize]) -> Option<MinkowskiVector> {
        self.frame_step(i, site)?.direction(&self.frame(site)).ok()
    }

    /// Sites with a complete elementary quad.
    pub fn quad_sites(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let (s0, s1) = (self.mesh().steps(0), self.mesh().steps(1));
        self.mesh().sites().filter(move |s| s[0] < s0 && s[1] < s1)
    }

    /// `(x, τ_1x, τ_1τ_2x, τ_2x)` in cyclic order.
    pub fn quad(&self, site: &[usize]) -> [&[f64]; 4] {
        let [a, b] = [site[0], site[1]];
        [self.point(&[a, b]), self.point(&[a + 1, b]), self.point(&[a + 1, b + 1]), self.point(&[a, b + 1])]
    }

    /// Largest relative circularity defect (`circularity_residual / diameter`).
    pub fn circularity(&self) -> Result<f64, OrthoError> {
        let mut worst: f64 = 0.0;
        for s in self.quad_sites() {
            worst = worst.max(relative_circularity(self.quad(&s))?);
        }
        Ok(worst)
    }

    /// Recomputes every structural identity on the solved lattice.
    pub fn invariants(&self) -> Result<LameInvariants, OrthoError> {
        let mesh = self.mesh().clone();
        let n = self.system.n;
        let mut out = LameInvariants::default();
        let e0 = MinkowskiVector::e0(n);
        for site in mesh.sites() {
            let psi = self.frame(&site);
            out.e_inf_drift = out.e_inf_drift.max(psi.e_inf_drift());
            let x = psi.adjoint(&e0)?;
            for i in 0..2 {
                if site[i] >= mesh.steps(i) {
                    continue;
                }
                let Some(step) = self.frame_step(i, &site) else { continue };
                let mut next = site.clone();
                next[i] += 1;
                let psi_next = self.frame(&next);
                out.frame = out.frame.max(psi_next.distance(&step.apply(&psi)));
                let v = step.direction(&psi)?;
                let h = self.h(i, &site).expect("stored with the step");
                let predicted = x.axpy(mesh.eps(i) * h, &v);
                let got = psi_next.adjoint(&e0)?;
                let size = 1.0 + dot(self.point(&site), self.point(&site));
                out.edge = out.edge.max((&got - &predicted).max_abs() / size);
            }
        }
        for site in self.quad_sites().collect::<Vec<_>>() {
            let d = self.derived(&site).ok_or_else(|| OrthoError::DataMismatch(format!("no data at {site:?}")))?;
            let v = [self.direction(0, &site), self.direction(1, &site)];
            let (Some(v0), Some(v1)) = (&v[0], &v[1]) else { continue };
            let g = v0.dot(v1);
            out.circle_constraint = out.circle_constraint.max((d.rho12 + d.rho21 + 2.0 * g).abs());
            let n2 = 1.0 - d.rho12 * d.rho21;
            for (i, j) in [(0, 1), (1, 0)] {
                let rji = d.rho(j, i);
                out.normalizer = out.normalizer.max((1.0 + rji * rji + 2.0 * rji * g - n2).abs());
                let mut next = site.clone();
                next[i] += 1;
                if let Some(tv) = self.direction(j, &next) {
                    let vi = if i == 0 { v0 } else { v1 };
                    let vj = if j == 0 { v0 } else { v1 };
                    let lhs = tv.scaled(d.n);
                    let rhs = vj.axpy(rji, vi);
                    out.rotation = out.rotation.max((&lhs - &rhs).max_abs());
                }
            }
        }
        out.circularity = self.circularity()?;
        Ok(out)
    }

    /// The two layers of a Ribaucour solution as discrete curves.
    pub fn layers(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let s0 = self.mesh().steps(0);
        let layer = |b: usize| (0..=s0).map(|a| self.point(&[a, b]).to_vec()).collect();
        (layer(0), layer(1))
    }

    /// Largest `|d̂·(t̂ + t̂⁺)|` over the sites of a Ribaucour solution, with
    /// `t̂, t̂⁺` the forward unit chords and `d̂` the unit vector from `x` to
    /// `x⁺`. Vanishes for a pair enveloping a circle congruence.
    pub fn enveloping_residual(&self) -> f64 {
        let (x, xp) = self.layers();
        let unit = |v: Vec<f64>| {
            let l = norm(&v);
            scale(&v, 1.0 / l)
        };
        (0..x.len() - 1)
            .map(|k| {
                let t = unit(sub(&x[k + 1], &x[k]));
                let tp = unit(sub(&xp[k + 1], &xp[k]));
                let d = unit(sub(&xp[k], &x[k]));
                (dot(&d, &t) + dot(&d, &tp)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest `||δx⁺| − |δx| − A·|x⁺ − x||` along a Ribaucour solution, with
    /// `A` evaluated at the lattice points.
    pub fn speed_law_residual(&self, alpha: &dyn Fn(f64) -> f64) -> f64 {
        let (x, xp) = self.layers();
        let eps = self.mesh().eps(0);
        (0..x.len() - 1)
            .map(|k| {
                let lhs = dist(&xp[k + 1], &xp[k]) / eps - dist(&x[k + 1], &x[k]) / eps;
                (lhs - alpha(k as f64 * eps) * dist(&xp[k], &x[k])).abs()
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::validate_system;

    #[test]
    fn dependency_structure_is_valid() {
        for s in [Splitting::Gamma, Splitting::Alpha] {
            validate_system(&LameSystem2D::new(3, [1, 3], s)).unwrap();
        }
    }

    #[test]
    fn flat_data_has_trivial_rotation_coefficients() {
        let sys = LameSystem2D::new(2, [1, 2], Splitting::Gamma);
        let d = sys.derived(&[0.1, 0.1], [&[0.0], &[0.0]], 0.0).unwrap();
        assert_eq!((d.rho12, d.rho21, d.n), (0.0, 0.0, 1.0));
    }
}
