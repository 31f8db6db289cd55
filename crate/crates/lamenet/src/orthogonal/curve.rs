use crate::clifford::{lift_lambda, MinkowskiVector, PinElement};
use crate::linalg::{axpy, dot, norm, scale, sub};

use super::frames::{frame_to_point, others, FrameStep};
use super::{OrthoError, FRAME_DRIFT_TOL, IMMERSION_TOL};

/// A smooth parametrized curve in ℝ^N with its first two derivatives.
pub trait SmoothCurve {
    fn dim(&self) -> usize;
    fn point(&self, t: f64) -> Vec<f64>;
    fn d1(&self, t: f64) -> Vec<f64>;
    fn d2(&self, t: f64) -> Vec<f64>;
}

/// `X(t) = origin + t·velocity`.
#[derive(Clone, Debug, PartialEq)]
pub struct Line {
    pub origin: Vec<f64>,
    pub velocity: Vec<f64>,
}

impl SmoothCurve for Line {
    fn dim(&self) -> usize {
        self.origin.len()
    }

    fn point(&self, t: f64) -> Vec<f64> {
        axpy(&self.origin, t, &self.velocity)
    }

    fn d1(&self, _t: f64) -> Vec<f64> {
        self.velocity.clone()
    }

    fn d2(&self, _t: f64) -> Vec<f64> {
        vec![0.0; self.dim()]
    }
}

/// `X(t) = c + R(cos θ u + sin θ w)` with `θ = speed·t/R`; `u, w` orthonormal.
#[derive(Clone, Debug, PartialEq)]
pub struct Circle {
    pub center: Vec<f64>,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    pub radius: f64,
    pub speed: f64,
}

impl Circle {
    /// Planar circle of radius `r` through the origin, starting in direction
    /// `e_1` and turning towards `e_2`, traversed with the given speed.
    pub fn planar(r: f64, speed: f64) -> Self {
        Self { center: vec![0.0, r], u: vec![0.0, -1.0], w: vec![1.0, 0.0], radius: r, speed }
    }

    fn angle(&self, t: f64) -> f64 {
        self.speed * t / self.radius
    }

    fn combo(&self, a: f64, b: f64) -> Vec<f64> {
        self.u.iter().zip(&self.w).map(|(p, q)| a * p + b * q).collect()
    }
}

impl SmoothCurve for Circle {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn point(&self, t: f64) -> Vec<f64> {
        let a = self.angle(t);
        axpy(&self.center, self.radius, &self.combo(a.cos(), a.sin()))
    }

    fn d1(&self, t: f64) -> Vec<f64> {
        let a = self.angle(t);
        scale(&self.combo(-a.sin(), a.cos()), self.speed)
    }

    fn d2(&self, t: f64) -> Vec<f64> {
        let a = self.angle(t);
        scale(&self.combo(-a.cos(), -a.sin()), self.speed * self.speed / self.radius)
    }
}

type CurveFn = Box<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// A curve given by closures for the point and its two derivatives.
pub struct FnCurve {
    dim: usize,
    point: CurveFn,
    d1: CurveFn,
    d2: CurveFn,
}

impl FnCurve {
    pub fn new(
        dim: usize,
        point: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static,
        d1: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static,
        d2: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self { dim, point: Box::new(point), d1: Box::new(d1), d2: Box::new(d2) }
    }
}

impl std::fmt::Debug for FnCurve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnCurve").field("dim", &self.dim).finish_non_exhaustive()
    }
}

impl SmoothCurve for FnCurve {
    fn dim(&self) -> usize {
        self.dim
    }

    fn point(&self, t: f64) -> Vec<f64> {
        (self.point)(t)
    }

    fn d1(&self, t: f64) -> Vec<f64> {
        (self.d1)(t)
    }

    fn d2(&self, t: f64) -> Vec<f64> {
        (self.d2)(t)
    }
}

/// Metric and rotation coefficients read off a curve at sample parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ReadOff {
    /// The basis index `f` with `A_Ψ(e_f) = v̂(0)`.
    pub f: usize,
    pub times: Vec<f64>,
    pub h: Vec<f64>,
    /// `β_k(t)` for `k ≠ f`, ascending in `k`.
    pub beta: Vec<Vec<f64>>,
    /// The transported Euclidean frame `v_1, …, v_N` at each sample.
    pub frames: Vec<Vec<Vec<f64>>>,
}

/// Unit tangent and `dT/dt = (X″ − (X″·T)T)/|X′|`.
fn tangent_data(curve: &dyn SmoothCurve, t: f64) -> Result<(Vec<f64>, Vec<f64>, f64), OrthoError> {
    let d1 = curve.d1(t);
    let speed = norm(&d1);
    if !(speed >= IMMERSION_TOL) {
        return Err(OrthoError::ImmersionFailure { t, speed });
    }
    let tan = scale(&d1, 1.0 / speed);
    let d2 = curve.d2(t);
    let normal = axpy(&d2, -dot(&d2, &tan), &tan);
    Ok((tan, scale(&normal, 1.0 / speed), speed))
}

/// Checks `A_Ψ(e_0) = λ(X(0))` and `A_Ψ(e_f) = T(0)` and returns the
/// Euclidean frame `A_Ψ(e_k)`.
fn initial_frame(curve: &dyn SmoothCurve, psi0: &PinElement, f: usize) -> Result<Vec<Vec<f64>>, OrthoError> {
    let n = curve.dim();
    if psi0.n() != n || f == 0 || f > n {
        return Err(OrthoError::DataMismatch(format!("frame over N = {}, curve in N = {n}, index {f}", psi0.n())));
    }
    let x0 = curve.point(0.0);
    let (tan, _, _) = tangent_data(curve, 0.0)?;
    let p = psi0.adjoint(&MinkowskiVector::e0(n))?;
    let mut defect = (&p - lift_lambda(&x0).vector()).max_abs() / (1.0 + dot(&x0, &x0));
    let mut frame = Vec::with_capacity(n);
    for k in 1..=n {
        frame.push(psi0.adjoint(&MinkowskiVector::basis(n, k))?.euclidean_part().to_vec());
    }
    defect = defect.max(norm(&sub(&frame[f - 1], &tan)));
    if defect > 1e-9 {
        return Err(OrthoError::FrameNotSuited { defect });
    }
    Ok(frame)
}

/// Largest `|v_a·v_b − δ_ab|`.
fn orthonormality_defect(frame: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..frame.len() {
        for b in a..frame.len() {
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((dot(&frame[a], &frame[b]) - target).abs());
        }
    }
    worst
}

/// Gram–Schmidt with `v_f = T` fixed, then the remaining vectors in order.
fn reorthonormalize(frame: &mut [Vec<f64>], f: usize, tan: &[f64]) {
    frame[f - 1] = tan.to_vec();
    let order: Vec<usize> = std::iter::once(f - 1).chain(others(frame.len(), f).map(|k| k - 1)).collect();
    for (pos, &a) in order.iter().enumerate().skip(1) {
        let mut v = frame[a].clone();
        for &b in &order[..pos] {
            let c = dot(&v, &frame[b]);
            v = axpy(&v, -c, &frame[b]);
        }
        let l = norm(&v);
        frame[a] = scale(&v, 1.0 / l);
    }
}

/// Integrates `∂v_k = β_k T` with `β_k = −v_k·∂T` along the curve and samples
/// `h = |X′|` and `β_k` at `times` (non-decreasing, starting at or after 0).
///
/// The integrator is classical RK4 with steps of at most `max_step`,
/// re-orthonormalizing after every step. Steps are bisected where the frame
/// turns too fast for that step size.
pub fn read_off_curve(
    curve: &dyn SmoothCurve,
    psi0: &PinElement,
    f: usize,
    times: &[f64],
    max_step: f64,
) -> Result<ReadOff, OrthoError> {
    if times.first().is_some_and(|t| *t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(OrthoError::DataMismatch("sample times must be non-decreasing from 0".into()));
    }
    assert!(max_step > 0.0, "integration step must be positive");
    let n = curve.dim();
    let mut frame = initial_frame(curve, psi0, f)?;
    let (tan0, _, _) = tangent_data(curve, 0.0)?;
    reorthonormalize(&mut frame, f, &tan0);
    let mut t = 0.0;
    let mut out = ReadOff { f, times: times.to_vec(), h: Vec::new(), beta: Vec::new(), frames: Vec::new() };
    for &target in times {
        let span = target - t;
        let pieces = (span / max_step).ceil().max(0.0) as usize;
        for p in 0..pieces {
            let t1 = t + span * (p + 1) as f64 / pieces as f64;
            let t0 = t + span * p as f64 / pieces as f64;
            frame = advance(curve, frame, f, t0, t1, 0)?;
        }
        t = target;
        let (_, dtan, speed) = tangent_data(curve, t)?;
        out.h.push(speed);
        out.beta.push(others(n, f).map(|k| -dot(&frame[k - 1], &dtan)).collect());
        out.frames.push(frame.clone());
    }
    Ok(out)
}

/// One RK4 step from `t0` to `t1` followed by re-orthonormalization; a step
/// that loses more than `FRAME_DRIFT_TOL` of orthonormality is bisected.
fn advance(
    curve: &dyn SmoothCurve,
    frame: Vec<Vec<f64>>,
    f: usize,
    t0: f64,
    t1: f64,
    depth: u32,
) -> Result<Vec<Vec<f64>>, OrthoError> {
    let mut next = rk4_step(curve, &frame, f, t0, t1 - t0)?;
    let (tan, _, _) = tangent_data(curve, t1)?;
    next[f - 1] = tan.clone();
    let defect = orthonormality_defect(&next);
    if defect > FRAME_DRIFT_TOL || !defect.is_finite() {
        if depth >= MAX_BISECTIONS {
            return Err(OrthoError::FrameDrift { t: t1, defect });
        }
        let mid = 0.5 * (t0 + t1);
        let half = advance(curve, frame, f, t0, mid, depth + 1)?;
        return advance(curve, half, f, mid, t1, depth + 1);
    }
    reorthonormalize(&mut next, f, &tan);
    Ok(next)
}

const MAX_BISECTIONS: u32 = 12;

fn rk4_step(curve: &dyn SmoothCurve, frame: &[Vec<f64>], f: usize, t: f64, dt: f64) -> Result<Vec<Vec<f64>>, OrthoError> {
    let rhs = |s: f64, fr: &[Vec<f64>]| -> Result<Vec<Vec<f64>>, OrthoError> {
        let (tan, dtan, _) = tangent_data(curve, s)?;
        Ok(fr
            .iter()
            .enumerate()
            .map(|(a, v)| if a == f - 1 { vec![0.0; v.len()] } else { scale(&tan, -dot(v, &dtan)) })
            .collect())
    };
    let shift = |fr: &[Vec<f64>], k: &[Vec<f64>], s: f64| -> Vec<Vec<f64>> {
        fr.iter().zip(k).map(|(v, d)| axpy(v, s, d)).collect()
    };
    let k1 = rhs(t, frame)?;
    let k2 = rhs(t + dt / 2.0, &shift(frame, &k1, dt / 2.0))?;
    let k3 = rhs(t + dt / 2.0, &shift(frame, &k2, dt / 2.0))?;
    let k4 = rhs(t + dt, &shift(frame, &k3, dt))?;
    Ok((0..frame.len())
        .map(|a| {
            (0..frame[a].len())
                .map(|c| frame[a][c] + dt / 6.0 * (k1[a][c] + 2.0 * k2[a][c] + 2.0 * k3[a][c] + k4[a][c]))
                .collect()
        })
        .collect())
}

/// Sample parameters `kε` (or `kε + ε/2` when staggered) for `k = 0..count`.
pub(crate) fn sample_times(eps: f64, count: usize, stagger: bool) -> Vec<f64> {
    let s = if stagger { eps / 2.0 } else { 0.0 };
    (0..count).map(|k| k as f64 * eps + s).collect()
}

/// The canonical discretization of a curve: frames `ψ_k` and points
/// `A_{ψ_k}(e_0)` for `k = 0..=steps`, with the read-off data that drove it.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteCurve {
    pub eps: f64,
    pub frames: Vec<PinElement>,
    pub points: Vec<Vec<f64>>,
    pub readoff: ReadOff,
}

/// Solves `τψ = −Σ e_f ψ` with `Σ` built from the data read off `curve` at
/// `kε` (or `kε + ε/2` when `stagger`), starting from `ψ(0) = Ψ`.
pub fn canonical_discretization(
    curve: &dyn SmoothCurve,
    psi0: &PinElement,
    f: usize,
    eps: f64,
    steps: usize,
    stagger: bool,
) -> Result<DiscreteCurve, OrthoError> {
    let readoff = read_off_curve(curve, psi0, f, &sample_times(eps, steps, stagger), eps / 4.0)?;
    let n = curve.dim();
    let mut frames = vec![psi0.clone()];
    for k in 0..steps {
        let step = FrameStep::new(n, f, eps, readoff.h[k], &readoff.beta[k]).map_err(|e| match e {
            crate::lattice::StepError::SqrtDomain { value, .. } => OrthoError::SqrtDomain { quantity: "N_i", value },
            other => OrthoError::DataMismatch(other.to_string()),
        })?;
        let next = step.apply(&frames[k]);
        frames.push(next);
    }
    let points = frames.iter().map(frame_to_point).collect::<Result<Vec<_>, _>>()?;
    Ok(DiscreteCurve { eps, frames, points, readoff })
}
