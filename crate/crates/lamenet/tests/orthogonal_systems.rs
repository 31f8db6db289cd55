use std::f64::consts::PI;

use lamenet::clifford::{frame_from_adapted_basis, lift_lambda, tangent_lift, translation_frame, PinElement};
use lamenet::conjugate::jonas_permutability_check;
use lamenet::lattice::{consistency_residual, MeshSpec};
use lamenet::orthogonal::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn unit(v: &[f64]) -> Vec<f64> {
    let l = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / l).collect()
}

/// Least-squares slope of `log e` against `log ε`.
fn slope(eps: &[f64], err: &[f64]) -> f64 {
    let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = err.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Adapted frame at `x` whose tangent vectors are the normalized `dirs`.
fn frame_at(x: &[f64], dirs: &[Vec<f64>]) -> PinElement {
    let basis: Vec<_> = dirs.iter().map(|d| tangent_lift(x, &unit(d))).collect();
    frame_from_adapted_basis(&lift_lambda(x), &basis).unwrap()
}

// Planar elliptic coordinates, based at (A, B).

const A: f64 = 0.3;
const B: f64 = 0.3;

fn ell(x1: f64, x2: f64) -> Vec<f64> {
    vec![x1.cosh() * x2.cos(), x1.sinh() * x2.sin()]
}

fn ell_d1(x1: f64, x2: f64) -> Vec<f64> {
    vec![x1.sinh() * x2.cos(), x1.cosh() * x2.sin()]
}

fn ell_d2(x1: f64, x2: f64) -> Vec<f64> {
    vec![-x1.cosh() * x2.sin(), x1.sinh() * x2.cos()]
}

fn ell_h2(x1: f64, x2: f64) -> f64 {
    x1.sinh().powi(2) + x2.sin().powi(2)
}

/// `∂_1β_12` of the elliptic system, written out by hand from
/// `β_12 = sinh 2ξ_1 / (cosh 2ξ_1 − cos 2ξ_2)`.
fn ell_gamma(x1: f64, x2: f64) -> f64 {
    let d = (2.0 * x1).cosh() - (2.0 * x2).cos();
    2.0 * (1.0 - (2.0 * x1).cosh() * (2.0 * x2).cos()) / (d * d)
}

fn ell_curve(dir: usize) -> FnCurve {
    match dir {
        0 => FnCurve::new(2, |t| ell(A + t, B), |t| ell_d1(A + t, B), |t| vec![(A + t).cosh() * B.cos(), (A + t).sinh() * B.sin()]),
        _ => FnCurve::new(2, |t| ell(A, B + t), |t| ell_d2(A, B + t), |t| vec![-A.cosh() * (B + t).cos(), -A.sinh() * (B + t).sin()]),
    }
}

fn ell_frame() -> PinElement {
    frame_at(&ell(A, B), &[ell_d1(A, B), ell_d2(A, B)])
}

fn elliptic_surface(eps: f64, r: f64, stagger: bool) -> LameSolution {
    let steps = MeshSpec::steps_for(eps, r);
    let mesh = MeshSpec::cube(2, eps, steps).unwrap();
    let (c1, c2) = (ell_curve(0), ell_curve(1));
    let gamma = |a: f64, b: f64| ell_gamma(A + a, B + b);
    let data = LameGoursat::c_surface_from_curves([&c1, &c2], &gamma, &ell_frame(), [1, 2], &mesh, stagger).unwrap();
    csurface_solve(&data, &mesh).unwrap()
}

fn elliptic_error(sol: &LameSolution) -> f64 {
    let eps = sol.mesh().eps(0);
    sol.mesh()
        .sites()
        .map(|s| dist(sol.point(&s), &ell(A + s[0] as f64 * eps, B + s[1] as f64 * eps)))
        .fold(0.0, f64::max)
}

// Spherical coordinates (r, θ, φ), based at (R0, T0, 0).

const R0: f64 = 1.0;
const T0: f64 = 0.9;

fn sph(r: f64, t: f64, p: f64) -> Vec<f64> {
    vec![r * t.sin() * p.cos(), r * t.sin() * p.sin(), r * t.cos()]
}

fn sph_data(stagger: bool) -> OrthoData {
    let curves: Vec<Box<dyn SmoothCurve>> = vec![
        Box::new(FnCurve::new(3, |t| sph(R0 + t, T0, 0.0), |_| sph(1.0, T0, 0.0), |_| vec![0.0; 3])),
        Box::new(FnCurve::new(
            3,
            |t| sph(R0, T0 + t, 0.0),
            |t| vec![R0 * (T0 + t).cos(), 0.0, -R0 * (T0 + t).sin()],
            |t| vec![-R0 * (T0 + t).sin(), 0.0, -R0 * (T0 + t).cos()],
        )),
        Box::new(FnCurve::new(
            3,
            |t| sph(R0, T0, t),
            |t| vec![-R0 * T0.sin() * t.sin(), R0 * T0.sin() * t.cos(), 0.0],
            |t| vec![-R0 * T0.sin() * t.cos(), -R0 * T0.sin() * t.sin(), 0.0],
        )),
    ];
    let x0 = sph(R0, T0, 0.0);
    let psi0 = frame_at(&x0, &[sph(1.0, T0, 0.0), vec![T0.cos(), 0.0, -T0.sin()], vec![0.0, 1.0, 0.0]]);
    // Γ_12 = Γ_13 = 0, Γ_23 = −sin θ / 2
    let gamma: Box<dyn Fn(usize, usize, f64, f64) -> f64> =
        Box::new(|i, j, a, _| if (i, j) == (1, 2) { -(T0 + a).sin() / 2.0 } else { 0.0 });
    OrthoData { curves, gamma, psi0, stagger }
}

fn sph_error(net: &lamenet::conjugate::ConjugateNet) -> f64 {
    let mesh = net.mesh();
    let eps = mesh.eps(0);
    mesh.sites()
        .map(|s| {
            let c: Vec<f64> = s.iter().map(|&k| k as f64 * eps).collect();
            dist(net.point(&s), &sph(R0 + c[0], T0 + c[1], c[2]))
        })
        .fold(0.0, f64::max)
}

// Read-off

#[test]
fn line_reads_off_trivially() {
    let line = Line { origin: vec![0.0, 0.0, 0.0], velocity: vec![1.0, 0.0, 0.0] };
    let r = read_off_curve(&line, &PinElement::identity(3), 1, &[0.0, 0.5, 1.0], 0.1).unwrap();
    assert!(r.h.iter().all(|h| (h - 1.0).abs() < 1e-15));
    assert!(r.beta.iter().flatten().all(|b| b.abs() < 1e-15));
}

#[test]
fn circle_reads_off_its_curvature() {
    let (radius, speed) = (2.5, 1.7);
    let circle = Circle::planar(radius, speed);
    let times: Vec<f64> = (0..20).map(|k| 0.1 * k as f64).collect();
    let r = read_off_curve(&circle, &PinElement::identity(2), 1, &times, 0.025).unwrap();
    for (h, b) in r.h.iter().zip(&r.beta) {
        // Frenet: dT/dt = (speed/R)·n with n = e_2 towards the centre, so
        // β_21 = −⟨v_2, dT/dt⟩ = −speed/R
        assert!((h - speed).abs() < 1e-12);
        assert!((b[0] + speed / radius).abs() < 1e-9, "{b:?}");
    }
}

#[test]
fn elliptic_axis_reads_off_closed_forms() {
    let times: Vec<f64> = (0..10).map(|k| 0.1 * k as f64).collect();
    let c1 = FnCurve::new(2, |t| ell(A + t, 0.0), |t| ell_d1(A + t, 0.0), |t| vec![(A + t).cosh(), 0.0]);
    let psi = frame_at(&ell(A, 0.0), &[vec![1.0, 0.0], vec![0.0, 1.0]]);
    let r = read_off_curve(&c1, &psi, 1, &times, 0.01).unwrap();
    for (k, t) in times.iter().enumerate() {
        assert!((r.h[k] - (A + t).sinh()).abs() < 1e-12);
        // β_21 = sin 2ξ_2 / (2h²) vanishes on the axis
        assert!(r.beta[k][0].abs() < 1e-9);
    }
    // β_12 along the ξ_2-curve through (A, B)
    let psi = ell_frame();
    let r = read_off_curve(&ell_curve(1), &psi, 2, &times, 0.01).unwrap();
    for (k, t) in times.iter().enumerate() {
        let want = (2.0 * A).sinh() / (2.0 * ell_h2(A, B + t));
        assert!((r.h[k] - ell_h2(A, B + t).sqrt()).abs() < 1e-12);
        assert!((r.beta[k][0] - want).abs() < 1e-9, "{} vs {want}", r.beta[k][0]);
    }
}

#[test]
fn unsuited_frame_is_rejected() {
    let line = Line { origin: vec![0.0, 0.0], velocity: vec![0.0, 1.0] };
    let err = read_off_curve(&line, &PinElement::identity(2), 1, &[0.0], 0.1).unwrap_err();
    assert!(matches!(err, OrthoError::FrameNotSuited { .. }));
}

// Canonical discretization

#[test]
fn line_is_reproduced_exactly() {
    let line = Line { origin: vec![0.5, -1.0, 2.0], velocity: vec![0.0, 0.0, 1.3] };
    let psi = frame_at(&line.origin, &[vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
    let d = canonical_discretization(&line, &psi, 1, 0.1, 30, false).unwrap();
    for (k, p) in d.points.iter().enumerate() {
        assert!(dist(p, &line.point(0.1 * k as f64)) <= 1e-13, "k = {k}");
    }
}

/// Constant curvature makes the discrete curve an inscribed polygon of the
/// circle itself (chord `εh`, turning angle `2 arcsin(εβ/2)`); only the
/// phase lags, by `O(ε³)` per step.
#[test]
fn unit_circle_discretization_is_inscribed_and_second_order() {
    let circle = Circle::planar(1.0, 1.0);
    let eps = [PI / 10.0, PI / 20.0, PI / 40.0, PI / 80.0];
    let mut errors = Vec::new();
    for &e in &eps {
        let steps = MeshSpec::steps_for(e, PI);
        let d = canonical_discretization(&circle, &PinElement::identity(2), 1, e, steps, false).unwrap();
        for (k, p) in d.points.iter().enumerate() {
            assert!((dist(p, &circle.center) - 1.0).abs() < 1e-12);
            // vertex k sits at arc angle 2k·arcsin(ε/2)
            let angle = 2.0 * k as f64 * (e / 2.0).asin();
            assert!(dist(p, &circle.point(angle)) < 1e-12, "ε = {e}, k = {k}");
        }
        errors.push(d.points.iter().enumerate().map(|(k, p)| dist(p, &circle.point(k as f64 * e))).fold(0.0, f64::max));
    }
    for (err, e) in errors.iter().zip(&eps) {
        assert!(*err <= 0.2 * e, "sup error {err} at ε = {e}");
    }
    let s = slope(&eps, &errors);
    assert!((1.8..=2.2).contains(&s), "slope {s}, errors {errors:?}");
}

#[test]
fn coarse_mesh_on_a_tight_circle_fails_the_square_root() {
    let circle = Circle::planar(0.1, 1.0);
    let err = canonical_discretization(&circle, &PinElement::identity(2), 1, 0.5, 4, false).unwrap_err();
    assert!(matches!(err, OrthoError::Lattice(_) | OrthoError::SqrtDomain { .. }), "{err:?}");
}

// C-surfaces

#[test]
fn flat_data_gives_the_identity_grid() {
    let mesh = MeshSpec::cube(2, 0.25, 6).unwrap();
    let data = LameGoursat {
        psi0: PinElement::identity(2),
        f: [1, 2],
        splitting: Splitting::Gamma,
        h: [vec![1.0; 6], vec![1.0; 6]],
        beta: [vec![vec![0.0]; 6], vec![vec![0.0]; 6]],
        split: vec![vec![0.0; 6]; 6],
    };
    let sol = csurface_solve(&data, &mesh).unwrap();
    for s in mesh.sites() {
        let want = [0.25 * s[0] as f64, 0.25 * s[1] as f64];
        assert!(dist(sol.point(&s), &want) < 1e-14, "{s:?}");
    }
}

fn random_lame_corner(rng: &mut ChaCha8Rng, n: usize, f: [usize; 2], splitting: Splitting) -> Vec<Vec<f64>> {
    let sys = LameSystem2D::new(n, f, splitting);
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let dirs: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { rng.gen_range(-0.3..0.3) }).collect())
        .collect();
    // orthonormalize by Gram–Schmidt
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for d in dirs {
        let mut v = d.clone();
        for b in &basis {
            let c: f64 = v.iter().zip(b).map(|(p, q)| p * q).sum();
            v = v.iter().zip(b).map(|(p, q)| p - c * q).collect();
        }
        basis.push(unit(&v));
    }
    let det = if n == 2 { basis[0][0] * basis[1][1] - basis[0][1] * basis[1][0] } else { 1.0 };
    if n == 2 && det < 0.0 {
        basis[1] = basis[1].iter().map(|v| -v).collect();
    }
    let psi = if n == 2 {
        frame_at(&x, &basis)
    } else {
        // any orientation-compatible completion: translate the identity frame
        translation_frame(&x)
    };
    let h = [rng.gen_range(0.5..1.5), rng.gen_range(0.5..1.5)];
    let b1: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b2: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    sys.corner_values(&psi, h, [&b1, &b2], rng.gen_range(-1.0..1.0))
}

#[test]
fn lame_system_is_consistent_on_random_cubes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..1000 {
        let (n, f, splitting) = match trial % 4 {
            0 => (2, [1, 2], Splitting::Gamma),
            1 => (3, [1, 3], Splitting::Gamma),
            2 => (3, [2, 1], Splitting::Alpha),
            _ => (4, [2, 4], Splitting::Gamma),
        };
        let sys = LameSystem2D::new(n, f, splitting);
        let corner = random_lame_corner(&mut rng, n, f, splitting);
        let eps = [rng.gen_range(0.05..0.2), rng.gen_range(0.05..0.2)];
        let r = consistency_residual(&sys, &corner, &eps).unwrap();
        assert!(r <= 1e-10, "trial {trial}: residual {r:e}");
    }
}

#[test]
fn elliptic_surface_satisfies_every_identity() {
    for stagger in [false, true] {
        let sol = elliptic_surface(PI / 20.0, 1.2, stagger);
        let inv = sol.invariants().unwrap();
        assert!(inv.frame <= 1e-12, "{inv:?}");
        assert!(inv.edge <= 1e-11, "{inv:?}");
        assert!(inv.circle_constraint <= 1e-12, "{inv:?}");
        assert!(inv.normalizer <= 1e-12, "{inv:?}");
        assert!(inv.rotation <= 1e-11, "{inv:?}");
        assert!(inv.e_inf_drift <= 1e-10, "{inv:?}");
        assert!(inv.circularity <= 1e-9, "{inv:?}");
    }
}

#[test]
fn elliptic_surface_converges_at_rate_one() {
    let eps = [PI / 10.0, PI / 20.0, PI / 40.0, PI / 80.0];
    for stagger in [false, true] {
        // the same rectangle [A, A + 3π/10]² at every level
        let errors: Vec<f64> = eps.iter().map(|&e| elliptic_error(&elliptic_surface(e, 0.3 * PI, stagger))).collect();
        let s = slope(&eps, &errors);
        assert!((0.8..=1.2).contains(&s), "stagger {stagger}: slope {s}, errors {errors:?}");
        for w in errors.windows(2) {
            assert!(w[1] < w[0]);
        }
    }
}

#[test]
fn coordinate_lines_become_orthogonal() {
    let eps = [PI / 10.0, PI / 20.0, PI / 40.0];
    let cosines: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let sol = elliptic_surface(e, 1.2, false);
            sol.quad_sites().map(|s| sol.derived(&s).unwrap().cos_angle().abs()).fold(0.0, f64::max)
        })
        .collect();
    let s = slope(&eps, &cosines);
    assert!((0.8..=1.2).contains(&s), "slope {s}, {cosines:?}");
}

#[test]
fn axis_points_match_the_canonical_discretization() {
    let eps = PI / 20.0;
    let sol = elliptic_surface(eps, 1.2, false);
    let steps = sol.mesh().steps(0);
    for (dir, f) in [(0, 1), (1, 2)] {
        let d = canonical_discretization(&ell_curve(dir), &ell_frame(), f, eps, steps, false).unwrap();
        for k in 0..=steps {
            let site = if dir == 0 { [k, 0] } else { [0, k] };
            let p = frame_to_point(&sol.frame(&site)).unwrap();
            assert!(dist(&p, &d.points[k]) <= 1e-10, "dir {dir}, k {k}");
        }
    }
}

// Circularity predicate

#[test]
fn circularity_examples() {
    let on_circle: Vec<Vec<f64>> = [0.3, 1.4, 2.9, 5.0].iter().map(|t: &f64| vec![t.cos(), t.sin()]).collect();
    let refs: Vec<&[f64]> = on_circle.iter().map(|p| p.as_slice()).collect();
    assert!(circularity_residual(&refs).unwrap() <= 1e-13);
    let off: [&[f64]; 4] = [&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.1]];
    let r = circularity_residual(&off).unwrap();
    // circumcircle of the first three: centre (½, ½), radius 1/√2; the fourth point is 0.0707 outside
    let c = circumcircle(off[0], off[1], off[2]).unwrap();
    assert!((c.offset(off[3]) - ((0.25f64 + 0.36).sqrt() - 0.5f64.sqrt())).abs() < 1e-15);
    assert!(r > 1e-2, "{r}");
    let twice: [&[f64]; 4] = [&[0.0, 0.0], &[1.0, 0.0], &[0.0, 0.0], &[1.0, 1.0]];
    assert_eq!(circularity_residual(&twice), Err(OrthoError::CoincidentPoints));
}

// Orthogonal systems in ℝ³

#[test]
fn flat_planes_assemble_to_a_cubic_grid() {
    let e = |k: usize| {
        let mut v = vec![0.0; 3];
        v[k] = 1.0;
        v
    };
    let curves: Vec<Box<dyn SmoothCurve>> =
        (0..3).map(|k| Box::new(Line { origin: vec![0.0; 3], velocity: e(k) }) as Box<dyn SmoothCurve>).collect();
    let data = OrthoData { curves, gamma: Box::new(|_, _, _, _| 0.0), psi0: PinElement::identity(3), stagger: false };
    let mesh = MeshSpec::cube(3, 0.2, 4).unwrap();
    let sys = orthosys_assemble(&data, &mesh).unwrap();
    for s in mesh.sites() {
        let want: Vec<f64> = s.iter().map(|&k| 0.2 * k as f64).collect();
        assert!(dist(sys.net.point(&s), &want) < 1e-13, "{s:?}");
    }
}

#[test]
fn spherical_system_converges_and_stays_circular() {
    let r = 0.6;
    let eps = [r / 4.0, r / 8.0, r / 16.0];
    let data = sph_data(false);
    let mut errors = Vec::new();
    for &e in &eps {
        let mesh = MeshSpec::cube(3, e, MeshSpec::steps_for(e, r)).unwrap();
        let sys = orthosys_assemble(&data, &mesh).unwrap();
        let c = sys.circularity().unwrap();
        assert!(c <= 1e-9, "ε = {e}: circularity {c:e}");
        for ((i, j), s) in sys.surfaces.iter().map(|(p, s)| ((p[0], p[1]), s)) {
            assert!(s.circularity().unwrap() <= 1e-9, "surface ({i}, {j})");
        }
        errors.push(sph_error(&sys.net));
    }
    // lines and circles as coordinate curves: the error is O(ε) and in fact
    // second order
    for (err, e) in errors.iter().zip(&eps) {
        assert!(*err <= 0.1 * e, "sup error {err} at ε = {e}");
    }
    let s = slope(&eps, &errors);
    assert!((1.8..=2.2).contains(&s), "slope {s}, errors {errors:?}");
}

/// Inversion in the unit sphere about `c`.
fn invert(c: &[f64], p: &[f64]) -> Vec<f64> {
    let d: Vec<f64> = p.iter().zip(c).map(|(a, b)| a - b).collect();
    let q: f64 = d.iter().map(|x| x * x).sum();
    c.iter().zip(&d).map(|(a, b)| a + b / q).collect()
}

/// Second intersection of the circles `(p, a1, b1)` and `(p, a2, b2)`:
/// after inversion about `p` both are lines, met in the least-squares sense.
fn second_intersection(p: &[f64], a1: &[f64], b1: &[f64], a2: &[f64], b2: &[f64]) -> Vec<f64> {
    let (u1, w1) = (invert(p, a1), invert(p, b1));
    let (u2, w2) = (invert(p, a2), invert(p, b2));
    let d1: Vec<f64> = w1.iter().zip(&u1).map(|(a, b)| a - b).collect();
    let d2: Vec<f64> = w2.iter().zip(&u2).map(|(a, b)| a - b).collect();
    let r: Vec<f64> = u2.iter().zip(&u1).map(|(a, b)| a - b).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    // u1 + s d1 = u2 + t d2
    let (a11, a12, a22) = (dot(&d1, &d1), -dot(&d1, &d2), dot(&d2, &d2));
    let (b1v, b2v) = (dot(&d1, &r), -dot(&d2, &r));
    let det = a11 * a22 - a12 * a12;
    let s = (b1v * a22 - a12 * b2v) / det;
    let q: Vec<f64> = u1.iter().zip(&d1).map(|(a, b)| a + s * b).collect();
    invert(p, &q)
}

#[test]
fn eighth_vertex_is_the_miquel_point() {
    let data = sph_data(true);
    let e = 0.1;
    let mesh = MeshSpec::cube(3, e, 5).unwrap();
    let sys = orthosys_assemble(&data, &mesh).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let base: Vec<usize> = (0..3).map(|_| rng.gen_range(0..5)).collect();
        let at = |d: [usize; 3]| -> Vec<f64> {
            let s: Vec<usize> = base.iter().zip(d).map(|(b, k)| b + k).collect();
            sys.net.point(&s).to_vec()
        };
        let (x1, x2, x3) = (at([1, 0, 0]), at([0, 1, 0]), at([0, 0, 1]));
        let (x12, x13, x23) = (at([1, 1, 0]), at([1, 0, 1]), at([0, 1, 1]));
        // circles (x1, x12, x13) and (x2, x12, x23) meet again at x123
        let miquel = second_intersection(&x12, &x1, &x13, &x2, &x23);
        let x123 = at([1, 1, 1]);
        assert!(dist(&miquel, &x123) <= 1e-9 * e, "{base:?}: {:e}", dist(&miquel, &x123));
        // the third circle passes through it as well
        let third: [&[f64]; 4] = [&x3, &x13, &x23, &miquel];
        assert!(circularity_residual(&third).unwrap() <= 1e-9 * e);
    }
}

// Ribaucour pairs

#[test]
fn line_with_vanishing_splitting_gives_a_parallel_line() {
    let line = Line { origin: vec![0.0, 0.0], velocity: vec![1.0, 0.0] };
    let mesh = MeshSpec::with_tail(1, 1, 0.1, 20).unwrap();
    let data = LameGoursat::ribaucour_from_curve(&line, &|_| 0.0, &[0.0, 0.7], None, &mesh, false).unwrap();
    let sol = ribaucour_solve(&data, &mesh).unwrap();
    let (x, xp) = sol.layers();
    for (k, (p, q)) in x.iter().zip(&xp).enumerate() {
        assert!(dist(p, &[0.1 * k as f64, 0.0]) < 1e-13);
        assert!(dist(q, &[0.1 * k as f64, 0.7]) < 1e-13, "{q:?}");
    }
    assert!(sol.enveloping_residual() <= 1e-9);
}

#[test]
fn seed_outside_the_domain_is_rejected() {
    let line = Line { origin: vec![0.0; 3], velocity: vec![1.0, 0.0, 0.0] };
    let mesh = MeshSpec::with_tail(1, 1, 0.1, 5).unwrap();
    let mut data = LameGoursat::ribaucour_from_curve(&line, &|_| 0.0, &[0.0, 1.0, 0.0], None, &mesh, false).unwrap();
    data.beta[1] = vec![vec![1.5, 1.5]];
    match ribaucour_solve(&data, &mesh) {
        Err(OrthoError::OutsideDomain { sum }) => assert!((sum - 4.5).abs() < 1e-15),
        other => panic!("{other:?}"),
    }
}

fn elliptic_ribaucour(eps: f64) -> LameSolution {
    let mesh = MeshSpec::with_tail(1, 1, eps, MeshSpec::steps_for(eps, 1.2)).unwrap();
    let alpha = |t: f64| 0.4 * (2.0 * t).sin() - 0.2;
    let x_plus = [ell(A, B)[0] + 0.2, ell(A, B)[1] + 0.5];
    let data = LameGoursat::ribaucour_from_curve(&ell_curve(0), &alpha, &x_plus, None, &mesh, false).unwrap();
    ribaucour_solve(&data, &mesh).unwrap()
}

#[test]
fn ribaucour_pair_converges_to_an_enveloping_pair() {
    let eps = [PI / 10.0, PI / 20.0, PI / 40.0, PI / 80.0];
    let mut residuals = Vec::new();
    for &e in &eps {
        let sol = elliptic_ribaucour(e);
        let inv = sol.invariants().unwrap();
        assert!(inv.circularity <= 1e-9 && inv.rotation <= 1e-11 && inv.circle_constraint <= 1e-12, "{inv:?}");
        residuals.push(sol.enveloping_residual());
    }
    let s = slope(&eps, &residuals);
    assert!((0.8..=1.2).contains(&s), "slope {s}, {residuals:?}");
}

/// A transform whose seed point is displaced by `offset` in the frame
/// `(e_r, e_θ, e_φ)` at the base point.
fn sph_transform(offset: [f64; 3], scale: f64) -> RibaucourTransform {
    let x0 = sph(R0, T0, 0.0);
    let frame = [sph(1.0, T0, 0.0), vec![T0.cos(), 0.0, -T0.sin()], vec![0.0, 1.0, 0.0]];
    let x_plus0 = (0..3).map(|c| x0[c] + (0..3).map(|k| offset[k] * frame[k][c]).sum::<f64>()).collect();
    RibaucourTransform {
        x_plus0,
        alpha: vec![
            Box::new(move |t| scale * (0.3 + t)),
            Box::new(move |t| -scale * t.cos()),
            Box::new(move |t| scale * 0.5 * t),
        ],
    }
}

#[test]
fn transformed_system_keeps_the_original_layer() {
    let data = sph_data(false);
    let e = 0.1;
    let mesh = MeshSpec::with_tail(3, 1, e, 4).unwrap();
    let pair = ribaucour_pair_3d(&data, &[sph_transform([0.2, 0.2, 0.2], 0.2)], &[], &mesh).unwrap();
    let direct = orthosys_assemble(&data, &MeshSpec::cube(3, e, 4).unwrap()).unwrap();
    let layer = pair.net.layer(&[0]);
    for s in direct.net.mesh().sites() {
        assert!(dist(layer.at(&s), direct.net.point(&s)) <= 1e-9);
    }
    // the transformed coordinate curves are the second layers of the curve pairs
    for (i, curve) in pair.curves[0].iter().enumerate() {
        let (_, plus) = curve.layers();
        for (k, p) in plus.iter().enumerate() {
            let mut site = vec![0; 4];
            site[i] = k;
            site[3] = 1;
            assert!(dist(pair.net.point(&site), p) <= 1e-9, "direction {i}, k {k}");
        }
    }
    let c = pair.circularity().unwrap();
    assert!(c <= 1e-9, "{c:e}");
}

#[test]
fn two_transforms_are_permutable() {
    let data = sph_data(false);
    let mesh = MeshSpec::with_tail(3, 2, 0.1, 3).unwrap();
    let transforms = [sph_transform([0.2, 0.2, 0.2], 0.2), sph_transform([-0.15, 0.2, 0.25], -0.3)];
    let pair = ribaucour_pair_3d(&data, &transforms, &[0.4], &mesh).unwrap();
    // corresponding points of the four systems
    for s in MeshSpec::cube(3, 0.1, 3).unwrap().sites() {
        let at = |a: usize, b: usize| {
            let mut t = s.clone();
            t.extend([a, b]);
            pair.net.point(&t).to_vec()
        };
        let q = [at(0, 0), at(1, 0), at(1, 1), at(0, 1)];
        let refs: Vec<&[f64]> = q.iter().map(|p| p.as_slice()).collect();
        let scale = lamenet::linalg::diameter(&refs);
        assert!(circularity_residual(&refs).unwrap() <= 1e-9 * scale, "{s:?}");
    }
    assert!(pair.circularity().unwrap() <= 1e-9);
    assert!(jonas_permutability_check(&pair.net) <= 1e-9);
}

#[test]
fn three_transforms_close_up() {
    let data = sph_data(false);
    let mesh = MeshSpec::with_tail(3, 3, 0.15, 2).unwrap();
    let transforms =
        [sph_transform([0.2, 0.2, 0.2], 0.2), sph_transform([-0.15, 0.2, 0.25], -0.3), sph_transform([0.2, -0.25, 0.15], 0.1)];
    let pair = ribaucour_pair_3d(&data, &transforms, &[0.4, 0.6, 0.5], &mesh).unwrap();
    assert!(pair.circularity().unwrap() <= 1e-9);
}

#[test]
fn mismatched_transform_data_is_reported() {
    let data = sph_data(false);
    let mesh = MeshSpec::with_tail(3, 2, 0.1, 2).unwrap();
    let err = ribaucour_pair_3d(&data, &[sph_transform([0.1, 0.2, 0.2], 0.1)], &[], &mesh).unwrap_err();
    assert!(matches!(err, OrthoError::DataMismatch(_)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sigma_is_a_unit_vector(
        h in 0.1f64..3.0,
        eps in 0.01f64..0.3,
        beta in proptest::collection::vec(-2.0f64..2.0, 3),
        f in 1usize..=4,
    ) {
        if let Ok(step) = FrameStep::new(4, f, eps, h, &beta) {
            let s = step.sigma();
            prop_assert!((s.norm_sq() - 1.0).abs() <= 1e-12);
            // no e_0 part: ⟨Σ, e_∞⟩ = 0
            prop_assert!(s.dot(&lamenet::clifford::MinkowskiVector::e_inf(4)).abs() <= 1e-15);
        }
    }

    #[test]
    fn concircular_points_pass_and_perturbed_points_fail(
        t in proptest::collection::vec(0.0f64..std::f64::consts::TAU, 4),
        r in 0.1f64..10.0,
        kick in 0.05f64..0.5,
    ) {
        let mut ts = t.clone();
        ts.sort_by(f64::total_cmp);
        prop_assume!(ts.windows(2).all(|w| w[1] - w[0] > 0.05) && ts[0] + std::f64::consts::TAU - ts[3] > 0.05);
        let pts: Vec<Vec<f64>> = ts.iter().map(|a| vec![1.0 + r * a.cos(), -2.0 + r * a.sin(), 0.5]).collect();
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        prop_assert!(circularity_residual(&refs).unwrap() <= 1e-12 * r);
        let mut moved = pts.clone();
        moved[3][2] += kick * r;
        let refs: Vec<&[f64]> = moved.iter().map(|p| p.as_slice()).collect();
        prop_assert!(circularity_residual(&refs).unwrap() > 1e-6 * r);
    }
}


