use std::f64::consts::PI;
use std::sync::Arc;

use lamenet::analysis::*;
use proptest::prelude::*;

const FD: f64 = 1e-4;

fn central(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    (f(x + FD) - f(x - FD)) / (2.0 * FD)
}

fn elliptic_sweep(l_max: usize, stagger: bool) -> SweepConfig {
    SweepConfig {
        kind: ProblemKind::Csurface,
        eps: vec![PI / 10.0, PI / 20.0, PI / 40.0, PI / 80.0],
        r: 1.2,
        offset: vec![0.3, 0.3],
        l_max,
        stagger,
    }
}

#[test]
fn elliptic_oracle_closed_forms() {
    let v = EllipticOracle.evaluate(0.0, PI / 2.0).unwrap();
    assert!(v.f[0].abs() < 1e-16 && v.f[1].abs() < 1e-16);
    assert_eq!(v.h, 1.0);
    assert_eq!(v.beta12, 0.0);
    assert!(v.beta21.abs() < 1e-16);
    // (1 − cosh 0 · cos π) / (2·1) = 1
    assert!((v.gamma - 1.0).abs() < 1e-15);
    assert_eq!(EllipticOracle.evaluate(0.0, 0.0), Err(AnalysisError::SingularPoint { xi: vec![0.0, 0.0] }));
    assert!(EllipticOracle.evaluate(0.0, PI).is_err());
}

#[test]
fn elliptic_gamma_matches_difference_quotients() {
    for a in 0..8 {
        for b in 0..8 {
            let (x1, x2) = (0.3 + 0.17 * a as f64, 0.3 + 0.17 * b as f64);
            let v = EllipticOracle.evaluate(x1, x2).unwrap();
            let d1b12 = central(|s| EllipticOracle.evaluate(s, x2).unwrap().beta12, x1);
            let d2b21 = central(|s| EllipticOracle.evaluate(x1, s).unwrap().beta21, x2);
            assert!((d1b12 - v.gamma).abs() <= 1e-6, "({x1}, {x2}): {d1b12} vs {}", v.gamma);
            assert!((d2b21 + v.gamma).abs() <= 1e-6, "({x1}, {x2})");
        }
    }
}

/// `h_i = |∂_iF|`, `∂_iF·∂_jF = 0`, `β_ij = ∂_ih_j / h_i`, `Γ_ij` from
/// difference quotients of `β`, all measured on the point map alone.
fn check_lame_data(oracle: &dyn Oracle, xi: &[f64]) {
    let m = oracle.dim();
    let shift = |i: usize, s: f64| {
        let mut x = xi.to_vec();
        x[i] += s;
        x
    };
    let fd_partial = |i: usize| -> Vec<f64> {
        let (p, q) = (oracle.point(&shift(i, FD)), oracle.point(&shift(i, -FD)));
        p.iter().zip(&q).map(|(a, b)| (a - b) / (2.0 * FD)).collect()
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    for i in 0..m {
        let d = oracle.partial(i, xi);
        let fd = fd_partial(i);
        assert!(d.iter().zip(&fd).all(|(a, b)| (a - b).abs() < 1e-7), "∂_{i}F at {xi:?}");
        assert!((dot(&d, &d).sqrt() - oracle.h(i, xi)).abs() < 1e-12);
        for j in 0..m {
            if i == j {
                continue;
            }
            assert!(dot(&d, &oracle.partial(j, xi)).abs() < 1e-12, "orthogonality at {xi:?}");
            let dh = central(|s| oracle.h(j, &shift(i, s - xi[i])), xi[i]);
            assert!((dh / oracle.h(i, xi) - oracle.beta(i, j, xi)).abs() < 1e-6, "β_{i}{j} at {xi:?}");
            if i < j {
                let dbij = central(|s| oracle.beta(i, j, &shift(i, s - xi[i])), xi[i]);
                let dbji = central(|s| oracle.beta(j, i, &shift(j, s - xi[j])), xi[j]);
                assert!(((dbij - dbji) / 2.0 - oracle.gamma(i, j, xi)).abs() < 1e-6, "Γ_{i}{j} at {xi:?}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn elliptic_oracle_is_a_consistent_orthogonal_system(x1 in 0.2f64..2.0, x2 in 0.1f64..3.0) {
        check_lame_data(&EllipticOracle, &[x1, x2]);
    }

    #[test]
    fn spherical_oracle_is_a_consistent_orthogonal_system(r in 0.3f64..3.0, t in 0.2f64..2.9, p in -3.0f64..3.0) {
        check_lame_data(&SphericalOracle, &[r, t, p]);
    }

    #[test]
    fn fit_recovers_power_laws(c in 0.01f64..100.0, p in 0.5f64..3.0) {
        let eps = [0.4, 0.2, 0.1, 0.05];
        let errs: Vec<f64> = eps.iter().map(|e: &f64| c * e.powf(p)).collect();
        let fit = rate_fit(&errs, &eps).unwrap();
        prop_assert!((fit.slope - p).abs() < 1e-12);
        prop_assert!((fit.intercept - c.ln()).abs() < 1e-10);
    }
}

#[test]
fn rate_fit_examples() {
    let fit = rate_fit(&[0.1, 0.05, 0.025], &[0.4, 0.2, 0.1]).unwrap();
    assert!((fit.slope - 1.0).abs() < 1e-14);
    let fit = rate_fit(&[0.01, 0.0025, 0.000625], &[0.4, 0.2, 0.1]).unwrap();
    assert!((fit.slope - 2.0).abs() < 1e-14);
    assert!(matches!(rate_fit(&[0.1, 0.0, 0.025], &[0.4, 0.2, 0.1]), Err(AnalysisError::DegenerateFit(_))));
    assert!(matches!(rate_fit(&[0.1, 0.05], &[0.4, 0.2]), Err(AnalysisError::DegenerateFit(_))));
}

#[test]
fn flat_sweep_is_exact() {
    let config = SweepConfig {
        kind: ProblemKind::Csurface,
        eps: vec![0.2, 0.1, 0.05],
        r: 0.6,
        offset: vec![0.0, 0.0],
        l_max: 2,
        stagger: false,
    };
    let report = convergence_sweep(&config, Arc::new(FlatOracle { m: 2, n: 2 })).unwrap();
    assert!(report.exact);
    assert!(report.fits.iter().all(Option::is_none));
}

#[test]
fn elliptic_sweep_converges_at_rate_one() {
    for stagger in [false, true] {
        let report = convergence_sweep(&elliptic_sweep(1, stagger), Arc::new(EllipticOracle)).unwrap();
        assert!((report.extent - 0.3 * PI).abs() < 1e-12);
        assert_eq!(report.levels.iter().map(|l| l.steps).collect::<Vec<_>>(), vec![3, 6, 12, 24]);
        for order in 0..=1 {
            let s = report.slope(order).unwrap();
            assert!((0.8..=1.2).contains(&s), "stagger {stagger}, ℓ = {order}: slope {s}, {:?}", report.errors(order));
            for w in report.errors(order).windows(2) {
                assert!(w[1] < w[0], "errors must decrease: {:?}", report.errors(order));
            }
        }
        for r in &report.ratios[0] {
            // staggered data is ten times more accurate and its first ratio
            // (3 → 6 cells) is still pre-asymptotic at 2.36
            let band = if stagger { 1.7..=2.4 } else { 1.7..=2.3 };
            assert!(band.contains(r), "stagger {stagger}: ratios {:?}", report.ratios[0]);
        }
    }
}

#[test]
fn second_difference_quotients_are_reported() {
    let report = convergence_sweep(&elliptic_sweep(2, false), Arc::new(EllipticOracle)).unwrap();
    assert_eq!(report.fits.len(), 3);
    assert!(report.levels.iter().all(|l| l.errors.len() == 3 && l.errors[2] >= l.errors[1]));
}

#[test]
fn sweeps_are_deterministic() {
    let a = convergence_sweep(&elliptic_sweep(1, false), Arc::new(EllipticOracle)).unwrap();
    let b = convergence_sweep(&elliptic_sweep(1, false), Arc::new(EllipticOracle)).unwrap();
    assert_eq!(a, b);
    let json = |r: &SweepReport| serde_json_like(r);
    assert_eq!(json(&a), json(&b));
}

/// Bitwise comparison of every float in a report.
fn serde_json_like(r: &SweepReport) -> Vec<u64> {
    r.levels.iter().flat_map(|l| l.errors.iter().map(|e| e.to_bits())).collect()
}

#[test]
fn constant_curvature_curves_superconverge() {
    // a unit-speed circle is discretized by an inscribed polygon: order 2
    let config = SweepConfig {
        kind: ProblemKind::Curve,
        eps: vec![PI / 10.0, PI / 20.0, PI / 40.0, PI / 80.0],
        r: PI,
        offset: vec![0.0],
        l_max: 0,
        stagger: false,
    };
    let report = convergence_sweep(&config, Arc::new(CircleOracle { radius: 1.0 })).unwrap();
    let s = report.slope(0).unwrap();
    assert!((1.8..=2.2).contains(&s), "slope {s}");
}

#[test]
fn spherical_sweep_runs_in_three_dimensions() {
    let config = SweepConfig {
        kind: ProblemKind::Orthosys,
        eps: vec![0.15, 0.075, 0.0375],
        r: 0.6,
        offset: vec![1.0, 0.9, 0.0],
        l_max: 0,
        stagger: false,
    };
    let report = convergence_sweep(&config, Arc::new(SphericalOracle)).unwrap();
    let errs = report.errors(0);
    for (e, eps) in errs.iter().zip(report.eps()) {
        assert!(*e <= 0.1 * eps);
    }
    assert!(report.slope(0).unwrap() > 0.8);
}

#[test]
fn solver_failures_carry_the_mesh_size() {
    let config = SweepConfig {
        kind: ProblemKind::Curve,
        eps: vec![0.5, 0.25, 0.125],
        r: 1.0,
        offset: vec![0.0],
        l_max: 0,
        stagger: false,
    };
    match convergence_sweep(&config, Arc::new(CircleOracle { radius: 0.1 })) {
        Err(AnalysisError::Solver { eps, .. }) => assert!(eps == 0.5 || eps == 0.25 || eps == 0.125),
        other => panic!("{other:?}"),
    }
}

#[test]
fn singular_boxes_are_rejected() {
    let mut config = elliptic_sweep(0, false);
    config.offset = vec![0.0, 0.0];
    assert!(matches!(convergence_sweep(&config, Arc::new(EllipticOracle)), Err(AnalysisError::SingularPoint { .. })));
}

#[test]
fn invalid_sweeps_are_rejected() {
    let mut config = elliptic_sweep(0, false);
    config.eps = vec![PI / 20.0, PI / 10.0, PI / 40.0];
    assert!(matches!(convergence_sweep(&config, Arc::new(EllipticOracle)), Err(AnalysisError::InvalidSweep(_))));
    config = elliptic_sweep(3, false);
    assert!(matches!(convergence_sweep(&config, Arc::new(EllipticOracle)), Err(AnalysisError::InvalidSweep(_))));
    config = elliptic_sweep(0, false);
    config.offset = vec![0.3];
    assert!(matches!(convergence_sweep(&config, Arc::new(EllipticOracle)), Err(AnalysisError::InvalidSweep(_))));
}
