use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::lattice::{LatticeField, MeshSpec};

use super::build::{solve_from_oracle, ProblemKind};
use super::{AnalysisError, Oracle};

/// Errors at or below this count as zero; a sweep with only such errors is
/// flagged exact and has no slope.
pub const EXACT_TOL: f64 = 1e-12;

/// Highest difference-quotient order a sweep measures.
const MAX_ORDER: usize = 2;

/// An ε-sweep request.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub kind: ProblemKind,
    /// Mesh sizes, strictly decreasing; each must divide the snapped extent.
    pub eps: Vec<f64>,
    /// Requested extent; snapped down to a multiple of the largest ε.
    pub r: f64,
    /// Base point `ξ_0` of the coordinate box `ξ_0 + [0, r]^m`.
    pub offset: Vec<f64>,
    pub l_max: usize,
    pub stagger: bool,
}

/// Errors of one sweep level; `errors[ℓ]` is the `C^ℓ` norm of the
/// difference to the oracle restriction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepLevel {
    pub eps: f64,
    pub steps: usize,
    pub errors: Vec<f64>,
}

/// Least-squares line `log e = slope·log ε + intercept`; `residual` is the
/// root-mean-square deviation in `log e`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub oracle: String,
    pub kind: ProblemKind,
    pub extent: f64,
    pub offset: Vec<f64>,
    pub stagger: bool,
    pub levels: Vec<SweepLevel>,
    /// One fit per order `ℓ`; `None` when the errors vanish or cannot be fitted.
    pub fits: Vec<Option<RateFit>>,
    /// `error(ε_k) / error(ε_{k+1})` per order.
    pub ratios: Vec<Vec<f64>>,
    /// Every error is below [`EXACT_TOL`].
    pub exact: bool,
}

impl SweepReport {
    pub fn eps(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.eps).collect()
    }

    pub fn errors(&self, order: usize) -> Vec<f64> {
        self.levels.iter().map(|l| l.errors[order]).collect()
    }

    pub fn slope(&self, order: usize) -> Option<f64> {
        self.fits.get(order).copied().flatten().map(|f| f.slope)
    }
}

/// Ordinary least squares of `log errors` against `log eps`.
///
/// ```
/// use lamenet::analysis::rate_fit;
/// let fit = rate_fit(&[0.1, 0.05, 0.025], &[0.4, 0.2, 0.1]).unwrap();
/// assert!((fit.slope - 1.0).abs() < 1e-14 && fit.residual < 1e-14);
/// assert!(rate_fit(&[0.1, 0.0, 0.025], &[0.4, 0.2, 0.1]).is_err());
/// ```
pub fn rate_fit(errors: &[f64], eps: &[f64]) -> Result<RateFit, AnalysisError> {
    if errors.len() != eps.len() {
        return Err(AnalysisError::DegenerateFit(format!("{} errors for {} mesh sizes", errors.len(), eps.len())));
    }
    if errors.len() < 3 {
        return Err(AnalysisError::DegenerateFit(format!("{} points, need at least 3", errors.len())));
    }
    if let Some(bad) = errors.iter().chain(eps).find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(AnalysisError::DegenerateFit(format!("non-positive value {bad}")));
    }
    let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(AnalysisError::DegenerateFit("all mesh sizes coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    Ok(RateFit { slope, intercept, residual: (ss / n).sqrt() })
}

/// The largest multiple of `eps_max` not exceeding `r`, so that every level
/// of a sweep covers the same box.
pub fn snapped_extent(eps_max: f64, r: f64) -> f64 {
    eps_max * MeshSpec::steps_for(eps_max, r) as f64
}

fn level_steps(config: &SweepConfig) -> Result<(f64, Vec<usize>), AnalysisError> {
    let invalid = |s: String| Err(AnalysisError::InvalidSweep(s));
    if config.eps.is_empty() || config.eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return invalid("mesh sizes must be positive".into());
    }
    if config.eps.windows(2).any(|w| !(w[1] < w[0])) {
        return invalid("mesh sizes must be strictly decreasing".into());
    }
    if config.l_max > MAX_ORDER {
        return invalid(format!("order {} above the supported {MAX_ORDER}", config.l_max));
    }
    let extent = snapped_extent(config.eps[0], config.r);
    let coarsest = MeshSpec::steps_for(config.eps[0], config.r);
    if coarsest < config.l_max.max(1) {
        return invalid(format!("r = {} holds {coarsest} cells of ε = {}, need {}", config.r, config.eps[0], config.l_max.max(1)));
    }
    let mut steps = Vec::with_capacity(config.eps.len());
    for &e in &config.eps {
        let s = (extent / e).round();
        if (s * e - extent).abs() > 1e-9 * extent {
            return invalid(format!("ε = {e} does not divide the extent {extent}"));
        }
        steps.push(s as usize);
    }
    Ok((extent, steps))
}

fn run_level(
    config: &SweepConfig,
    oracle: &Arc<dyn Oracle>,
    eps: f64,
    steps: usize,
) -> Result<SweepLevel, AnalysisError> {
    let annotate = |e: AnalysisError| match e {
        AnalysisError::Ortho(source) => AnalysisError::Solver { eps, source },
        other => other,
    };
    let solved = solve_from_oracle(config.kind, oracle.clone(), &config.offset, eps, steps, config.stagger)
        .map_err(annotate)?;
    let points = solved.points();
    let mesh = points.mesh().clone();
    let mut exact = LatticeField::empty(mesh.clone(), oracle.ambient_dim());
    for site in mesh.sites() {
        let mut xi = config.offset.clone();
        for (i, k) in site.iter().enumerate() {
            xi[i] += *k as f64 * eps;
        }
        oracle.check(&xi)?;
        exact.set(&site, &oracle.point(&xi));
    }
    let diff = points.sub(&exact)?;
    let errors = (0..=config.l_max).map(|l| diff.cl_norm(l)).collect::<Result<_, _>>()?;
    Ok(SweepLevel { eps, steps, errors })
}

/// Solves `config.kind` from the oracle at every ε and measures the `C^ℓ`
/// errors against the oracle restricted to the lattice.
///
/// The box is `offset + [0, r_eff]^m` with `r_eff` snapped to the coarsest
/// grid. Levels run concurrently; the report does not depend on scheduling.
pub fn convergence_sweep(config: &SweepConfig, oracle: Arc<dyn Oracle>) -> Result<SweepReport, AnalysisError> {
    if config.offset.len() != oracle.dim() {
        return Err(AnalysisError::InvalidSweep(format!(
            "offset has {} coordinates, oracle `{}` has {}",
            config.offset.len(),
            oracle.name(),
            oracle.dim()
        )));
    }
    let (extent, steps) = level_steps(config)?;
    let results: Vec<Result<SweepLevel, AnalysisError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = config
            .eps
            .iter()
            .zip(&steps)
            .map(|(&e, &s)| {
                let oracle = &oracle;
                scope.spawn(move || run_level(config, oracle, e, s))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep level panicked")).collect()
    });
    let levels = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let exact = levels.iter().all(|l| l.errors.iter().all(|e| *e <= EXACT_TOL));
    let eps: Vec<f64> = levels.iter().map(|l| l.eps).collect();
    let mut fits = Vec::new();
    let mut ratios = Vec::new();
    for order in 0..=config.l_max {
        let errs: Vec<f64> = levels.iter().map(|l| l.errors[order]).collect();
        fits.push(if exact { None } else { rate_fit(&errs, &eps).ok() });
        ratios.push(errs.windows(2).map(|w| w[0] / w[1]).collect());
    }
    Ok(SweepReport {
        oracle: oracle.name(),
        kind: config.kind,
        extent,
        offset: config.offset.clone(),
        stagger: config.stagger,
        levels,
        fits,
        ratios,
        exact,
    })
}
