use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use lamenet::analysis::{
    builtin_oracle, convergence_sweep, coordinate_curve, ortho_data, solve_from_oracle, AnalysisError, Oracle,
    ProblemKind, Solved, SweepConfig, SweepReport,
};
use lamenet::conjugate::{solve_conjugate_net, ConjugateGoursat};
use lamenet::lattice::{LatticeField, MeshSpec};
use lamenet::orthogonal::{ribaucour_pair_3d, ribaucour_solve, LameGoursat, RibaucourTransform};
use serde::Serialize;

use crate::config::{CommandKind, RunConfig};
use crate::export::{circle_records, svg_document, write_csv, CircleRecord, LatticeJson, Table};
use crate::CliError;

/// Seeds used when the config gives no Ribaucour data, cycled per transform.
const DEFAULT_SHIFTS: [[f64; 3]; 3] = [[0.2, 0.2, 0.2], [-0.15, 0.2, 0.25], [0.2, -0.25, 0.15]];
const DEFAULT_ALPHAS: [f64; 3] = [0.2, -0.3, 0.1];

/// What a run produced.
#[derive(Debug, Default)]
pub struct Outcome {
    /// Human-readable summary, one line each.
    pub lines: Vec<String>,
    pub written: Vec<PathBuf>,
    pub table: Option<Table>,
    pub circles: Vec<CircleRecord>,
    pub report: Option<SweepReport>,
}

/// The sweep report file: the library report plus the headline slope.
#[derive(Debug, Serialize)]
pub struct ReportJson<'a> {
    pub version: &'static str,
    pub config: &'a RunConfig,
    /// Fitted slope of the sup-norm error, absent for exact sweeps.
    pub slope: Option<f64>,
    pub report: &'a SweepReport,
}

fn config_err(e: AnalysisError) -> CliError {
    match e {
        AnalysisError::Solver { eps, source } => CliError::Solver { eps: Some(eps), source: Box::new(source) },
        e @ (AnalysisError::UnknownOracle(_) | AnalysisError::InvalidSweep(_) | AnalysisError::SingularPoint { .. }) => {
            CliError::Config(e.to_string())
        }
        e => CliError::Solver { eps: None, source: Box::new(e) },
    }
}

fn solver_err(eps: f64) -> impl Fn(AnalysisError) -> CliError {
    move |e| match e {
        AnalysisError::Ortho(source) => CliError::Solver { eps: Some(eps), source: Box::new(source) },
        e => config_err(e),
    }
}

/// Runs one configured command and writes its artifacts.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let oracle: Arc<dyn Oracle> = Arc::from(builtin_oracle(&config.oracle).map_err(config_err)?);
    let n = oracle.ambient_dim();
    if let Some(want) = config.n {
        if want != n {
            return Err(CliError::Config(format!("N = {want}, but oracle `{}` lives in ℝ^{n}", config.oracle)));
        }
    }
    let outputs = [("csv", &config.csv), ("json", &config.json), ("svg", &config.svg)];
    if config.command == CommandKind::Sweep {
        if let Some((flag, _)) = outputs.iter().find(|(_, p)| p.is_some()) {
            return Err(CliError::Config(format!("sweep writes --report, not --{flag}")));
        }
        return sweep(config, oracle);
    }
    if config.report.is_some() {
        return Err(CliError::Config("--report belongs to sweep".into()));
    }
    if config.svg.is_some() && n > 2 {
        return Err(CliError::NonPlanarExport { n });
    }
    if config.svg.is_some() && config.command == CommandKind::Conjugate {
        return Err(CliError::Config("conjugate nets are not circular; --svg needs csurface or ribaucour".into()));
    }
    let eps = config.single_eps()?;
    let steps = MeshSpec::steps_for(eps, config.r);
    if steps == 0 {
        return Err(CliError::Config(format!("r = {} holds no cell of size ε = {eps}", config.r)));
    }
    let base = config.base(oracle.dim());
    if base.len() != oracle.dim() {
        return Err(CliError::Config(format!("offset needs {} coordinates for `{}`", oracle.dim(), config.oracle)));
    }
    let mut out = Outcome::default();
    let field = match config.command {
        CommandKind::Csurface => {
            expect_m(config, 2, oracle.as_ref())?;
            let solved = solve_from_oracle(ProblemKind::Csurface, oracle.clone(), &base, eps, steps, config.stagger)
                .map_err(solver_err(eps))?;
            let Solved::Csurface(sol) = solved else { unreachable!("csurface solve") };
            check_circularity(config, sol.circularity(), &mut out)?;
            sol.points().clone()
        }
        CommandKind::Orthosys => {
            let m = oracle.dim();
            if m < 3 {
                return Err(CliError::Config(format!("orthosys needs a 3D oracle, `{}` has {m}", config.oracle)));
            }
            expect_m(config, m, oracle.as_ref())?;
            let solved = solve_from_oracle(ProblemKind::Orthosys, oracle.clone(), &base, eps, steps, config.stagger)
                .map_err(solver_err(eps))?;
            let Solved::Orthosys(sys) = solved else { unreachable!("orthosys solve") };
            check_circularity(config, sys.circularity(), &mut out)?;
            sys.net.points().clone()
        }
        CommandKind::Conjugate => conjugate(config, oracle.clone(), &base, eps, steps, &mut out)?,
        CommandKind::Ribaucour => ribaucour(config, oracle.clone(), &base, eps, steps, &mut out)?,
        CommandKind::Sweep => unreachable!("handled above"),
    };
    let mesh = field.mesh();
    out.lines.insert(
        0,
        format!(
            "{} `{}`: ε = {eps}, {} sites, steps {:?}",
            config.command.name(),
            config.oracle,
            mesh.num_sites(),
            mesh.steps_all()
        ),
    );
    let table = Table::from_field(&field, &base);
    if let Some(path) = &config.csv {
        write_csv(&table, BufWriter::new(create(path)?)).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?;
        out.written.push(path.clone());
    }
    if let Some(path) = &config.json {
        write_json(path, &LatticeJson::new(&table, &field, config))?;
        out.written.push(path.clone());
    }
    if let Some(path) = &config.svg {
        let circles = circle_records(&field, config.tolerances.circle)?;
        std::fs::write(path, svg_document(&field, &circles)).map_err(|source| CliError::Io { path: path.clone(), source })?;
        out.lines.push(format!("{} circles, every cell within {:e}", circles.len(), config.tolerances.circle));
        out.written.push(path.clone());
        out.circles = circles;
    }
    out.table = Some(table);
    Ok(out)
}

fn expect_m(config: &RunConfig, m: usize, oracle: &dyn Oracle) -> Result<(), CliError> {
    if let Some(given) = config.m {
        if given != m {
            return Err(CliError::Config(format!("{} solves m = {m}, not {given}", config.command.name())));
        }
    }
    if oracle.dim() < m || oracle.ambient_dim() < m {
        return Err(CliError::Config(format!("oracle `{}` cannot carry m = {m}", config.oracle)));
    }
    Ok(())
}

fn check_circularity(
    config: &RunConfig,
    value: Result<f64, lamenet::orthogonal::OrthoError>,
    out: &mut Outcome,
) -> Result<(), CliError> {
    let c = value.map_err(|e| CliError::Check(e.to_string()))?;
    let tol = config.tolerances.circularity;
    if !(c <= tol) {
        return Err(CliError::Check(format!("relative circularity {c:e} above {tol:e}")));
    }
    out.lines.push(format!("circularity {c:.3e} (tolerance {tol:e})"));
    Ok(())
}

/// The conjugate net with the oracle's coordinate curves and its continuous
/// rotation coefficients `c_ij = h_i β_ij / h_j`.
fn conjugate(
    config: &RunConfig,
    oracle: Arc<dyn Oracle>,
    base: &[f64],
    eps: f64,
    steps: usize,
    out: &mut Outcome,
) -> Result<LatticeField, CliError> {
    let m = config.m.unwrap_or(oracle.dim());
    if !(2..=oracle.dim()).contains(&m) || oracle.ambient_dim() < m {
        return Err(CliError::Config(format!("conjugate needs 2 ≤ m ≤ {}, got {m}", oracle.dim())));
    }
    let mesh = MeshSpec::cube(m, eps, steps).map_err(|e| CliError::Config(e.to_string()))?;
    let at = |c: &[f64]| -> Vec<f64> {
        let mut xi = base.to_vec();
        xi.iter_mut().zip(c).for_each(|(x, d)| *x += d);
        xi
    };
    for site in mesh.sites() {
        oracle.check(&at(&mesh.coords(&site))).map_err(config_err)?;
    }
    let curves: Vec<_> = (0..m).map(|i| coordinate_curve(oracle.clone(), base, i)).collect();
    let fns: Vec<Box<dyn Fn(f64) -> Vec<f64>>> = curves
        .iter()
        .map(|c| Box::new(move |t| lamenet::orthogonal::SmoothCurve::point(c, t)) as Box<dyn Fn(f64) -> Vec<f64>>)
        .collect();
    let refs: Vec<&dyn Fn(f64) -> Vec<f64>> = fns.iter().map(|f| f.as_ref()).collect();
    let coeff = |i: usize, j: usize, c: &[f64]| {
        let xi = at(c);
        oracle.h(i, &xi) * oracle.beta(i, j, &xi) / oracle.h(j, &xi)
    };
    let data = ConjugateGoursat::from_curves(&mesh, &refs, coeff)
        .map_err(|e| CliError::Solver { eps: Some(eps), source: Box::new(e) })?;
    let net = solve_conjugate_net(&data).map_err(|e| CliError::Solver { eps: Some(eps), source: Box::new(e) })?;
    out.lines.push(format!("planarity residual {:.3e}", net.planarity_residual()));
    Ok(net.points().clone())
}

/// A Ribaucour pair of the first coordinate curve (2D oracles) or an
/// orthogonal system with `m'` Ribaucour transforms (3D oracles).
fn ribaucour(
    config: &RunConfig,
    oracle: Arc<dyn Oracle>,
    base: &[f64],
    eps: f64,
    steps: usize,
    out: &mut Outcome,
) -> Result<LatticeField, CliError> {
    let n = oracle.ambient_dim();
    let dim = oracle.dim();
    let mt = config.m_tail;
    if mt == 0 {
        return Err(CliError::Config("ribaucour needs m' ≥ 1".into()));
    }
    let shifts: Vec<Vec<f64>> = if config.shift.is_empty() {
        (0..mt).map(|a| DEFAULT_SHIFTS[a % 3][..n.min(3)].to_vec()).collect()
    } else if config.shift.len() == n * mt {
        config.shift.chunks(n).map(<[f64]>::to_vec).collect()
    } else {
        return Err(CliError::Config(format!("shift needs N·m' = {} numbers", n * mt)));
    };
    if shifts.iter().any(|s| s.len() != n) {
        return Err(CliError::Config(format!("default shifts cover N ≤ 3, got N = {n}; pass --shift")));
    }
    let alphas: Vec<f64> = if config.alpha.is_empty() {
        (0..mt).map(|a| DEFAULT_ALPHAS[a % 3]).collect()
    } else if config.alpha.len() == mt {
        config.alpha.clone()
    } else {
        return Err(CliError::Config(format!("alpha needs m' = {mt} numbers")));
    };
    oracle.check(base).map_err(config_err)?;
    let x0 = oracle.point(base);
    // unit coordinate directions at the base point
    let frame: Vec<Vec<f64>> = (0..n.min(dim))
        .map(|i| {
            let d = oracle.partial(i, base);
            let l = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            d.iter().map(|v| v / l).collect()
        })
        .collect();
    if frame.len() < n {
        return Err(CliError::Config(format!("oracle `{}` does not span ℝ^{n}", config.oracle)));
    }
    let seed = |s: &[f64]| -> Vec<f64> {
        (0..n).map(|c| x0[c] + (0..n).map(|k| s[k] * frame[k][c]).sum::<f64>()).collect()
    };
    let wrap = |e: lamenet::orthogonal::OrthoError| CliError::Solver { eps: Some(eps), source: Box::new(e) };
    match dim {
        2 => {
            expect_m(config, 1, oracle.as_ref())?;
            if mt != 1 {
                return Err(CliError::Config("curve pairs carry m' = 1".into()));
            }
            let mesh = MeshSpec::with_tail(1, 1, eps, steps).map_err(|e| CliError::Config(e.to_string()))?;
            let curve = coordinate_curve(oracle.clone(), base, 0);
            let a = alphas[0];
            let data =
                LameGoursat::ribaucour_from_curve(&curve, &|_| a, &seed(&shifts[0]), None, &mesh, config.stagger)
                    .map_err(wrap)?;
            let sol = ribaucour_solve(&data, &mesh).map_err(wrap)?;
            check_circularity(config, sol.circularity(), out)?;
            out.lines.push(format!("enveloping residual {:.3e}", sol.enveloping_residual()));
            Ok(sol.points().clone())
        }
        3 => {
            expect_m(config, 3, oracle.as_ref())?;
            let data = ortho_data(oracle.clone(), base, 3, config.stagger).map_err(config_err)?;
            let transforms: Vec<RibaucourTransform> = shifts
                .iter()
                .zip(&alphas)
                .map(|(s, &a)| RibaucourTransform {
                    x_plus0: seed(s),
                    alpha: (0..3).map(|_| Box::new(move |_: f64| a) as Box<dyn Fn(f64) -> f64>).collect(),
                })
                .collect();
            let diagonals = vec![0.5; mt * (mt - 1) / 2];
            let mesh = MeshSpec::with_tail(3, mt, eps, steps).map_err(|e| CliError::Config(e.to_string()))?;
            let pair = ribaucour_pair_3d(&data, &transforms, &diagonals, &mesh).map_err(wrap)?;
            check_circularity(config, pair.circularity(), out)?;
            Ok(pair.net.points().clone())
        }
        d => Err(CliError::Config(format!("ribaucour needs a 2D or 3D oracle, `{}` has {d}", config.oracle))),
    }
}

fn sweep(config: &RunConfig, oracle: Arc<dyn Oracle>) -> Result<Outcome, CliError> {
    if config.eps_list.is_empty() {
        return Err(CliError::Config("sweep needs --eps-list".into()));
    }
    let dim = config.kind.dim(oracle.as_ref());
    let sweep = SweepConfig {
        kind: config.kind,
        eps: config.eps_list.clone(),
        r: config.r,
        offset: config.base(oracle.dim()),
        l_max: config.l_max,
        stagger: config.stagger,
    };
    let report = convergence_sweep(&sweep, oracle).map_err(config_err)?;
    let mut out = Outcome::default();
    out.lines.push(format!(
        "sweep `{}` ({:?}, m = {dim}) on extent {:.6}: {} levels",
        config.oracle,
        config.kind,
        report.extent,
        report.levels.len()
    ));
    for level in &report.levels {
        let errs: Vec<String> = level.errors.iter().map(|e| format!("{e:.4e}")).collect();
        out.lines.push(format!("  ε = {:.6} ({} steps): {}", level.eps, level.steps, errs.join(" ")));
    }
    if report.exact {
        out.lines.push("  exact: every error vanishes".into());
    }
    for (order, fit) in report.fits.iter().enumerate() {
        if let Some(f) = fit {
            out.lines.push(format!("  ℓ = {order}: slope {:.4} (residual {:.2e})", f.slope, f.residual));
        }
    }
    if let Some(path) = &config.report {
        let doc = ReportJson { version: lamenet::VERSION, config, slope: report.slope(0), report: &report };
        write_json(path, &doc)?;
        out.written.push(path.clone());
    }
    out.report = Some(report);
    Ok(out)
}

fn create(path: &Path) -> Result<File, CliError> {
    File::create(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Format(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}
