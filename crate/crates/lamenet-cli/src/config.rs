use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use lamenet::analysis::ProblemKind;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Prefix of environment variables that override tolerance knobs.
pub const ENV_PREFIX: &str = "LAME_";

/// Default extent of the coordinate box: three cells of ε = π/10.
pub const DEFAULT_R: f64 = 0.3 * PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Csurface,
    Conjugate,
    Orthosys,
    Ribaucour,
    Sweep,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Csurface => "csurface",
            CommandKind::Conjugate => "conjugate",
            CommandKind::Orthosys => "orthosys",
            CommandKind::Ribaucour => "ribaucour",
            CommandKind::Sweep => "sweep",
        }
    }
}

/// Acceptance thresholds applied to solver output before anything is written.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative distance of a cell's fourth vertex to the circumcircle of
    /// the first three.
    pub circle: f64,
    /// Relative circularity residual of every elementary quad.
    pub circularity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { circle: 1e-8, circularity: 1e-9 }
    }
}

/// Everything one invocation needs. Built from defaults, then a config
/// file, then `LAME_*` variables, then command-line flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub oracle: String,
    /// Ambient dimension N; checked against the oracle when given.
    pub n: Option<usize>,
    /// Lattice dimension m; checked against the command when given.
    pub m: Option<usize>,
    /// Number of transformation directions m'.
    pub m_tail: usize,
    pub eps: Option<f64>,
    pub eps_list: Vec<f64>,
    pub r: f64,
    /// Base point of the coordinate box; defaults per oracle.
    pub offset: Option<Vec<f64>>,
    pub stagger: bool,
    /// Problem solved by a sweep.
    pub kind: ProblemKind,
    pub l_max: usize,
    /// Ribaucour seeds: `X⁺(0) − X(0)` in the unit coordinate frame, N
    /// numbers per transform.
    pub shift: Vec<f64>,
    /// Ribaucour splitting, one constant per transform.
    pub alpha: Vec<f64>,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub tolerances: Tolerances,
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        let oracle = match command {
            CommandKind::Orthosys => "spherical",
            _ => "elliptic",
        };
        Self {
            command,
            oracle: oracle.into(),
            n: None,
            m: None,
            m_tail: 1,
            eps: None,
            eps_list: Vec::new(),
            r: DEFAULT_R,
            offset: None,
            stagger: false,
            kind: ProblemKind::Csurface,
            l_max: 1,
            shift: Vec::new(),
            alpha: Vec::new(),
            csv: None,
            json: None,
            svg: None,
            report: None,
            tolerances: Tolerances::default(),
        }
    }

    /// Applies `key = value` settings in order; later keys win.
    pub fn apply<'a>(&mut self, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<(), CliError> {
        for (key, value) in pairs {
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let bad = |what: &str| CliError::Config(format!("{key}: {what} `{value}`"));
        match key {
            "oracle" => self.oracle = value.to_string(),
            "n" => self.n = Some(value.parse().map_err(|_| bad("not a count"))?),
            "m" => self.m = Some(value.parse().map_err(|_| bad("not a count"))?),
            "m_tail" | "m'" => self.m_tail = value.parse().map_err(|_| bad("not a count"))?,
            "eps" => self.eps = Some(parse_positive(value).map_err(|e| bad(&e))?),
            "eps_list" | "eps-list" => self.eps_list = parse_list(value, parse_positive).map_err(|e| bad(&e))?,
            "r" => self.r = parse_positive(value).map_err(|e| bad(&e))?,
            "offset" => self.offset = Some(parse_list(value, parse_number).map_err(|e| bad(&e))?),
            "stagger" => self.stagger = parse_bool(value).ok_or_else(|| bad("not a boolean"))?,
            "kind" => {
                self.kind = match value {
                    "curve" => ProblemKind::Curve,
                    "csurface" => ProblemKind::Csurface,
                    "orthosys" => ProblemKind::Orthosys,
                    _ => return Err(bad("unknown problem kind")),
                }
            }
            "l_max" | "l-max" => self.l_max = value.parse().map_err(|_| bad("not a count"))?,
            "shift" => self.shift = parse_list(value, parse_number).map_err(|e| bad(&e))?,
            "alpha" => self.alpha = parse_list(value, parse_number).map_err(|e| bad(&e))?,
            "csv" => self.csv = Some(PathBuf::from(value)),
            "json" => self.json = Some(PathBuf::from(value)),
            "svg" => self.svg = Some(PathBuf::from(value)),
            "report" => self.report = Some(PathBuf::from(value)),
            "circle_tol" => self.tolerances.circle = parse_positive(value).map_err(|e| bad(&e))?,
            "circularity_tol" => self.tolerances.circularity = parse_positive(value).map_err(|e| bad(&e))?,
            _ => return Err(CliError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Reads a config file of `key = value` lines. Blank lines and lines
    /// starting with `#` are skipped; values may be quoted.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("{}:{}: expected `key = value`", path.display(), lineno + 1))
            })?;
            let value = value.trim().trim_matches('"');
            self.set(key.trim(), value).map_err(|e| match e {
                CliError::Config(msg) => CliError::Config(format!("{}:{}: {msg}", path.display(), lineno + 1)),
                e => e,
            })?;
        }
        Ok(())
    }

    /// Tolerance overrides from `LAME_CIRCLE_TOL` and `LAME_CIRCULARITY_TOL`.
    pub fn apply_env(&mut self, vars: impl IntoIterator<Item = (String, String)>) -> Result<(), CliError> {
        let vars: BTreeMap<String, String> = vars.into_iter().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect();
        for (key, value) in &vars {
            let knob = key[ENV_PREFIX.len()..].to_ascii_lowercase();
            match knob.as_str() {
                "circle_tol" | "circularity_tol" => self.set(&knob, value)?,
                _ => {}
            }
        }
        Ok(())
    }

    /// The base point of the coordinate box.
    pub fn base(&self, dim: usize) -> Vec<f64> {
        if let Some(o) = &self.offset {
            return o.clone();
        }
        match self.oracle.as_str() {
            "elliptic" => vec![0.3, 0.3],
            "spherical" => vec![1.0, 0.9, 0.0],
            _ => vec![0.0; dim],
        }
    }

    /// The single mesh size of a solve command.
    pub fn single_eps(&self) -> Result<f64, CliError> {
        self.eps.ok_or_else(|| CliError::Config(format!("{} needs --eps", self.command.name())))
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

/// Parses a decimal or a multiple of π: `0.157`, `pi/20`, `3pi/10`, `pi`.
///
/// ```
/// use lamenet_cli::parse_number;
/// assert_eq!(parse_number("pi/20").unwrap(), std::f64::consts::PI / 20.0);
/// assert_eq!(parse_number("3pi/10").unwrap(), 3.0 * std::f64::consts::PI / 10.0);
/// assert!(parse_number("pi/0").is_err());
/// ```
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once("pi") {
        Some((k, rest)) => {
            let k: f64 = match k {
                "" => 1.0,
                "-" => -1.0,
                k => k.parse().map_err(|_| format!("bad multiplier `{k}`"))?,
            };
            let d: u32 = match rest {
                "" => 1,
                r => r
                    .strip_prefix('/')
                    .and_then(|d| d.parse().ok())
                    .filter(|d| *d > 0)
                    .ok_or_else(|| format!("bad divisor `{r}`"))?,
            };
            k * PI / d as f64
        }
        None => s.parse().map_err(|_| "not a number".to_string())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err("not finite".into())
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_number(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err("must be positive".into())
    }
}

fn parse_list(s: &str, item: fn(&str) -> Result<f64, String>) -> Result<Vec<f64>, String> {
    let items: Result<Vec<f64>, String> = s.split(',').map(item).collect();
    let items = items?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}
