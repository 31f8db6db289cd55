use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{CommandKind, RunConfig};
use crate::{run, CliError};

/// Discrete conjugate nets and orthogonal systems from smooth data.
#[derive(Debug, Parser)]
#[command(name = "lamenet", version)]
pub struct Cli {
    /// File of `key = value` lines applied before the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Discrete C-surface of a 2D oracle.
    Csurface(Opts),
    /// Discrete conjugate net through the oracle's coordinate curves.
    Conjugate(Opts),
    /// Discrete orthogonal system of a 3D oracle.
    Orthosys(Opts),
    /// Ribaucour pair of curves (2D oracle) or of orthogonal systems (3D).
    Ribaucour(Opts),
    /// Convergence sweep against the oracle.
    Sweep(Opts),
}

#[derive(Debug, Args)]
struct Opts {
    /// elliptic, spherical, flat, flat3 or circle:<R>.
    #[arg(long)]
    oracle: Option<String>,
    /// Ambient dimension N.
    #[arg(short = 'n', long)]
    n: Option<String>,
    /// Lattice dimension m.
    #[arg(short = 'm', long)]
    m: Option<String>,
    /// Number of Ribaucour transforms m'.
    #[arg(long)]
    m_tail: Option<String>,
    /// Mesh size: a decimal or `pi/<int>`.
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    /// Comma-separated, strictly decreasing mesh sizes.
    #[arg(long, allow_hyphen_values = true)]
    eps_list: Option<String>,
    /// Extent of the coordinate box.
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    /// Base point of the coordinate box, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    offset: Option<String>,
    /// Sample the data half a step into each cell.
    #[arg(long)]
    stagger: bool,
    /// Sweep problem: curve, csurface or orthosys.
    #[arg(long)]
    kind: Option<String>,
    /// Highest difference-quotient order of a sweep.
    #[arg(long)]
    l_max: Option<String>,
    /// Ribaucour seed offsets in the unit coordinate frame, N per transform.
    #[arg(long, allow_hyphen_values = true)]
    shift: Option<String>,
    /// Ribaucour splitting constants, one per transform.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long)]
    csv: Option<String>,
    #[arg(long)]
    json: Option<String>,
    #[arg(long)]
    svg: Option<String>,
    /// Sweep report (JSON).
    #[arg(long)]
    report: Option<String>,
    #[arg(long)]
    circle_tol: Option<String>,
    #[arg(long)]
    circularity_tol: Option<String>,
}

impl Opts {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        let fields: [(&'static str, &Option<String>); 18] = [
            ("oracle", &self.oracle),
            ("n", &self.n),
            ("m", &self.m),
            ("m_tail", &self.m_tail),
            ("eps", &self.eps),
            ("eps_list", &self.eps_list),
            ("r", &self.r),
            ("offset", &self.offset),
            ("kind", &self.kind),
            ("l_max", &self.l_max),
            ("shift", &self.shift),
            ("alpha", &self.alpha),
            ("csv", &self.csv),
            ("json", &self.json),
            ("svg", &self.svg),
            ("report", &self.report),
            ("circle_tol", &self.circle_tol),
            ("circularity_tol", &self.circularity_tol),
        ];
        let mut out: Vec<_> = fields.iter().filter_map(|(k, v)| v.as_deref().map(|v| (*k, v))).collect();
        if self.stagger {
            out.push(("stagger", "true"));
        }
        out
    }
}

impl Cli {
    /// The run configuration: defaults, then the config file, then `LAME_*`
    /// variables from `env`, then flags.
    pub fn into_config(self, env: impl IntoIterator<Item = (String, String)>) -> Result<RunConfig, CliError> {
        let (kind, opts) = match &self.command {
            Cmd::Csurface(o) => (CommandKind::Csurface, o),
            Cmd::Conjugate(o) => (CommandKind::Conjugate, o),
            Cmd::Orthosys(o) => (CommandKind::Orthosys, o),
            Cmd::Ribaucour(o) => (CommandKind::Ribaucour, o),
            Cmd::Sweep(o) => (CommandKind::Sweep, o),
        };
        let mut config = RunConfig::new(kind);
        if let Some(path) = &self.config {
            config.apply_file(path)?;
        }
        config.apply_env(env)?;
        config.apply(opts.pairs())?;
        Ok(config)
    }
}

/// Parses `args`, runs, reports on stdout/stderr and returns the exit code.
pub fn main_with_args<I, T>(args: I, env: impl IntoIterator<Item = (String, String)>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = cli.into_config(env).and_then(|config| run(&config));
    match result {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            for path in &outcome.written {
                println!("wrote {}", path.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            e.exit_code()
        }
    }
}
