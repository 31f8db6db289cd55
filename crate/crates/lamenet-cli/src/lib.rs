//! Command-line front end for `lamenet`: config-driven solves, lattice
//! exports (CSV, JSON), SVG circle patterns and convergence sweeps.
//!
//! ```no_run
//! use lamenet_cli::{run, CommandKind, RunConfig};
//!
//! let mut config = RunConfig::new(CommandKind::Csurface);
//! config.apply([("eps", "pi/20"), ("svg", "elliptic.svg")]).unwrap();
//! let outcome = run(&config).unwrap();
//! assert!(!outcome.circles.is_empty());
//! ```

mod cli;
mod config;
mod export;
mod run;

use std::path::PathBuf;

pub use cli::{main_with_args, Cli};
pub use config::{parse_number, CommandKind, RunConfig, Tolerances, DEFAULT_R, ENV_PREFIX};
pub use export::{circle_records, read_csv, svg_document, write_csv, CircleRecord, LatticeJson, Table};
pub use run::{run, Outcome, ReportJson};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("SVG export needs planar data, got N = {n}")]
    NonPlanarExport { n: usize },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("format error: {0}")]
    Format(String),
    #[error("solver failed{}: {source}", eps.map(|e| format!(" at ε = {e}")).unwrap_or_default())]
    Solver {
        eps: Option<f64>,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    /// 2 for requests that cannot be run as given, 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::NonPlanarExport { .. } => 2,
            _ => 1,
        }
    }
}
