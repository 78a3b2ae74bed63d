//! Command-line experiments for the `layerfem` solvers.
//!
//! Exit codes: 0 on success, 1 for usage and I/O errors, 2 for numerical
//! failures. Errors are reported as one JSON object on a single line of
//! stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

pub mod config;
pub mod report;
pub mod verify;
mod commands;

use config::{Command, RunConfig, Settings, QUAD_ORDER_ENV};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Numerical(_) => "numerical",
            CliError::Io { .. } => "io",
        }
    }

    /// The single-line JSON written to stderr.
    pub fn to_json_line(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            error: &'a str,
            exit_code: i32,
            message: String,
        }
        serde_json::to_string(&Line {
            error: self.kind(),
            exit_code: self.exit_code(),
            message: self.to_string(),
        })
        .expect("error line serializes")
    }
}

impl From<layerfem::Error> for CliError {
    fn from(e: layerfem::Error) -> Self {
        use layerfem::Error as E;
        match e {
            E::ZeroPivot { .. }
            | E::Singular { .. }
            | E::SolveFailed { .. }
            | E::NonFiniteIntegrand { .. }
            | E::AllSolvesFailed
            | E::TooLarge(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "layerfem", version, about = "Spline Galerkin experiments for singularly perturbed two-point problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Solve once and write knot values, errors and a summary
    Solve {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of elements
        #[arg(long = "N", value_name = "N")]
        elements: Option<String>,
        /// Mesh ratio h_m / h_{m-1}; 1 gives a uniform mesh
        #[arg(long)]
        sigma: Option<String>,
    },
    /// Error against the mesh ratio over a grid
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long = "N", value_name = "N")]
        elements: Option<String>,
        /// Ratio grid as lo:step:hi
        #[arg(long)]
        grid: Option<String>,
    },
    /// Golden-section search for the mesh ratio
    Tune {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long = "N", value_name = "N")]
        elements: Option<String>,
        /// Search interval as lo:hi, within (0, 1]
        #[arg(long)]
        interval: Option<String>,
        /// Bracket width at which the search stops
        #[arg(long)]
        tol: Option<String>,
    },
    /// Observed convergence orders over doubling element counts
    Converge {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        sigma: Option<String>,
        /// Comma-separated doubling sequence, e.g. 32,64,128,256
        #[arg(long = "n-list")]
        n_list: Option<String>,
    },
    /// Run the oracle checks
    Verify,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Flat key = value file; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// lorenz, manufactured or custom
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long)]
    pub eps: Option<String>,
    /// Convection coefficient p(x) (custom problems)
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Reaction coefficient q(x) (custom problems)
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Source f(x) (custom problems)
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    /// Exact solution u(x), enables error reports (custom problems)
    #[arg(long, allow_hyphen_values = true)]
    pub exact: Option<String>,
    /// u(0) (custom problems)
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// u(1) (custom problems)
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    /// galerkin, subdomain or both
    #[arg(long)]
    pub method: Option<String>,
    /// Gauss-Legendre points per element (1..=16)
    #[arg(long = "quad-order")]
    pub quad_order: Option<String>,
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
    /// Subdomain load f(x_m) instead of the element integral
    #[arg(long = "point-load")]
    pub point_load: bool,
    /// Sample p and q at element midpoints in the subdomain method
    #[arg(long)]
    pub midpoint: bool,
}

impl CommonArgs {
    fn settings(&self) -> Settings {
        let mut s = Settings::new();
        s.set_opt("problem", self.problem.as_ref());
        s.set_opt("eps", self.eps.as_ref());
        s.set_opt("p", self.p.as_ref());
        s.set_opt("q", self.q.as_ref());
        s.set_opt("f", self.f.as_ref());
        s.set_opt("exact", self.exact.as_ref());
        s.set_opt("lambda", self.lambda.as_ref());
        s.set_opt("beta", self.beta.as_ref());
        s.set_opt("method", self.method.as_ref());
        s.set_opt("quad-order", self.quad_order.as_ref());
        s.set_opt("out-dir", self.out_dir.as_ref().map(|p| p.display()));
        s.set_opt("point-load", self.point_load.then_some("true"));
        s.set_opt("midpoint", self.midpoint.then_some("true"));
        s
    }
}

/// Merge flags over the config file and resolve.
fn resolve(command: Command, common: &CommonArgs, mut flags: Settings) -> Result<RunConfig, CliError> {
    flags = common.settings().over(flags);
    let merged = match &common.config {
        Some(path) => flags.over(Settings::read(path)?),
        None => flags,
    };
    let env = std::env::var(QUAD_ORDER_ENV).ok();
    RunConfig::resolve(command, &merged, env.as_deref())
}

fn run_verify(stdout: &mut impl Write) -> Result<(), CliError> {
    // the oracle problems deliberately include p = 0 or q = 0
    let level = log::max_level();
    log::set_max_level(log::LevelFilter::Error);
    let checks = verify::run_all();
    log::set_max_level(level);
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        let tag = if c.passed { "ok  " } else { "FAIL" };
        let _ = writeln!(stdout, "{tag} {}: {}", c.name, c.detail);
    }
    let _ = writeln!(stdout, "{} checks, {failed} failed", checks.len());
    if failed > 0 {
        Err(CliError::Numerical(format!("{failed} verification checks failed")))
    } else {
        Ok(())
    }
}

fn dispatch(cli: Cli, stdout: &mut impl Write) -> Result<(), CliError> {
    let (command, common, flags) = match cli.command {
        Cmd::Verify => return run_verify(stdout),
        Cmd::Solve { common, elements, sigma } => {
            let mut f = Settings::new();
            f.set_opt("N", elements);
            f.set_opt("sigma", sigma);
            (Command::Solve, common, f)
        }
        Cmd::Sweep { common, elements, grid } => {
            let mut f = Settings::new();
            f.set_opt("N", elements);
            f.set_opt("grid", grid);
            (Command::Sweep, common, f)
        }
        Cmd::Tune { common, elements, interval, tol } => {
            let mut f = Settings::new();
            f.set_opt("N", elements);
            f.set_opt("interval", interval);
            f.set_opt("tol", tol);
            (Command::Tune, common, f)
        }
        Cmd::Converge { common, sigma, n_list } => {
            let mut f = Settings::new();
            f.set_opt("sigma", sigma);
            f.set_opt("n-list", n_list);
            (Command::Converge, common, f)
        }
    };
    let config = resolve(command, &common, flags)?;
    let artifacts = commands::execute(&config)?;
    let written = report::write_all(&config.out_dir, &artifacts.files)?;
    for line in &artifacts.messages {
        let _ = writeln!(stdout, "{line}");
    }
    for path in written {
        let _ = writeln!(stdout, "wrote {}", path.display());
    }
    Ok(())
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", e.render());
                return 0;
            }
            let message = e.render().to_string();
            let first = message.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            let err = CliError::Usage(first.trim_start_matches("error: ").to_string());
            let _ = writeln!(stderr, "{}", err.to_json_line());
            return err.exit_code();
        }
    };
    match dispatch(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.to_json_line());
            e.exit_code()
        }
    }
}
