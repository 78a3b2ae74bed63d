//! Run configuration: flat `key = value` files, command-line overrides and
//! resolution into validated settings.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use layerfem::problem::{catalog, Coefficient};
use layerfem::subdomain::{CoefficientSampling, LoadMode, SubdomainOptions};
use layerfem::{BvProblem, Method, SolverOptions};
use serde::Serialize;

use crate::CliError;

pub const QUAD_ORDER_ENV: &str = "LAYERFEM_QUAD_ORDER";
pub const DEFAULT_QUAD_ORDER: usize = 8;
pub const DEFAULT_OUT_DIR: &str = "layerfem-out";

/// Every key accepted in a config file. Flags use the same names.
pub const KEYS: &[&str] = &[
    "problem",
    "eps",
    "p",
    "q",
    "f",
    "exact",
    "lambda",
    "beta",
    "method",
    "N",
    "sigma",
    "grid",
    "interval",
    "tol",
    "n-list",
    "quad-order",
    "out-dir",
    "point-load",
    "midpoint",
];

const CUSTOM_ONLY: &[&str] = &["p", "q", "f", "exact", "lambda", "beta"];

/// Raw settings before validation, keyed by [`KEYS`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.0.insert(key.to_string(), value.into());
    }

    /// Set `key` only if `value` is present.
    pub fn set_opt(&mut self, key: &str, value: Option<impl ToString>) {
        if let Some(v) = value {
            self.set(key, v.to_string());
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    /// `self` wins over `base`.
    pub fn over(mut self, base: Settings) -> Settings {
        for (k, v) in base.0 {
            self.0.entry(k).or_insert(v);
        }
        self
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut settings = Settings::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "config line {}: expected 'key = value', got '{}'",
                    lineno + 1,
                    raw.trim()
                )));
            };
            let key = normalize_key(key.trim());
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("config line {}: unknown key '{key}'", lineno + 1)));
            }
            if settings.contains(&key) {
                return Err(CliError::Usage(format!("config line {}: duplicate key '{key}'", lineno + 1)));
            }
            settings.set(&key, value.trim());
        }
        Ok(settings)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

fn normalize_key(key: &str) -> String {
    match key {
        "N" | "n" => "N".to_string(),
        other => other.replace('_', "-").to_ascii_lowercase(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Solve,
    Sweep,
    Tune,
    Converge,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Sweep => "sweep",
            Command::Tune => "tune",
            Command::Converge => "converge",
        }
    }
}

/// How the mesh ratio is chosen.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RatioSetting {
    Fixed { sigma: f64 },
    Grid { lo: f64, step: f64, hi: f64 },
    Golden { lo: f64, hi: f64, tol: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemSpec {
    Catalog {
        name: String,
        eps: f64,
    },
    Custom {
        eps: f64,
        p: String,
        q: String,
        f: String,
        exact: Option<String>,
        lambda: f64,
        beta: f64,
    },
}

impl ProblemSpec {
    pub fn build(&self) -> Result<BvProblem, CliError> {
        match self {
            ProblemSpec::Catalog { name, eps } => catalog(name, *eps)
                .ok_or_else(|| CliError::Usage(format!("unknown problem '{name}'")))?
                .map_err(CliError::from),
            ProblemSpec::Custom { eps, p, q, f, exact, lambda, beta } => {
                let parse = |key: &str, text: &str| {
                    Coefficient::parse(text).map_err(|e| CliError::Usage(format!("--{key}: {e}")))
                };
                let problem = BvProblem::new(
                    "custom",
                    *eps,
                    parse("p", p)?,
                    parse("q", q)?,
                    parse("f", f)?,
                    *lambda,
                    *beta,
                )?;
                Ok(match exact {
                    Some(text) => problem.with_exact(parse("exact", text)?),
                    None => problem,
                })
            }
        }
    }
}

/// Validated settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub problem: ProblemSpec,
    #[serde(serialize_with = "serialize_methods")]
    pub methods: Vec<Method>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub elements: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub n_list: Vec<usize>,
    pub ratio: RatioSetting,
    pub quad_order: usize,
    pub point_load: bool,
    pub midpoint: bool,
    pub out_dir: PathBuf,
}

fn serialize_methods<S: serde::Serializer>(methods: &[Method], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(methods.iter().map(|m| m.as_str()))
}

impl RunConfig {
    /// Resolve merged settings for `command`. `env_quad_order` is the raw
    /// value of [`QUAD_ORDER_ENV`], used only when no setting gives one.
    pub fn resolve(
        command: Command,
        settings: &Settings,
        env_quad_order: Option<&str>,
    ) -> Result<Self, CliError> {
        check_ratio_conflicts(command, settings)?;
        let methods = parse_methods(settings.get("method").unwrap_or("both"))?;
        let problem = resolve_problem(settings)?;

        let quad_order = match settings.get("quad-order") {
            Some(v) => parse_usize("quad-order", v)?,
            None => match env_quad_order {
                Some(v) => parse_usize(QUAD_ORDER_ENV, v)?,
                None => DEFAULT_QUAD_ORDER,
            },
        };
        if !(1..=16).contains(&quad_order) {
            return Err(CliError::Usage(format!("quadrature order must be in 1..=16, got {quad_order}")));
        }

        let elements = match (command, settings.get("N")) {
            (Command::Converge, Some(_)) => {
                return Err(CliError::Usage("converge takes --n-list, not --N".into()))
            }
            (Command::Converge, None) => None,
            (_, Some(v)) => Some(parse_usize("N", v)?),
            (_, None) => return Err(CliError::Usage(format!("{} requires --N", command.as_str()))),
        };
        if let Some(n) = elements {
            if n < 2 {
                return Err(CliError::Usage(format!("--N must be at least 2, got {n}")));
            }
        }

        let n_list = if command == Command::Converge {
            parse_n_list(settings.get("n-list").unwrap_or("32,64,128,256"))?
        } else if settings.contains("n-list") {
            return Err(CliError::Usage(format!("--n-list is only used by converge, not {}", command.as_str())));
        } else {
            Vec::new()
        };

        let ratio = match command {
            Command::Solve | Command::Converge => RatioSetting::Fixed {
                sigma: match settings.get("sigma") {
                    Some(v) => parse_positive("sigma", v)?,
                    None => 1.0,
                },
            },
            Command::Sweep => {
                let text = settings
                    .get("grid")
                    .ok_or_else(|| CliError::Usage("sweep requires --grid lo:step:hi".into()))?;
                let (lo, step, hi) = parse_grid(text)?;
                RatioSetting::Grid { lo, step, hi }
            }
            Command::Tune => {
                let (lo, hi) = parse_interval(settings.get("interval").unwrap_or("0.05:1"))?;
                let tol = match settings.get("tol") {
                    Some(v) => parse_f64("tol", v)?,
                    None => 1e-3,
                };
                if !(tol >= 1e-4) {
                    return Err(CliError::Usage(format!("--tol must be at least 1e-4, got {tol}")));
                }
                RatioSetting::Golden { lo, hi, tol }
            }
        };

        Ok(Self {
            command,
            problem,
            methods,
            elements,
            n_list,
            ratio,
            quad_order,
            point_load: parse_bool("point-load", settings.get("point-load"))?,
            midpoint: parse_bool("midpoint", settings.get("midpoint"))?,
            out_dir: PathBuf::from(settings.get("out-dir").unwrap_or(DEFAULT_OUT_DIR)),
        })
    }


    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            quadrature_order: self.quad_order,
            subdomain: SubdomainOptions {
                load: if self.point_load { LoadMode::PointValue } else { LoadMode::Integral },
                sampling: if self.midpoint {
                    CoefficientSampling::Midpoint
                } else {
                    CoefficientSampling::LeftKnot
                },
            },
        }
    }
}

/// A fixed ratio, a grid and a search interval are mutually exclusive, and
/// each command accepts only its own kind.
fn check_ratio_conflicts(command: Command, settings: &Settings) -> Result<(), CliError> {
    let given: Vec<&str> = ["sigma", "grid", "interval", "tol"]
        .into_iter()
        .filter(|k| settings.contains(k))
        .collect();
    let allowed: &[&str] = match command {
        Command::Solve | Command::Converge => &["sigma"],
        Command::Sweep => &["grid"],
        Command::Tune => &["interval", "tol"],
    };
    let fixed = settings.contains("sigma");
    let search = settings.contains("grid") || settings.contains("interval");
    if (fixed && search) || (settings.contains("grid") && settings.contains("interval")) {
        return Err(CliError::Usage(format!("conflicting ratio settings: {}", given.join(", "))));
    }
    if let Some(bad) = given.iter().find(|k| !allowed.contains(k)) {
        return Err(CliError::Usage(format!(
            "conflicting ratio settings: '{bad}' is not used by {}",
            command.as_str()
        )));
    }
    Ok(())
}

fn resolve_problem(settings: &Settings) -> Result<ProblemSpec, CliError> {
    let name = settings.get("problem").unwrap_or("lorenz");
    let eps = parse_positive(
        "eps",
        settings
            .get("eps")
            .ok_or_else(|| CliError::Usage("--eps is required".into()))?,
    )?;
    match name {
        "custom" => {
            let required = |key: &str| {
                settings
                    .get(key)
                    .map(str::to_string)
                    .ok_or_else(|| CliError::Usage(format!("custom problem requires --{key}")))
            };
            let boundary = |key: &str| match settings.get(key) {
                Some(v) => parse_f64(key, v),
                None => Ok(0.0),
            };
            let spec = ProblemSpec::Custom {
                eps,
                p: required("p")?,
                q: required("q")?,
                f: required("f")?,
                exact: settings.get("exact").map(str::to_string),
                lambda: boundary("lambda")?,
                beta: boundary("beta")?,
            };
            // surface expression errors before any work is done
            for key in ["p", "q", "f", "exact"] {
                if let Some(text) = settings.get(key) {
                    Coefficient::parse(text).map_err(|e| CliError::Usage(format!("--{key}: {e}")))?;
                }
            }
            Ok(spec)
        }
        "lorenz" | "manufactured" => {
            if let Some(bad) = CUSTOM_ONLY.iter().find(|k| settings.contains(k)) {
                return Err(CliError::Usage(format!("--{bad} only applies to --problem custom")));
            }
            Ok(ProblemSpec::Catalog { name: name.to_string(), eps })
        }
        other => Err(CliError::Usage(format!(
            "unknown problem '{other}' (expected lorenz, manufactured or custom)"
        ))),
    }
}

/// `galerkin`, `subdomain`, `both`, or a comma-separated list.
pub fn parse_methods(text: &str) -> Result<Vec<Method>, CliError> {
    let mut methods = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let add: &[Method] = match item.to_ascii_lowercase().as_str() {
            "both" => &Method::ALL,
            "galerkin" => &[Method::Galerkin],
            "subdomain" => &[Method::Subdomain],
            _ => return Err(CliError::Usage(format!("unknown method '{item}'"))),
        };
        for m in add {
            if !methods.contains(m) {
                methods.push(*m);
            }
        }
    }
    if methods.is_empty() {
        return Err(CliError::Usage("empty method set".into()));
    }
    methods.sort_by_key(|m| Method::ALL.iter().position(|x| x == m));
    Ok(methods)
}

fn parse_f64(key: &str, text: &str) -> Result<f64, CliError> {
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Usage(format!("--{key}: expected a finite number, got '{text}'")))
}

fn parse_positive(key: &str, text: &str) -> Result<f64, CliError> {
    let v = parse_f64(key, text)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{key} must be positive, got {v}")))
    }
}

fn parse_usize(key: &str, text: &str) -> Result<usize, CliError> {
    text.trim()
        .parse::<usize>()
        .map_err(|_| CliError::Usage(format!("{key}: expected a non-negative integer, got '{text}'")))
}

fn parse_bool(key: &str, text: Option<&str>) -> Result<bool, CliError> {
    match text.map(|t| t.trim().to_ascii_lowercase()).as_deref() {
        None | Some("false") | Some("0") | Some("no") => Ok(false),
        Some("true") | Some("1") | Some("yes") => Ok(true),
        Some(other) => Err(CliError::Usage(format!("--{key}: expected true or false, got '{other}'"))),
    }
}

pub fn parse_grid(text: &str) -> Result<(f64, f64, f64), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, step, hi] = parts.as_slice() else {
        return Err(CliError::Usage(format!("--grid: expected lo:step:hi, got '{text}'")));
    };
    let (lo, step, hi) = (parse_f64("grid", lo)?, parse_f64("grid", step)?, parse_f64("grid", hi)?);
    if !(lo > 0.0 && step > 0.0 && hi >= lo) {
        return Err(CliError::Usage(format!("--grid: need 0 < lo <= hi and step > 0, got '{text}'")));
    }
    Ok((lo, step, hi))
}

pub fn parse_interval(text: &str) -> Result<(f64, f64), CliError> {
    let Some((lo, hi)) = text.split_once(':') else {
        return Err(CliError::Usage(format!("--interval: expected lo:hi, got '{text}'")));
    };
    let (lo, hi) = (parse_f64("interval", lo)?, parse_f64("interval", hi)?);
    if !(lo > 0.0 && lo < hi && hi <= 1.0) {
        return Err(CliError::Usage(format!("--interval: need 0 < lo < hi <= 1, got '{text}'")));
    }
    Ok((lo, hi))
}

pub fn parse_n_list(text: &str) -> Result<Vec<usize>, CliError> {
    let list = text
        .split(',')
        .map(|s| parse_usize("n-list", s))
        .collect::<Result<Vec<_>, _>>()?;
    if list.is_empty() || list[0] < 2 || list.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(CliError::Usage(format!(
            "--n-list: expected a doubling sequence starting at 2 or more, got '{text}'"
        )));
    }
    Ok(list)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(pairs: &[(&str, &str)]) -> Settings {
        let mut s = Settings::new();
        for (k, v) in pairs {
            s.set(k, *v);
        }
        s
    }

    #[test]
    fn parses_flat_file() {
        let s = Settings::parse("# run\neps = 0.5\nN=64 # elements\n\nquad_order = 6\n").unwrap();
        assert_eq!(s.get("eps"), Some("0.5"));
        assert_eq!(s.get("N"), Some("64"));
        assert_eq!(s.get("quad-order"), Some("6"));
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(Settings::parse("eps 0.5").is_err());
        assert!(Settings::parse("colour = red").is_err());
        assert!(Settings::parse("eps = 1\neps = 2").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = settings(&[("eps", "0.5"), ("N", "10")]);
        let flags = settings(&[("N", "20")]);
        let merged = flags.over(file);
        assert_eq!(merged.get("N"), Some("20"));
        assert_eq!(merged.get("eps"), Some("0.5"));
    }

    #[test]
    fn quadrature_order_precedence() {
        let base = settings(&[("eps", "0.5"), ("N", "8")]);
        let c = RunConfig::resolve(Command::Solve, &base, None).unwrap();
        assert_eq!(c.quad_order, 8);
        let c = RunConfig::resolve(Command::Solve, &base, Some("5")).unwrap();
        assert_eq!(c.quad_order, 5);
        let with = settings(&[("quad-order", "3")]).over(base);
        let c = RunConfig::resolve(Command::Solve, &with, Some("5")).unwrap();
        assert_eq!(c.quad_order, 3);
        assert!(RunConfig::resolve(Command::Solve, &with, Some("junk")).is_ok());
    }

    #[test]
    fn method_sets() {
        assert_eq!(parse_methods("both").unwrap(), Method::ALL.to_vec());
        assert_eq!(parse_methods("subdomain,galerkin").unwrap(), Method::ALL.to_vec());
        assert_eq!(parse_methods("galerkin").unwrap(), vec![Method::Galerkin]);
        assert!(parse_methods("").is_err());
        assert!(parse_methods(" , ").is_err());
        assert!(parse_methods("fem").is_err());
    }

    #[test]
    fn ratio_conflicts() {
        let base = settings(&[("eps", "0.01"), ("N", "20")]);
        let both = settings(&[("sigma", "0.8"), ("grid", "0.5:0.05:1")]).over(base.clone());
        for cmd in [Command::Solve, Command::Sweep, Command::Tune, Command::Converge] {
            assert!(RunConfig::resolve(cmd, &both, None).is_err());
        }
        let grid_on_solve = settings(&[("grid", "0.5:0.05:1")]).over(base.clone());
        assert!(RunConfig::resolve(Command::Solve, &grid_on_solve, None).is_err());
        let sigma_on_tune = settings(&[("sigma", "0.5")]).over(base.clone());
        assert!(RunConfig::resolve(Command::Tune, &sigma_on_tune, None).is_err());
        let sweep = RunConfig::resolve(Command::Sweep, &grid_on_solve, None).unwrap();
        assert_eq!(sweep.ratio, RatioSetting::Grid { lo: 0.5, step: 0.05, hi: 1.0 });
    }

    #[test]
    fn problem_resolution() {
        let custom = settings(&[
            ("problem", "custom"),
            ("eps", "0.1"),
            ("p", "1"),
            ("q", "0"),
            ("f", "exp(x)"),
            ("N", "4"),
        ]);
        let c = RunConfig::resolve(Command::Solve, &custom, None).unwrap();
        let problem = c.problem.build().unwrap();
        assert!(!problem.has_exact());
        assert!((problem.f.eval(1.0) - std::f64::consts::E).abs() < 1e-15);

        let bad_expr = settings(&[("f", "exp(")]).over(custom.clone());
        assert!(RunConfig::resolve(Command::Solve, &bad_expr, None).is_err());

        let lorenz_with_p = settings(&[("problem", "lorenz"), ("p", "2")]).over(custom);
        assert!(RunConfig::resolve(Command::Solve, &lorenz_with_p, None).is_err());

        let missing_eps = settings(&[("N", "4")]);
        assert!(RunConfig::resolve(Command::Solve, &missing_eps, None).is_err());
    }

    #[test]
    fn grid_and_lists() {
        assert_eq!(parse_grid("0.5:0.05:1.0").unwrap(), (0.5, 0.05, 1.0));
        assert!(parse_grid("0.5:0:1").is_err());
        assert!(parse_grid("0.5:1").is_err());
        assert_eq!(parse_interval("0.1:0.9").unwrap(), (0.1, 0.9));
        assert!(parse_interval("0.9:0.1").is_err());
        assert!(parse_interval("0.5:1.5").is_err());
        assert_eq!(parse_n_list("8,16,32").unwrap(), vec![8, 16, 32]);
        assert!(parse_n_list("8,12").is_err());
        assert!(parse_n_list("1,2").is_err());
    }
}
