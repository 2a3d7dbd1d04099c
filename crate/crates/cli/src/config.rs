//! Flat `key = value` experiment configuration.
//!
//! Every key can also be set from the command line; flags are applied after
//! the file, so they win. Lines starting with `#` are comments.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use dnls_core::diagnostics::ExactSolution;
use dnls_core::schemes::{LinearSolver, PdeParams, SchemeKind, SolverConfig};
use dnls_core::{Complex64, DnlsError, Field, Grid3, TimeGrid};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("bad value for '{key}': {msg}")]
    BadValue { key: String, msg: String },
    #[error("{0}")]
    Invalid(#[from] DnlsError),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

impl std::fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Everything needed to set up one experiment.
///
/// The initial data is always the plane wave `K e^{i k·x}` (with
/// `k_i = 2π m_i / l_i`). With `exact` on, the closed-form damped solution
/// started from it is used for the error columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: SchemeKind,
    pub n: [usize; 3],
    pub lengths: [f64; 3],
    pub tau: f64,
    pub t_final: f64,
    pub beta: f64,
    pub gamma: f64,
    pub exact: bool,
    pub amplitude: f64,
    pub wave_k: [i64; 3],
    pub tol: f64,
    pub max_iters: usize,
    pub solver: LinearSolver,
    pub sample_every: usize,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let solver = SolverConfig::default();
        let params = PdeParams::default();
        Self {
            scheme: SchemeKind::LiCfp,
            n: [16; 3],
            lengths: [2.0 * PI; 3],
            tau: 0.1,
            t_final: 1.0,
            beta: params.beta,
            gamma: params.gamma,
            exact: true,
            amplitude: 1.0,
            wave_k: [1; 3],
            tol: solver.tol,
            max_iters: solver.max_iters,
            solver: solver.linear_solver,
            sample_every: 1,
            out: None,
            format: OutputFormat::Csv,
        }
    }
}

fn bad(key: &str, msg: impl ToString) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_string(),
        msg: msg.to_string(),
    }
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.trim().parse().map_err(|e: T::Err| bad(key, e))
}

/// One value for all three axes, or three comma-separated values.
fn parse_triple<T: FromStr + Copy>(key: &str, value: &str) -> Result<[T; 3], ConfigError>
where
    T::Err: std::fmt::Display,
{
    let parts: Vec<&str> = value.split(',').collect();
    match parts.as_slice() {
        [a] => Ok([parse_one(key, a)?; 3]),
        [a, b, c] => Ok([parse_one(key, a)?, parse_one(key, b)?, parse_one(key, c)?]),
        _ => Err(bad(
            key,
            "expected one value or three comma-separated values",
        )),
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(bad(key, format!("'{other}' is not a boolean"))),
    }
}

fn join<T: std::fmt::Debug>(v: &[T; 3]) -> String {
    format!("{:?},{:?},{:?}", v[0], v[1], v[2])
}

impl ExperimentConfig {
    /// Set a single key. Dashes and underscores in keys are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim().replace('-', "_");
        let k = key.as_str();
        match k {
            "scheme" => self.scheme = parse_one(k, value)?,
            "n" => self.n = parse_triple(k, value)?,
            "lengths" => self.lengths = parse_triple(k, value)?,
            "tau" => self.tau = parse_one(k, value)?,
            "t_final" => self.t_final = parse_one(k, value)?,
            "beta" => self.beta = parse_one(k, value)?,
            "gamma" => self.gamma = parse_one(k, value)?,
            "exact" => self.exact = parse_bool(k, value)?,
            "amplitude" => self.amplitude = parse_one(k, value)?,
            "wave_k" => self.wave_k = parse_triple(k, value)?,
            "tol" => self.tol = parse_one(k, value)?,
            "max_iters" => self.max_iters = parse_one(k, value)?,
            "solver" => self.solver = parse_one(k, value)?,
            "sample_every" => self.sample_every = parse_one(k, value)?,
            "out" => {
                let v = value.trim();
                self.out = (!v.is_empty()).then(|| PathBuf::from(v));
            }
            "format" => self.format = parse_one(k, value)?,
            _ => return Err(ConfigError::UnknownKey(key)),
        }
        Ok(())
    }

    /// Apply every `key = value` line of `text` on top of `self`.
    pub fn merge_str(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                msg: format!("expected key = value, got '{line}'"),
            })?;
            self.set(key, value).map_err(|e| ConfigError::Syntax {
                line: i + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.merge_str(text)?;
        Ok(cfg)
    }

    /// Serialize to the file format. Floats use the shortest representation
    /// that parses back to the same value.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scheme = {}", self.scheme);
        let _ = writeln!(s, "n = {}", join(&self.n));
        let _ = writeln!(s, "lengths = {}", join(&self.lengths));
        let _ = writeln!(s, "tau = {:?}", self.tau);
        let _ = writeln!(s, "t_final = {:?}", self.t_final);
        let _ = writeln!(s, "beta = {:?}", self.beta);
        let _ = writeln!(s, "gamma = {:?}", self.gamma);
        let _ = writeln!(s, "exact = {}", self.exact);
        let _ = writeln!(s, "amplitude = {:?}", self.amplitude);
        let _ = writeln!(s, "wave_k = {}", join(&self.wave_k));
        let _ = writeln!(s, "tol = {:?}", self.tol);
        let _ = writeln!(s, "max_iters = {}", self.max_iters);
        let _ = writeln!(s, "solver = {}", self.solver);
        let _ = writeln!(s, "sample_every = {}", self.sample_every);
        if let Some(out) = &self.out {
            let _ = writeln!(s, "out = {}", out.display());
        }
        let _ = writeln!(s, "format = {}", self.format);
        s
    }

    /// Check every field and build the numerical objects.
    pub fn validate(&self) -> Result<Experiment, ConfigError> {
        let grid = Grid3::new(self.n, self.lengths)?;
        let tgrid = TimeGrid::from_final_time(self.tau, self.t_final)?;
        let params = PdeParams::new(self.beta, self.gamma)?;
        let solver = SolverConfig::new(self.tol, self.max_iters)?.with_linear_solver(self.solver);
        if self.sample_every == 0 {
            return Err(bad("sample_every", "must be positive"));
        }
        if !self.amplitude.is_finite() {
            return Err(bad("amplitude", "must be finite"));
        }
        let solution = ExactSolution::new(Complex64::new(self.amplitude, 0.0), self.wave_k, params);
        solution.check_resolved(&grid)?;
        Ok(Experiment {
            scheme: self.scheme,
            grid,
            tgrid,
            params,
            solver,
            sample_every: self.sample_every,
            initial: solution.u(0.0, &grid),
            exact: self.exact.then_some(solution),
        })
    }
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub scheme: SchemeKind,
    pub grid: Grid3,
    pub tgrid: TimeGrid,
    pub params: PdeParams,
    pub solver: SolverConfig,
    pub sample_every: usize,
    pub initial: Field,
    pub exact: Option<ExactSolution>,
}
