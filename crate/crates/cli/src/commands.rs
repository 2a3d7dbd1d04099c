//! Subcommand implementations. Each takes the resolved configuration plus
//! handles for stdout and stderr so the tests can capture them.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use dnls_core::diagnostics::{convergence_rates, DiagnosticsRow};
use dnls_core::schemes::{run_to_time, RunOutput, SchemeKind};
use dnls_core::DnlsError;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, Experiment, ExperimentConfig};
use crate::output::{render_sweep, write_conservation, write_diagnostics, write_sweep, SweepRow};
use crate::snapshot::write_snapshot;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(DnlsError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    /// 2 for anything wrong with the request, 3 when the computation fails.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

/// Worker pool for sweeps, capped by `DNLS_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("DNLS_THREADS") {
        let n = v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| {
                ConfigError::Other(format!("DNLS_THREADS='{v}' is not a positive integer"))
            })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| ConfigError::Other(e.to_string()).into())
}

fn execute(exp: &Experiment) -> Result<RunOutput, DnlsError> {
    run_to_time(
        exp.initial.clone(),
        exp.scheme,
        exp.params,
        exp.tgrid,
        exp.solver,
        exp.sample_every,
        exp.exact.as_ref(),
    )
}

fn final_errors(exp: &Experiment) -> Result<(f64, f64), DnlsError> {
    let out = execute(exp)?;
    Ok(out
        .rows
        .last()
        .and_then(|r| r.errors)
        .expect("exact solution is configured"))
}

fn require_exact(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if cfg.exact {
        Ok(())
    } else {
        Err(ConfigError::Other("convergence sweeps need exact = on".into()).into())
    }
}

/// Writes either to `cfg.out` or to `fallback`.
fn with_output<F>(cfg: &ExperimentConfig, fallback: &mut dyn Write, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => f(fallback)?,
    }
    Ok(())
}

/// Single simulation; one diagnostics row per sample.
pub fn cmd_run(
    cfg: &ExperimentConfig,
    snapshot: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let exp = cfg.validate()?;
    let out = execute(&exp).map_err(CliError::Numerical)?;
    with_output(cfg, stdout, |w| write_diagnostics(w, &out.rows, cfg.format))?;
    if let Some(path) = snapshot {
        let mut w = BufWriter::new(File::create(path)?);
        write_snapshot(&mut w, &out.final_field, exp.tgrid.final_time())?;
    }
    Ok(())
}

/// `(label, step size, final (L², L^∞) errors)`
pub type SweepEntry = (String, f64, Result<(f64, f64), DnlsError>);

/// Tabulate `(label, step, result)` entries in the given order. Rates are
/// taken between consecutive successful rows.
pub fn sweep_rows(entries: Vec<SweepEntry>) -> Vec<SweepRow> {
    let mut rows = Vec::with_capacity(entries.len());
    let mut last: Option<(f64, f64, f64)> = None;
    for (label, step, result) in entries {
        let row = match result {
            Ok((l2, inf)) => {
                let rate = |prev: f64, cur: f64, s0: f64| {
                    convergence_rates(&[(s0, prev), (step, cur)])
                        .ok()
                        .map(|r| r[0])
                        .filter(|r| r.is_finite())
                };
                let (rate_l2, rate_inf) = match last {
                    Some((s0, l20, inf0)) => (rate(l20, l2, s0), rate(inf0, inf, s0)),
                    None => (None, None),
                };
                last = Some((step, l2, inf));
                SweepRow {
                    label,
                    step,
                    err_l2: Some(l2),
                    err_inf: Some(inf),
                    rate_l2,
                    rate_inf,
                    status: "ok".into(),
                }
            }
            Err(e) => SweepRow {
                label,
                step,
                err_l2: None,
                err_inf: None,
                rate_l2: None,
                rate_inf: None,
                status: format!("failed: {e}"),
            },
        };
        rows.push(row);
    }
    rows
}

/// Run `solve` for every step size in parallel and tabulate in order of
/// decreasing step size.
pub fn sweep_steps<F>(pool: &rayon::ThreadPool, steps: &[f64], solve: F) -> Vec<SweepRow>
where
    F: Fn(f64) -> Result<(f64, f64), DnlsError> + Sync,
{
    let mut steps = steps.to_vec();
    steps.sort_by(|a, b| b.total_cmp(a));
    let results: Vec<_> = pool.install(|| steps.par_iter().map(|&s| solve(s)).collect());
    sweep_rows(
        steps
            .iter()
            .zip(results)
            .map(|(&s, r)| (format!("{s}"), s, r))
            .collect(),
    )
}

fn first_failure(rows: &[SweepRow]) -> Option<CliError> {
    rows.iter()
        .find(|r| r.status != "ok")
        .map(|r| CliError::Numerical(DnlsError::Domain(format!("run {} {}", r.label, r.status))))
}

/// Temporal convergence at fixed `N`.
pub fn cmd_converge_time(
    cfg: &ExperimentConfig,
    taus: &[f64],
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    require_exact(cfg)?;
    if taus.is_empty() {
        return Err(ConfigError::Other("no time steps given".into()).into());
    }
    let mut experiments = Vec::with_capacity(taus.len());
    for &tau in taus {
        let mut c = cfg.clone();
        c.tau = tau;
        c.sample_every = usize::MAX;
        experiments.push((tau, c.validate()?));
    }
    let pool = thread_pool()?;
    let rows = sweep_steps(&pool, taus, |tau| {
        let exp = &experiments.iter().find(|(t, _)| *t == tau).unwrap().1;
        final_errors(exp)
    });
    write!(stdout, "{}", render_sweep("tau", &rows))?;
    with_output(cfg, &mut io::sink(), |w| {
        write_sweep(w, "tau", &rows, cfg.format)
    })?;
    match first_failure(&rows) {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Spatial convergence at fixed `τ`: one run per grid size `N³`.
pub fn cmd_converge_space(
    cfg: &ExperimentConfig,
    ns: &[usize],
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    require_exact(cfg)?;
    if ns.is_empty() {
        return Err(ConfigError::Other("no grid sizes given".into()).into());
    }
    let mut experiments = Vec::with_capacity(ns.len());
    for &n in ns {
        let mut c = cfg.clone();
        c.n = [n; 3];
        c.sample_every = usize::MAX;
        let exp = c.validate()?;
        experiments.push((n, exp.grid.max_spacing(), exp));
    }
    let pool = thread_pool()?;
    let results: Vec<_> = pool.install(|| {
        experiments
            .par_iter()
            .map(|(_, _, exp)| final_errors(exp))
            .collect()
    });
    let rows = sweep_rows(
        experiments
            .iter()
            .zip(results)
            .map(|((n, h, _), r)| (n.to_string(), *h, r))
            .collect(),
    );
    write!(stdout, "{}", render_sweep("h", &rows))?;
    with_output(cfg, &mut io::sink(), |w| {
        write_sweep(w, "h", &rows, cfg.format)
    })?;
    match first_failure(&rows) {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Residual series for several schemes on the same configuration, written
/// side by side. A summary of the largest residuals goes to `stderr`.
pub fn cmd_conservation(
    cfg: &ExperimentConfig,
    schemes: &[SchemeKind],
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    if schemes.is_empty() {
        return Err(ConfigError::Other("no schemes given".into()).into());
    }
    let mut experiments = Vec::with_capacity(schemes.len());
    for &scheme in schemes {
        let mut c = cfg.clone();
        c.scheme = scheme;
        experiments.push(c.validate()?);
    }
    let pool = thread_pool()?;
    let results: Vec<Result<RunOutput, DnlsError>> =
        pool.install(|| experiments.par_iter().map(execute).collect());
    let mut series: Vec<Vec<DiagnosticsRow>> = Vec::with_capacity(results.len());
    for (scheme, result) in schemes.iter().zip(results) {
        let rows =
            result.map_err(|e| CliError::Numerical(DnlsError::Domain(format!("{scheme}: {e}"))))?;
        series.push(rows.rows);
    }
    for (scheme, rows) in schemes.iter().zip(&series) {
        let max = |f: fn(&DiagnosticsRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
        writeln!(
            stderr,
            "{scheme}: max RM {:.3e}, max RE {:.3e}",
            max(|r| r.rel_mass_residual),
            max(|r| r.rel_energy_residual)
        )?;
    }
    let names: Vec<String> = schemes.iter().map(|s| s.to_string()).collect();
    with_output(cfg, stdout, |w| {
        write_conservation(w, &names, &series, cfg.format)
    })
}
