//! CSV and JSON writers for diagnostics and convergence tables.

use std::io::{self, Write};

use dnls_core::diagnostics::DiagnosticsRow;
use serde::Serialize;

use crate::config::OutputFormat;

pub const DIAGNOSTICS_HEADER: &str = "n,t,mass,energy,rm,re,err_l2,err_inf";

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(Serialize)]
struct JsonRow {
    n: usize,
    t: f64,
    mass: f64,
    energy: f64,
    rm: f64,
    re: f64,
    err_l2: Option<f64>,
    err_inf: Option<f64>,
}

impl From<&DiagnosticsRow> for JsonRow {
    fn from(r: &DiagnosticsRow) -> Self {
        Self {
            n: r.step,
            t: r.time,
            mass: r.mass,
            energy: r.energy,
            rm: r.rel_mass_residual,
            re: r.rel_energy_residual,
            err_l2: r.errors.map(|e| e.0),
            err_inf: r.errors.map(|e| e.1),
        }
    }
}

pub fn write_diagnostics<W: Write>(
    mut w: W,
    rows: &[DiagnosticsRow],
    format: OutputFormat,
) -> io::Result<()> {
    match format {
        OutputFormat::Csv => {
            writeln!(w, "{DIAGNOSTICS_HEADER}")?;
            for r in rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    r.step,
                    num(r.time),
                    num(r.mass),
                    num(r.energy),
                    num(r.rel_mass_residual),
                    num(r.rel_energy_residual),
                    opt(r.errors.map(|e| e.0)),
                    opt(r.errors.map(|e| e.1)),
                )?;
            }
        }
        OutputFormat::Json => {
            let rows: Vec<JsonRow> = rows.iter().map(JsonRow::from).collect();
            serde_json::to_writer_pretty(&mut w, &rows)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

/// One row of a temporal or spatial convergence sweep. `step` is `τ` or `h`;
/// `label` is the grid size for spatial sweeps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub label: String,
    pub step: f64,
    pub err_l2: Option<f64>,
    pub err_inf: Option<f64>,
    pub rate_l2: Option<f64>,
    pub rate_inf: Option<f64>,
    pub status: String,
}

pub fn write_sweep<W: Write>(
    mut w: W,
    step_name: &str,
    rows: &[SweepRow],
    format: OutputFormat,
) -> io::Result<()> {
    match format {
        OutputFormat::Csv => {
            writeln!(
                w,
                "label,{step_name},err_l2,rate_l2,err_inf,rate_inf,status"
            )?;
            for r in rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    r.label,
                    num(r.step),
                    opt(r.err_l2),
                    opt(r.rate_l2),
                    opt(r.err_inf),
                    opt(r.rate_inf),
                    r.status.replace(',', ";"),
                )?;
            }
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut w, rows)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

/// Fixed-width table for the terminal.
pub fn render_sweep(step_name: &str, rows: &[SweepRow]) -> String {
    let f = |x: Option<f64>, prec: usize| match x {
        Some(v) if prec == 0 => format!("{v:.4e}"),
        Some(v) => format!("{v:.prec$}"),
        None => "-".to_string(),
    };
    let mut s = format!(
        "{:>8} {:>12} {:>12} {:>8} {:>12} {:>8}  status\n",
        "", step_name, "err_l2", "rate", "err_inf", "rate"
    );
    for r in rows {
        s.push_str(&format!(
            "{:>8} {:>12.4e} {:>12} {:>8} {:>12} {:>8}  {}\n",
            r.label,
            r.step,
            f(r.err_l2, 0),
            f(r.rate_l2, 3),
            f(r.err_inf, 0),
            f(r.rate_inf, 3),
            r.status
        ));
    }
    s
}

/// Side-by-side residual series: `n,t` followed by `rm_<name>,re_<name>`
/// for every run. All runs must share their sample steps.
pub fn write_conservation<W: Write>(
    mut w: W,
    names: &[String],
    runs: &[Vec<DiagnosticsRow>],
    format: OutputFormat,
) -> io::Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut header = String::from("n,t");
            for name in names {
                header.push_str(&format!(",rm_{name},re_{name}"));
            }
            writeln!(w, "{header}")?;
            let len = runs.first().map_or(0, Vec::len);
            for i in 0..len {
                let first = &runs[0][i];
                let mut line = format!("{},{}", first.step, num(first.time));
                for run in runs {
                    let r = &run[i];
                    line.push_str(&format!(
                        ",{},{}",
                        num(r.rel_mass_residual),
                        num(r.rel_energy_residual)
                    ));
                }
                writeln!(w, "{line}")?;
            }
        }
        OutputFormat::Json => {
            let value: serde_json::Map<String, serde_json::Value> = names
                .iter()
                .zip(runs)
                .map(|(name, rows)| {
                    let rows: Vec<JsonRow> = rows.iter().map(JsonRow::from).collect();
                    (name.clone(), serde_json::to_value(rows).unwrap_or_default())
                })
                .collect();
            serde_json::to_writer_pretty(&mut w, &value)?;
            writeln!(w)?;
        }
    }
    Ok(())
}
