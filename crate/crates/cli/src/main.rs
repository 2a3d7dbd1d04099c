use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dnls_cli::commands::{cmd_conservation, cmd_converge_space, cmd_converge_time, cmd_run};
use dnls_cli::{CliError, ConfigError, ExperimentConfig};
use dnls_core::schemes::SchemeKind;

/// Solvers for the 3D damped nonlinear Schrödinger equation
/// `i ψ_t + Δψ + β|ψ|²ψ + iγψ = 0` on a periodic box.
///
/// Exit status: 0 on success, 2 for invalid configuration, 3 when a run
/// fails numerically (solver stall or explicit blow-up).
#[derive(Parser)]
#[command(name = "dnls", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and print a diagnostics row per sample.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Dump the final field as a raw binary snapshot.
        #[arg(long, value_name = "FILE")]
        snapshot: Option<PathBuf>,
    },
    /// Errors and observed orders at the final time for several time steps.
    ConvergeTime {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.025,0.0125")]
        taus: Vec<f64>,
    },
    /// Errors at the final time for several grid sizes N³ (default τ = 1e-4).
    ConvergeSpace {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16")]
        ns: Vec<usize>,
        /// Use τ = 1e-5. Takes several minutes.
        #[arg(long)]
        full_fidelity: bool,
    },
    /// Relative mass and energy residuals of several schemes side by side.
    Conservation {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_delimiter = ',', default_value = "licfp,ifd")]
        schemes: Vec<String>,
    },
}

/// Every key of the configuration file, as a flag. Flags override the file.
#[derive(Args)]
struct CommonArgs {
    /// Configuration file with `key = value` lines.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// licfp, ifd or rk3. RK3 is only stable for roughly
    /// τ ≤ √3 / (3 (N/2)²) on [0,2π]³, e.g. τ ≲ 0.009 at N = 16.
    #[arg(long)]
    scheme: Option<String>,
    /// Grid points per axis: one value or N1,N2,N3 (even).
    #[arg(long)]
    n: Option<String>,
    /// Box lengths: one value or l1,l2,l3 (default 2π).
    #[arg(long)]
    lengths: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t_final: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    /// Integer wave numbers of the initial plane wave: one value or m1,m2,m3.
    #[arg(long, allow_hyphen_values = true)]
    wave_k: Option<String>,
    /// Amplitude K of the initial plane wave.
    #[arg(long, allow_hyphen_values = true)]
    amplitude: Option<String>,
    /// Do not compare against the exact solution.
    #[arg(long)]
    no_exact: bool,
    /// Stopping tolerance of the per-step iterations.
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    max_iters: Option<String>,
    /// Linear solver for the implicit systems: splitting or jacobi.
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    sample_every: Option<String>,
    /// Write the table here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
}

impl CommonArgs {
    fn resolve(&self, mut cfg: ExperimentConfig) -> Result<ExperimentConfig, ConfigError> {
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::Other(format!("{}: {e}", path.display())))?;
            cfg.merge_str(&text)?;
        }
        let flags = [
            ("scheme", &self.scheme),
            ("n", &self.n),
            ("lengths", &self.lengths),
            ("tau", &self.tau),
            ("t_final", &self.t_final),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
            ("wave_k", &self.wave_k),
            ("amplitude", &self.amplitude),
            ("tol", &self.tol),
            ("max_iters", &self.max_iters),
            ("solver", &self.solver),
            ("sample_every", &self.sample_every),
            ("out", &self.out),
            ("format", &self.format),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if self.no_exact {
            cfg.exact = false;
        }
        Ok(cfg)
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Run { common, snapshot } => {
            let cfg = common.resolve(ExperimentConfig::default())?;
            cmd_run(&cfg, snapshot.as_deref(), &mut out)
        }
        Command::ConvergeTime { common, taus } => {
            let cfg = common.resolve(ExperimentConfig::default())?;
            cmd_converge_time(&cfg, &taus, &mut out)
        }
        Command::ConvergeSpace {
            common,
            ns,
            full_fidelity,
        } => {
            let base = ExperimentConfig {
                tau: 1e-4,
                ..ExperimentConfig::default()
            };
            let mut cfg = common.resolve(base)?;
            if full_fidelity {
                cfg.tau = 1e-5;
            }
            cmd_converge_space(&cfg, &ns, &mut out)
        }
        Command::Conservation { common, schemes } => {
            let cfg = common.resolve(ExperimentConfig::default())?;
            let schemes = schemes
                .iter()
                .map(|s| s.parse::<SchemeKind>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(ConfigError::from)?;
            cmd_conservation(&cfg, &schemes, &mut out, &mut io::stderr())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = io::stdout().flush();
            eprintln!("dnls: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
