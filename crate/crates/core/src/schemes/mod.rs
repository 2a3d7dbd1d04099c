//! Time steppers for the gauged equation `i u_t + Δu + β e^{-2γt}|u|²u = 0`.

use std::fmt;
use std::str::FromStr;

use crate::error::{DnlsError, Result};
use crate::grid::Field;

pub mod ifd;
pub mod licfp;
pub mod rk3;
mod run;
pub mod solver;

pub use run::{run_to_time, RunOutput, SchemeRun};
pub use solver::{solve_shifted, solve_shifted_jacobi};

/// Coefficients of the damped equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeParams {
    /// Nonlinearity coefficient β.
    pub beta: f64,
    /// Damping rate γ >= 0.
    pub gamma: f64,
}

impl PdeParams {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(DnlsError::InvalidParameter(format!("beta = {beta}")));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(DnlsError::InvalidParameter(format!(
                "gamma = {gamma} must be non-negative"
            )));
        }
        Ok(Self { beta, gamma })
    }

    /// `β e^{-2γt}`, the effective nonlinearity of the gauged equation at time `t`.
    pub fn nonlinear_coeff(&self, t: f64) -> f64 {
        self.beta * self.damping_factor(t)
    }

    /// `e^{-2γt}`
    pub fn damping_factor(&self, t: f64) -> f64 {
        (-2.0 * self.gamma * t).exp()
    }
}

impl Default for PdeParams {
    fn default() -> Self {
        Self {
            beta: 2.0,
            gamma: 1.0,
        }
    }
}

/// Linear solver used for the linearly implicit systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearSolver {
    /// Splitting iteration whose inner step is an exact Fourier-space
    /// shifted-Laplacian solve.
    #[default]
    FourierSplitting,
    /// Pointwise Jacobi iteration on the full matrix. Only converges while
    /// `τ · max|λ - mean(λ)|` stays below `|1 - iτ mean(λ)|`.
    Jacobi,
}

impl fmt::Display for LinearSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinearSolver::FourierSplitting => "splitting",
            LinearSolver::Jacobi => "jacobi",
        })
    }
}

impl FromStr for LinearSolver {
    type Err = DnlsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "splitting" | "fourier" | "picard" => Ok(Self::FourierSplitting),
            "jacobi" => Ok(Self::Jacobi),
            other => Err(DnlsError::InvalidParameter(format!(
                "unknown linear solver '{other}' (expected splitting or jacobi)"
            ))),
        }
    }
}

/// Stopping rule for the per-step iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iters: usize,
    pub linear_solver: LinearSolver,
}

impl SolverConfig {
    pub fn new(tol: f64, max_iters: usize) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(DnlsError::InvalidParameter(format!(
                "solver tolerance {tol} must be positive"
            )));
        }
        if max_iters == 0 {
            return Err(DnlsError::InvalidParameter(
                "max_iters must be positive".into(),
            ));
        }
        Ok(Self {
            tol,
            max_iters,
            linear_solver: LinearSolver::default(),
        })
    }

    pub fn with_linear_solver(mut self, solver: LinearSolver) -> Self {
        self.linear_solver = solver;
        self
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-14,
            max_iters: 500,
            linear_solver: LinearSolver::default(),
        }
    }
}

/// Result of one implicit solve or time step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub field: Field,
    pub iterations: usize,
    pub residual: f64,
}

/// The three time integrators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// Linearly implicit conservative Fourier pseudo-spectral scheme.
    LiCfp,
    /// Implicit Crank–Nicolson finite-difference scheme.
    Ifd,
    /// Explicit third-order Runge–Kutta with the pseudo-spectral Laplacian.
    Rk3,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::LiCfp => "licfp",
            SchemeKind::Ifd => "ifd",
            SchemeKind::Rk3 => "rk3",
        })
    }
}

impl FromStr for SchemeKind {
    type Err = DnlsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "licfp" | "li-cfp" => Ok(Self::LiCfp),
            "ifd" => Ok(Self::Ifd),
            "rk3" => Ok(Self::Rk3),
            other => Err(DnlsError::InvalidParameter(format!(
                "unknown scheme '{other}' (expected licfp, ifd or rk3)"
            ))),
        }
    }
}
