//! Linearly implicit conservative Fourier pseudo-spectral scheme.
//!
//! For `n >= 1` the three-level step
//!
//! ```text
//! i (U^{n+1} - U^{n-1}) / 2τ + Δ_h Û + β e^{-2γ t_n} |U^n|² Û = 0,   Û = (U^{n+1} + U^{n-1}) / 2
//! ```
//!
//! is linear in `Û` because the nonlinearity is frozen at the middle level.
//! The first step uses a Crank–Nicolson step whose nonlinearity is frozen at
//! an explicit half-step predictor.

use num_complex::Complex64;

use super::solver::solve_shifted;
use super::{PdeParams, SolverConfig, StepOutcome};
use crate::error::Result;
use crate::grid::Field;
use crate::operators::SpectralLaplacian;

/// Explicit half-step predictor `U⁰ + (τ/2) i (Δ_h U⁰ + β |U⁰|² U⁰)`.
pub fn startup_predictor(
    op: &SpectralLaplacian,
    u0: &Field,
    params: &PdeParams,
    tau: f64,
) -> Result<Field> {
    let lap = op.apply(u0)?;
    let beta = params.nonlinear_coeff(0.0);
    let half = Complex64::new(0.0, 0.5 * tau);
    lap.zip_with(u0, |l, u| u + half * (l + beta * u.norm_sqr() * u))
}

/// First step `U⁰ → U¹`:
///
/// ```text
/// i (U¹ - U⁰)/τ + Δ_h W + β e^{-γτ} |U^{(1/2)}|² W = 0,   W = (U¹ + U⁰)/2.
/// ```
///
/// Rearranged as `(I - i(τ/2)(Δ_h + c diag|U^{(1/2)}|²)) W = U⁰`.
pub fn startup_step(
    op: &SpectralLaplacian,
    u0: &Field,
    params: &PdeParams,
    tau: f64,
    cfg: &SolverConfig,
) -> Result<StepOutcome> {
    let predictor = startup_predictor(op, u0, params, tau)?;
    let potential = predictor.modulus_squared();
    let coeff = params.nonlinear_coeff(0.5 * tau);
    let mid = solve_shifted(op, u0, &potential, 0.5 * tau, coeff, cfg)?;
    Ok(StepOutcome {
        field: extrapolate(&mid.field, u0)?,
        iterations: mid.iterations,
        residual: mid.residual,
    })
}

/// One three-level step `(U^{n-1}, U^n) → U^{n+1}` at time level `t_n`.
///
/// Solves `(I - iτ(Δ_h + β e^{-2γ t_n} diag|U^n|²)) Û = U^{n-1}` and returns
/// `U^{n+1} = 2Û - U^{n-1}`.
pub fn li_cfp_step(
    op: &SpectralLaplacian,
    previous: &Field,
    current: &Field,
    t_n: f64,
    params: &PdeParams,
    tau: f64,
    cfg: &SolverConfig,
) -> Result<StepOutcome> {
    previous.grid().ensure_same(current.grid())?;
    let potential = current.modulus_squared();
    let coeff = params.nonlinear_coeff(t_n);
    let mean = solve_shifted(op, previous, &potential, tau, coeff, cfg)?;
    Ok(StepOutcome {
        field: extrapolate(&mean.field, previous)?,
        iterations: mean.iterations,
        residual: mean.residual,
    })
}

/// `2 m - u`
fn extrapolate(mid: &Field, u: &Field) -> Result<Field> {
    mid.zip_with(u, |m, v| 2.0 * m - v)
}
