//! Implicit Crank–Nicolson finite-difference comparator.
//!
//! ```text
//! i (U^{n+1} - U^n)/τ + Δ_{1,h} W + (β/2) e^{-2γ t_{n+1/2}} (|U^{n+1}|² + |U^n|²) W = 0,
//! W = (U^{n+1} + U^n)/2
//! ```
//!
//! The nonlinear system for `W` is solved by fixed-point iteration; each
//! iterate needs one solve with `i/τ + Δ_{1,h}/2`, which is diagonal in
//! Fourier space.

use num_complex::Complex64;

use super::{PdeParams, SolverConfig, StepOutcome};
use crate::error::{DnlsError, Result};
use crate::grid::{norm_h, Field};
use crate::operators::{SpectralLaplacian, Symbol};

/// One step `U^n → U^{n+1}` starting at `t_n`.
pub fn ifd_step(
    op: &SpectralLaplacian,
    current: &Field,
    t_n: f64,
    params: &PdeParams,
    tau: f64,
    cfg: &SolverConfig,
) -> Result<StepOutcome> {
    let coeff = 0.25 * params.nonlinear_coeff(t_n + 0.5 * tau);
    let i_over_tau = Complex64::new(0.0, 1.0 / tau);
    let threshold = cfg.tol * norm_h(current).max(1.0);

    let mut w = current.clone();
    for iteration in 1..=cfg.max_iters {
        let mut b = current.scale(i_over_tau);
        for ((bj, &wj), &uj) in b
            .values_mut()
            .iter_mut()
            .zip(w.values())
            .zip(current.values())
        {
            let modulus = (2.0 * wj - uj).norm_sqr() + uj.norm_sqr();
            *bj -= coeff * modulus * wj;
        }
        let next = op.apply_multiplier(&b, Symbol::FiniteDifference, |lambda| {
            (i_over_tau + 0.5 * lambda).inv()
        })?;
        let change = norm_h(&next.sub(&w)?);
        w = next;
        if !change.is_finite() {
            break;
        }
        if change <= threshold {
            return Ok(StepOutcome {
                field: w.zip_with(current, |m, u| 2.0 * m - u)?,
                iterations: iteration,
                residual: change,
            });
        }
        if iteration == cfg.max_iters {
            return Err(DnlsError::NotConverged {
                iterations: iteration,
                residual: change,
                tol: threshold,
            });
        }
    }
    Err(DnlsError::NotConverged {
        iterations: cfg.max_iters,
        residual: f64::NAN,
        tol: threshold,
    })
}
