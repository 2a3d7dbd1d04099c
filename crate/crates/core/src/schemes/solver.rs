//! Iterative solvers for `(I - iτΔ_h - iτ c diag(p)) x = b` with real,
//! non-negative `p`.
//!
//! The matrix is `I + S` with `S` skew-Hermitian, so `Re⟨Ax, x⟩_h = ‖x‖_h²`
//! and the system is uniquely solvable for every `τ`.

use num_complex::Complex64;

use super::{LinearSolver, SolverConfig, StepOutcome};
use crate::error::{DnlsError, Result};
use crate::grid::{norm_h, Field};
use crate::operators::{SpectralLaplacian, Symbol};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_potential(op: &SpectralLaplacian, rhs: &Field, potential: &[f64]) -> Result<()> {
    if potential.len() != rhs.len() {
        return Err(DnlsError::GridMismatch {
            expected: format!("{} potential values", rhs.len()),
            found: format!("{} potential values", potential.len()),
        });
    }
    if op.grid() != rhs.grid() {
        return Err(DnlsError::GridMismatch {
            expected: op.grid().to_string(),
            found: rhs.grid().to_string(),
        });
    }
    Ok(())
}

/// Solve `(I - iτΔ_h - iτ·coeff·diag(potential)) x = rhs` with the solver
/// selected in `cfg`.
pub fn solve_shifted(
    op: &SpectralLaplacian,
    rhs: &Field,
    potential: &[f64],
    tau: f64,
    coeff: f64,
    cfg: &SolverConfig,
) -> Result<StepOutcome> {
    match cfg.linear_solver {
        LinearSolver::FourierSplitting => solve_splitting(op, rhs, potential, tau, coeff, cfg),
        LinearSolver::Jacobi => solve_shifted_jacobi(op, rhs, potential, tau, coeff, cfg),
    }
}

/// Splitting iteration `x ← (I - iτ(Δ_h + c p̄))⁻¹ (rhs + iτ c (p - p̄) x)`
/// where `p̄ = (max p + min p)/2` and the inner inverse is the Fourier
/// multiplier `1 / (1 - iτ(λ + c p̄))`. With `p̄ = 0` this is the plain
/// splitting `x ← (I - iτΔ_h)⁻¹ (rhs + iτ c p x)`; the shift only moves the
/// constant part of the potential into the exact solve.
///
/// Since `x_{s+1}` solves the inner system exactly, the true residual is
/// `A x_{s+1} - rhs = iτ c (p - p̄)(x_s - x_{s+1})`, which is what the
/// stopping test measures. The iteration contracts with factor at most
/// `τ |c| (max p - min p) / 2`.
fn solve_splitting(
    op: &SpectralLaplacian,
    rhs: &Field,
    potential: &[f64],
    tau: f64,
    coeff: f64,
    cfg: &SolverConfig,
) -> Result<StepOutcome> {
    check_potential(op, rhs, potential)?;
    let threshold = cfg.tol * norm_h(rhs).max(1.0);
    let (lo, hi) = potential
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
            (lo.min(p), hi.max(p))
        });
    let shift = 0.5 * (lo + hi);
    let offset: Vec<f64> = potential.iter().map(|&p| p - shift).collect();
    let inner = |b: &Field| {
        op.apply_multiplier(b, Symbol::Spectral, |lambda| {
            Complex64::new(1.0, -tau * (lambda + coeff * shift)).inv()
        })
    };
    let coupling = I * (tau * coeff);

    let mut x = inner(rhs)?;
    let mut residual = tau * coeff.abs() * norm_h(&weighted(&x, &offset));
    let mut iterations = 1;
    while residual > threshold {
        if iterations >= cfg.max_iters {
            return Err(DnlsError::NotConverged {
                iterations,
                residual,
                tol: threshold,
            });
        }
        let mut b = rhs.clone();
        for ((bj, &xj), &pj) in b.values_mut().iter_mut().zip(x.values()).zip(&offset) {
            *bj += coupling * pj * xj;
        }
        let next = inner(&b)?;
        let change = next.sub(&x)?;
        residual = tau * coeff.abs() * norm_h(&weighted(&change, &offset));
        x = next;
        iterations += 1;
    }
    Ok(StepOutcome {
        field: x,
        iterations,
        residual,
    })
}

fn weighted(u: &Field, potential: &[f64]) -> Field {
    let mut out = u.clone();
    for (v, &p) in out.values_mut().iter_mut().zip(potential) {
        *v *= p;
    }
    out
}

/// `A x = x - iτ (Δ_h x + c p x)`.
pub fn apply_shifted(
    op: &SpectralLaplacian,
    x: &Field,
    potential: &[f64],
    tau: f64,
    coeff: f64,
) -> Result<Field> {
    let lap = op.apply(x)?;
    let mut out = x.clone();
    for (((o, &xj), &lj), &pj) in out
        .values_mut()
        .iter_mut()
        .zip(x.values())
        .zip(lap.values())
        .zip(potential)
    {
        *o = xj - I * tau * (lj + coeff * pj * xj);
    }
    Ok(out)
}

/// Pointwise Jacobi iteration `x ← x + D⁻¹ (rhs - A x)`, where `D` is the
/// diagonal of `A`. The diagonal of `Δ_h` is the mean of its eigenvalues.
pub fn solve_shifted_jacobi(
    op: &SpectralLaplacian,
    rhs: &Field,
    potential: &[f64],
    tau: f64,
    coeff: f64,
    cfg: &SolverConfig,
) -> Result<StepOutcome> {
    check_potential(op, rhs, potential)?;
    let threshold = cfg.tol * norm_h(rhs).max(1.0);
    let eigs = op.eigenvalues(Symbol::Spectral);
    let lap_diag = eigs.iter().sum::<f64>() / eigs.len() as f64;
    let inv_diag: Vec<Complex64> = potential
        .iter()
        .map(|&p| Complex64::new(1.0, -tau * (lap_diag + coeff * p)).inv())
        .collect();

    let mut x = Field::zeros(*rhs.grid());
    let mut iterations = 0;
    loop {
        let r = rhs.sub(&apply_shifted(op, &x, potential, tau, coeff)?)?;
        let residual = norm_h(&r);
        if !residual.is_finite() {
            return Err(DnlsError::NotConverged {
                iterations,
                residual,
                tol: threshold,
            });
        }
        if residual <= threshold {
            return Ok(StepOutcome {
                field: x,
                iterations,
                residual,
            });
        }
        if iterations >= cfg.max_iters {
            return Err(DnlsError::NotConverged {
                iterations,
                residual,
                tol: threshold,
            });
        }
        for ((xj, &rj), &dj) in x.values_mut().iter_mut().zip(r.values()).zip(&inv_diag) {
            *xj += dj * rj;
        }
        iterations += 1;
    }
}
