//! Discrete mass and energy functionals, the plane-wave exact solution,
//! error norms and convergence-rate tables.

use num_complex::Complex64;

use crate::error::{DnlsError, Result};
use crate::grid::{norm_h, norm_h4_pow4, norm_inf, seminorm_1h_squared, Field, Grid3};
use crate::operators::SpectralLaplacian;
use crate::schemes::PdeParams;

/// Discrete mass `M = ‖U‖_h²`.
pub fn mass(u: &Field) -> f64 {
    norm_h(u).powi(2)
}

/// `h_Δ Σ |a_j|² |b_j|²`
pub fn quartic_coupling(a: &Field, b: &Field) -> Result<f64> {
    a.grid().ensure_same(b.grid())?;
    let sum: f64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| x.norm_sqr() * y.norm_sqr())
        .sum();
    Ok(a.grid().cell_volume() * sum)
}

/// Energy of the linearly implicit scheme for the pair `(U^{n+1}, U^n)`:
///
/// ```text
/// E^n = ½|U^{n+1}|_h² + ½|U^n|_h² - (β/2) e^{-2γ t_n} h_Δ Σ |U^n|²|U^{n+1}|² - history
/// ```
///
/// `history_sum` must hold `Σ_{l=1}^{n}` of [`licfp_history_increment`].
pub fn licfp_energy(
    op: &SpectralLaplacian,
    u_next: &Field,
    u_cur: &Field,
    t_n: f64,
    params: &PdeParams,
    history_sum: f64,
) -> Result<f64> {
    let kinetic = 0.5 * (op.seminorm_h_squared(u_next)? + op.seminorm_h_squared(u_cur)?);
    let coupling = 0.5 * params.nonlinear_coeff(t_n) * quartic_coupling(u_cur, u_next)?;
    Ok(kinetic - coupling - history_sum)
}

/// History term `l` of the linearly implicit energy, from `(U^{l-1}, U^l)`:
/// `(β/2) e^{-2γ t_{l-1}} (1 - e^{-2γτ}) h_Δ Σ |U^{l-1}|²|U^l|²`.
pub fn licfp_history_increment(
    u_before: &Field,
    u_after: &Field,
    t_before: f64,
    params: &PdeParams,
    tau: f64,
) -> Result<f64> {
    let decay = -(-2.0 * params.gamma * tau).exp_m1();
    Ok(0.5 * params.nonlinear_coeff(t_before) * decay * quartic_coupling(u_before, u_after)?)
}

/// Energy of the finite-difference scheme at level `n`:
///
/// ```text
/// E^n = |U^n|²_{1,h} - (β/2) e^{-2γ t_{n-1/2}} ‖U^n‖⁴_{h,4} - history
/// ```
///
/// `history_sum` holds `Σ_{l=1}^{n}` of [`ifd_history_increment`]. At `n = 0`
/// the exponent is evaluated at `t_{-1/2} = -τ/2`.
pub fn ifd_energy(u: &Field, n: usize, tau: f64, params: &PdeParams, history_sum: f64) -> f64 {
    let t_half_before = (n as f64 - 0.5) * tau;
    seminorm_1h_squared(u)
        - 0.5 * params.nonlinear_coeff(t_half_before) * norm_h4_pow4(u)
        - history_sum
}

/// History term `l` of the finite-difference energy:
/// `(β/2) e^{-2γ t_{l-3/2}} (1 - e^{-2γτ}) ‖U^{l-1}‖⁴_{h,4}`.
pub fn ifd_history_increment(u_before: &Field, l: usize, tau: f64, params: &PdeParams) -> f64 {
    let t = (l as f64 - 1.5) * tau;
    let decay = -(-2.0 * params.gamma * tau).exp_m1();
    0.5 * params.nonlinear_coeff(t) * decay * norm_h4_pow4(u_before)
}

/// Single-level energy reported for the explicit method:
/// `|U|_h² - (β/2) e^{-2γt} ‖U‖⁴_{h,4} - history`. It is a quadrature of the
/// continuous energy and is not conserved by the discrete method.
pub fn explicit_energy(
    op: &SpectralLaplacian,
    u: &Field,
    t: f64,
    params: &PdeParams,
    history_sum: f64,
) -> Result<f64> {
    Ok(op.seminorm_h_squared(u)? - 0.5 * params.nonlinear_coeff(t) * norm_h4_pow4(u) - history_sum)
}

/// Left-point quadrature of `γβ ∫ e^{-2γν} ‖u‖⁴ dν` over `[t_n, t_{n+1}]`.
pub fn explicit_history_increment(u: &Field, t_n: f64, tau: f64, params: &PdeParams) -> f64 {
    let drop = params.damping_factor(t_n) - params.damping_factor(t_n + tau);
    0.5 * params.beta * drop * norm_h4_pow4(u)
}

/// `(|M^n - M^0| / |M^0|, |E^n - E^0| / |E^0|)`.
pub fn relative_residuals(m: f64, m0: f64, e: f64, e0: f64) -> Result<(f64, f64)> {
    if m0 == 0.0 {
        return Err(DnlsError::DivisionByZero(
            "reference mass is zero; report absolute residuals instead".into(),
        ));
    }
    if e0 == 0.0 {
        return Err(DnlsError::DivisionByZero(
            "reference energy is zero; report absolute residuals instead".into(),
        ));
    }
    Ok((((m - m0) / m0).abs(), ((e - e0) / e0).abs()))
}

/// Plane-wave solution `ψ = K e^{-γt} e^{i(k·x - δ(t))}` of the damped
/// equation, with `δ(t) = |k|² t + β|K|²/(2γ) (e^{-2γt} - 1)`.
///
/// Wave numbers are integer mode counts; the physical wave number along
/// axis `r` is `m_r · 2π / l_r`, so the solution is periodic on any box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactSolution {
    pub amplitude: Complex64,
    pub modes: [i64; 3],
    pub params: PdeParams,
}

impl ExactSolution {
    pub fn new(amplitude: Complex64, modes: [i64; 3], params: PdeParams) -> Self {
        Self {
            amplitude,
            modes,
            params,
        }
    }

    /// Rejects modes the grid cannot represent (`|m_r| > N_r / 2`).
    pub fn check_resolved(&self, grid: &Grid3) -> Result<()> {
        for (axis, (&m, &n)) in self.modes.iter().zip(&grid.counts()).enumerate() {
            if m.unsigned_abs() as usize > n / 2 {
                return Err(DnlsError::InvalidParameter(format!(
                    "wave number {m} on axis {axis} is not resolved by {n} points (max {})",
                    n / 2
                )));
            }
        }
        Ok(())
    }

    fn wave_vector(&self, grid: &Grid3) -> [f64; 3] {
        std::array::from_fn(|r| self.modes[r] as f64 * grid.wave_factor(r))
    }

    /// Phase `δ(t)`. For `γ = 0` the limit `|k|² t - β|K|² t` is used.
    pub fn phase(&self, t: f64, grid: &Grid3) -> f64 {
        let k2: f64 = self.wave_vector(grid).iter().map(|k| k * k).sum();
        let a2 = self.amplitude.norm_sqr();
        let gamma = self.params.gamma;
        let nonlinear = if gamma == 0.0 {
            -self.params.beta * a2 * t
        } else {
            self.params.beta * a2 * (-2.0 * gamma * t).exp_m1() / (2.0 * gamma)
        };
        k2 * t + nonlinear
    }

    /// Samples of the damped solution `ψ(t)`.
    pub fn psi(&self, t: f64, grid: &Grid3) -> Field {
        self.sample(t, grid, (-self.params.gamma * t).exp())
    }

    /// Samples of the gauged solution `u(t) = e^{γt} ψ(t)`.
    pub fn u(&self, t: f64, grid: &Grid3) -> Field {
        self.sample(t, grid, 1.0)
    }

    fn sample(&self, t: f64, grid: &Grid3, scale: f64) -> Field {
        let k = self.wave_vector(grid);
        let delta = self.phase(t, grid);
        let amp = self.amplitude * scale;
        Field::from_fn(*grid, |x| {
            amp * Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2] - delta)
        })
    }

    /// `(‖ψ^n - Ψ^n‖_h, ‖ψ^n - Ψ^n‖_{h,∞})` with `Ψ^n = e^{-γ t} U` for the
    /// numerical gauged field `u_num`.
    pub fn error_norms(&self, u_num: &Field, t: f64) -> Result<(f64, f64)> {
        let exact = self.u(t, u_num.grid());
        let scale = (-self.params.gamma * t).exp();
        let diff = u_num.zip_with(&exact, |a, b| scale * (a - b))?;
        Ok((norm_h(&diff), norm_inf(&diff)))
    }
}

/// Per-sample diagnostics record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRow {
    pub step: usize,
    pub time: f64,
    pub mass: f64,
    pub energy: f64,
    pub rel_mass_residual: f64,
    pub rel_energy_residual: f64,
    /// `(L², L^∞)` error against the exact solution, when one is configured.
    pub errors: Option<(f64, f64)>,
}

/// `ln(e1/e2) / ln(s1/s2)` for consecutive `(step size, error)` pairs.
pub fn convergence_rates(points: &[(f64, f64)]) -> Result<Vec<f64>> {
    if points.len() < 2 {
        return Err(DnlsError::Domain(
            "at least two (step, error) pairs are needed".into(),
        ));
    }
    for &(s, e) in points {
        if !(s > 0.0 && s.is_finite()) || !(e > 0.0 && e.is_finite()) {
            return Err(DnlsError::Domain(format!(
                "step {s} and error {e} must both be positive and finite"
            )));
        }
    }
    points
        .windows(2)
        .map(|w| {
            let ((s1, e1), (s2, e2)) = (w[0], w[1]);
            if s1 == s2 {
                return Err(DnlsError::Domain(format!("repeated step size {s1}")));
            }
            Ok((e1 / e2).ln() / (s1 / s2).ln())
        })
        .collect()
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRow {
    /// Time step or grid spacing of this run.
    pub step: f64,
    pub error_l2: f64,
    pub error_inf: f64,
    /// Rate against the previous row; `None` on the first row.
    pub rate_l2: Option<f64>,
    pub rate_inf: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
}

impl RateTable {
    /// Build from `(step, error_l2, error_inf)` rows in the given order.
    pub fn from_errors(rows: &[(f64, f64, f64)]) -> Result<Self> {
        let mut out = Vec::with_capacity(rows.len());
        for (i, &(step, l2, inf)) in rows.iter().enumerate() {
            let (rate_l2, rate_inf) = if i == 0 {
                (None, None)
            } else {
                let (s0, l20, inf0) = rows[i - 1];
                (
                    Some(convergence_rates(&[(s0, l20), (step, l2)])?[0]),
                    Some(convergence_rates(&[(s0, inf0), (step, inf)])?[0]),
                )
            };
            out.push(RateRow {
                step,
                error_l2: l2,
                error_inf: inf,
                rate_l2,
                rate_inf,
            });
        }
        Ok(Self { rows: out })
    }
}
