//! Classical explicit third-order Runge–Kutta method with the pseudo-spectral
//! right-hand side `f(t, U) = i (Δ_h U + β e^{-2γt} |U|² U)`.
//!
//! Conditionally stable: the step must satisfy roughly
//! `τ · max|λ(Δ_h)| <= √3`.

use num_complex::Complex64;

use super::PdeParams;
use crate::error::{DnlsError, Result};
use crate::grid::Field;
use crate::operators::SpectralLaplacian;

/// `f(t, U) = i (Δ_h U + β e^{-2γt} |U|² U)`
pub fn rhs(op: &SpectralLaplacian, t: f64, u: &Field, params: &PdeParams) -> Result<Field> {
    let lap = op.apply(u)?;
    let beta = params.nonlinear_coeff(t);
    lap.zip_with(u, |l, v| {
        Complex64::new(0.0, 1.0) * (l + beta * v.norm_sqr() * v)
    })
}

/// One step `U^n → U^{n+1}` from `t_n`. Non-finite output is reported as
/// [`DnlsError::Unstable`] with `step` set to `n`.
pub fn rk3_step(
    op: &SpectralLaplacian,
    u: &Field,
    t_n: f64,
    step: usize,
    params: &PdeParams,
    tau: f64,
) -> Result<Field> {
    let k1 = rhs(op, t_n, u, params)?;
    let k2 = rhs(
        op,
        t_n + 0.5 * tau,
        &u.add_scaled((0.5 * tau).into(), &k1)?,
        params,
    )?;
    let stage3 = u
        .zip_with(&k1, |v, a| v - tau * a)?
        .add_scaled((2.0 * tau).into(), &k2)?;
    let k3 = rhs(op, t_n + tau, &stage3, params)?;

    let w = tau / 6.0;
    let mut next = u.clone();
    for (((n, &a), &b), &c) in next
        .values_mut()
        .iter_mut()
        .zip(k1.values())
        .zip(k2.values())
        .zip(k3.values())
    {
        *n += w * (a + 4.0 * b + c);
    }
    if !next.is_finite() {
        return Err(DnlsError::Unstable {
            step,
            reason: "non-finite values in the RK3 update".into(),
        });
    }
    Ok(next)
}
