//! Periodic collocation grids, grid functions and the discrete inner
//! products and norms defined on them.
//!
//! Fields are stored flattened with the x index fastest, then y, then z, so
//! that `values[j1 + N1 * (j2 + N2 * j3)]` holds the sample at
//! `(j1 h1, j2 h2, j3 h3)`. With this ordering a Kronecker product
//! `C ⊗ B ⊗ A` acts with `A` along x, `B` along y and `C` along z.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{DnlsError, Result};

/// Uniform periodic grid on `[0, l1) × [0, l2) × [0, l3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid3 {
    counts: [usize; 3],
    lengths: [f64; 3],
}

impl Grid3 {
    /// Every count must be even and at least 2, every length finite and positive.
    pub fn new(counts: [usize; 3], lengths: [f64; 3]) -> Result<Self> {
        for (axis, &n) in counts.iter().enumerate() {
            if n < 2 || n % 2 != 0 {
                return Err(DnlsError::InvalidGrid(format!(
                    "axis {axis}: point count {n} must be even and >= 2"
                )));
            }
        }
        for (axis, &l) in lengths.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(DnlsError::InvalidGrid(format!(
                    "axis {axis}: length {l} must be positive and finite"
                )));
            }
        }
        Ok(Self { counts, lengths })
    }

    /// `n³` points on `[0, 2π]³`.
    pub fn cube(n: usize) -> Result<Self> {
        Self::new([n; 3], [2.0 * PI; 3])
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn lengths(&self) -> [f64; 3] {
        self.lengths
    }

    /// Total number of collocation points `N1·N2·N3`.
    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.counts[axis] as f64
    }

    pub fn spacings(&self) -> [f64; 3] {
        [self.spacing(0), self.spacing(1), self.spacing(2)]
    }

    /// Largest spacing `max(h1, h2, h3)`.
    pub fn max_spacing(&self) -> f64 {
        self.spacings().into_iter().fold(0.0, f64::max)
    }

    /// Cell volume `h1·h2·h3`, the quadrature weight of every point.
    pub fn cell_volume(&self) -> f64 {
        self.spacings().iter().product()
    }

    /// `2π / l` along `axis`.
    pub fn wave_factor(&self, axis: usize) -> f64 {
        2.0 * PI / self.lengths[axis]
    }

    pub fn index(&self, j1: usize, j2: usize, j3: usize) -> usize {
        j1 + self.counts[0] * (j2 + self.counts[1] * j3)
    }

    /// Inverse of [`Grid3::index`].
    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let [n1, n2, _] = self.counts;
        [flat % n1, (flat / n1) % n2, flat / (n1 * n2)]
    }

    /// Physical coordinates of the point with flat index `flat`.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let j = self.multi_index(flat);
        [
            j[0] as f64 * self.spacing(0),
            j[1] as f64 * self.spacing(1),
            j[2] as f64 * self.spacing(2),
        ]
    }

    pub(crate) fn ensure_same(&self, other: &Grid3) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(DnlsError::GridMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            })
        }
    }
}

impl fmt::Display for Grid3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [n1, n2, n3] = self.counts;
        let [l1, l2, l3] = self.lengths;
        write!(f, "{n1}x{n2}x{n3} grid on [0,{l1}]x[0,{l2}]x[0,{l3}]")
    }
}

/// Uniform partition of `[0, T]` into `steps` intervals of width `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    tau: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(tau: f64, steps: usize) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(DnlsError::InvalidTimeGrid(format!(
                "time step {tau} must be positive and finite"
            )));
        }
        Ok(Self { tau, steps })
    }

    /// Build the partition of `[0, t_final]` with step `tau`. `t_final / tau`
    /// must be an integer up to roundoff.
    pub fn from_final_time(tau: f64, t_final: f64) -> Result<Self> {
        if !(t_final.is_finite() && t_final >= 0.0) {
            return Err(DnlsError::InvalidTimeGrid(format!(
                "final time {t_final} must be non-negative and finite"
            )));
        }
        let ratio = t_final / tau;
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
            return Err(DnlsError::InvalidTimeGrid(format!(
                "time step {tau} does not divide final time {t_final}"
            )));
        }
        Self::new(tau, steps as usize)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn final_time(&self) -> f64 {
        self.steps as f64 * self.tau
    }

    /// `t_n = n τ`; `n` may be fractional.
    pub fn time(&self, n: f64) -> f64 {
        n * self.tau
    }
}

/// Complex grid function.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid3,
    values: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: Grid3, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(DnlsError::GridMismatch {
                expected: format!("{} values", grid.len()),
                found: format!("{} values", values.len()),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid3) -> Self {
        Self::constant(grid, Complex64::new(0.0, 0.0))
    }

    pub fn constant(grid: Grid3, value: Complex64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    /// Sample `f(x, y, z)` at every collocation point.
    pub fn from_fn(grid: Grid3, mut f: impl FnMut([f64; 3]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|k| f(grid.point(k))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise `f(self_j, other_j)`.
    pub fn zip_with(
        &self,
        other: &Field,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Field> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, alpha: Complex64) -> Field {
        self.map(|v| alpha * v)
    }

    /// `self + alpha * other`
    pub fn add_scaled(&self, alpha: Complex64, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + alpha * b)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise squared modulus `|U_j|²`.
    pub fn modulus_squared(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// `⟨U, V⟩_h = h_Δ Σ U_j conj(V_j)`.
pub fn inner_product(u: &Field, v: &Field) -> Result<Complex64> {
    u.grid.ensure_same(&v.grid)?;
    let sum: Complex64 = u
        .values
        .iter()
        .zip(&v.values)
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok(sum * u.grid.cell_volume())
}

/// Discrete L² norm `‖U‖_h`.
pub fn norm_h(u: &Field) -> f64 {
    let sum: f64 = u.values.iter().map(|v| v.norm_sqr()).sum();
    (u.grid.cell_volume() * sum).sqrt()
}

/// Discrete Lᵖ norm `(h_Δ Σ |U_j|^p)^{1/p}` for finite `p >= 1`.
pub fn norm_hp(u: &Field, p: f64) -> Result<f64> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(DnlsError::InvalidParameter(format!(
            "norm exponent {p} must be finite and >= 1"
        )));
    }
    let sum: f64 = u.values.iter().map(|v| v.norm().powf(p)).sum();
    Ok((u.grid.cell_volume() * sum).powf(1.0 / p))
}

/// Maximum modulus `‖U‖_{h,∞}`.
pub fn norm_inf(u: &Field) -> f64 {
    u.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// `‖U‖_{h,4}⁴ = h_Δ Σ |U_j|⁴`, which appears in the finite-difference energy.
pub fn norm_h4_pow4(u: &Field) -> f64 {
    let sum: f64 = u.values.iter().map(|v| v.norm_sqr().powi(2)).sum();
    u.grid.cell_volume() * sum
}

/// Squared finite-difference semi-norm `|U|²_{1,h}` from periodic forward
/// differences along each axis.
pub fn seminorm_1h_squared(u: &Field) -> f64 {
    let grid = &u.grid;
    let [n1, n2, n3] = grid.counts();
    let h = grid.spacings();
    let vals = &u.values;
    let mut sum = 0.0;
    for j3 in 0..n3 {
        for j2 in 0..n2 {
            for j1 in 0..n1 {
                let here = vals[grid.index(j1, j2, j3)];
                let dx = (vals[grid.index((j1 + 1) % n1, j2, j3)] - here) / h[0];
                let dy = (vals[grid.index(j1, (j2 + 1) % n2, j3)] - here) / h[1];
                let dz = (vals[grid.index(j1, j2, (j3 + 1) % n3)] - here) / h[2];
                sum += dx.norm_sqr() + dy.norm_sqr() + dz.norm_sqr();
            }
        }
    }
    grid.cell_volume() * sum
}

/// Finite-difference semi-norm `|U|_{1,h}`.
pub fn seminorm_1h(u: &Field) -> f64 {
    seminorm_1h_squared(u).sqrt()
}

/// Spectral semi-norm `|U|_h = sqrt(⟨-Δ_h U, U⟩_h)`.
///
/// Builds a [`crate::SpectralLaplacian`] for the field's grid; reuse
/// [`crate::SpectralLaplacian::seminorm_h`] when evaluating many fields.
pub fn seminorm_h(u: &Field) -> Result<f64> {
    crate::operators::SpectralLaplacian::new(u.grid).seminorm_h(u)
}
