//! Discrete Laplacians diagonalized by the 3D discrete Fourier transform.
//!
//! Both the pseudo-spectral Laplacian `Δ_h` and the 7-point
//! finite-difference Laplacian `Δ_{1,h}` are Kronecker sums of per-axis
//! circulant matrices, so each is `F⁻¹ diag(λ_x(k1) + λ_y(k2) + λ_z(k3)) F`.
//! The forward transform is unnormalized; the inverse carries the factor
//! `1/(N1 N2 N3)`. All solvers in this crate use the same convention.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{DnlsError, Result};
use crate::grid::{inner_product, norm_h, Field, Grid3};

/// Signed mode number of DFT index `k` on `n` points: `k` for `k <= n/2`,
/// `k - n` above. The Nyquist index maps to `+n/2`.
pub fn signed_mode(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Per-axis eigenvalues of the spectral (`D_2`) and finite-difference (`B`)
/// second-derivative matrices, indexed by DFT mode.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianEigs {
    spectral: [Vec<f64>; 3],
    fd: [Vec<f64>; 3],
}

impl LaplacianEigs {
    pub fn new(grid: &Grid3) -> Self {
        let spectral = std::array::from_fn(|axis| {
            let n = grid.counts()[axis];
            let mu = grid.wave_factor(axis);
            (0..n)
                .map(|k| {
                    let m = signed_mode(k, n) as f64;
                    -(mu * m).powi(2)
                })
                .collect()
        });
        let fd = std::array::from_fn(|axis| {
            let n = grid.counts()[axis];
            let h = grid.spacing(axis);
            (0..n)
                .map(|k| -(4.0 / (h * h)) * (k as f64 * PI / n as f64).sin().powi(2))
                .collect()
        });
        Self { spectral, fd }
    }

    /// Spectral eigenvalues `-μ² m(k)²` along `axis`.
    pub fn spectral(&self, axis: usize) -> &[f64] {
        &self.spectral[axis]
    }

    /// Finite-difference eigenvalues `-(4/h²) sin²(kπ/N)` along `axis`.
    pub fn fd(&self, axis: usize) -> &[f64] {
        &self.fd[axis]
    }

    pub fn spectral_x(&self) -> &[f64] {
        self.spectral(0)
    }

    pub fn spectral_y(&self) -> &[f64] {
        self.spectral(1)
    }

    pub fn spectral_z(&self) -> &[f64] {
        self.spectral(2)
    }

    fn summed(tables: &[Vec<f64>; 3]) -> Vec<f64> {
        let (n1, n2, n3) = (tables[0].len(), tables[1].len(), tables[2].len());
        let mut out = Vec::with_capacity(n1 * n2 * n3);
        for &lz in &tables[2] {
            for &ly in &tables[1] {
                for &lx in &tables[0] {
                    out.push(lx + ly + lz);
                }
            }
        }
        out
    }

    /// `λ_x(k1) + λ_y(k2) + λ_z(k3)` for the spectral operator, flattened like a field.
    pub fn spectral_sums(&self) -> Vec<f64> {
        Self::summed(&self.spectral)
    }

    /// Same as [`LaplacianEigs::spectral_sums`] for the finite-difference operator.
    pub fn fd_sums(&self) -> Vec<f64> {
        Self::summed(&self.fd)
    }
}

/// Which discrete Laplacian a Fourier multiplier is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol {
    Spectral,
    FiniteDifference,
}

/// Batched 1D FFT plans for the three axes of a grid.
#[derive(Clone)]
pub struct Fft3 {
    counts: [usize; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fft3")
            .field("counts", &self.counts)
            .finish()
    }
}

impl Fft3 {
    pub fn new(grid: &Grid3) -> Self {
        let counts = grid.counts();
        let mut planner = FftPlanner::new();
        let forward = std::array::from_fn(|a| planner.plan_fft_forward(counts[a]));
        let inverse = std::array::from_fn(|a| planner.plan_fft_inverse(counts[a]));
        Self {
            counts,
            forward,
            inverse,
        }
    }

    /// In-place unnormalized forward transform.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// In-place inverse transform including the `1/N` factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
        let scale = 1.0 / data.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn transform(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        let [n1, n2, n3] = self.counts;
        debug_assert_eq!(data.len(), n1 * n2 * n3);
        let scratch_len = plans
            .iter()
            .map(|p| p.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        let mut scratch = vec![Complex64::new(0.0, 0.0); scratch_len];

        // x lines are contiguous
        plans[0].process_with_scratch(data, &mut scratch);

        // y and z lines are strided; gather them into contiguous buffers
        let mut lines = vec![Complex64::new(0.0, 0.0); data.len()];
        for (j3, block) in lines.chunks_mut(n1 * n2).enumerate() {
            for j1 in 0..n1 {
                for j2 in 0..n2 {
                    block[j1 * n2 + j2] = data[j1 + n1 * (j2 + n2 * j3)];
                }
            }
        }
        plans[1].process_with_scratch(&mut lines, &mut scratch);
        for (j3, block) in lines.chunks(n1 * n2).enumerate() {
            for j1 in 0..n1 {
                for j2 in 0..n2 {
                    data[j1 + n1 * (j2 + n2 * j3)] = block[j1 * n2 + j2];
                }
            }
        }

        let plane = n1 * n2;
        for p in 0..plane {
            for j3 in 0..n3 {
                lines[p * n3 + j3] = data[p + plane * j3];
            }
        }
        plans[2].process_with_scratch(&mut lines, &mut scratch);
        for p in 0..plane {
            for j3 in 0..n3 {
                data[p + plane * j3] = lines[p * n3 + j3];
            }
        }
    }
}

/// FFT plans plus eigenvalue tables for one grid: applies `Δ_h`, and any
/// function of `Δ_h` or `Δ_{1,h}`, in `O(N log N)`.
#[derive(Debug, Clone)]
pub struct SpectralLaplacian {
    grid: Grid3,
    eigs: LaplacianEigs,
    spectral_sums: Vec<f64>,
    fd_sums: Vec<f64>,
    fft: Fft3,
}

impl SpectralLaplacian {
    pub fn new(grid: Grid3) -> Self {
        let eigs = LaplacianEigs::new(&grid);
        Self {
            spectral_sums: eigs.spectral_sums(),
            fd_sums: eigs.fd_sums(),
            eigs,
            fft: Fft3::new(&grid),
            grid,
        }
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn eigs(&self) -> &LaplacianEigs {
        &self.eigs
    }

    pub fn fft(&self) -> &Fft3 {
        &self.fft
    }

    /// Summed eigenvalues of the chosen operator, flattened like a field.
    pub fn eigenvalues(&self, symbol: Symbol) -> &[f64] {
        match symbol {
            Symbol::Spectral => &self.spectral_sums,
            Symbol::FiniteDifference => &self.fd_sums,
        }
    }

    /// `F⁻¹ diag(g(λ(k))) F u` where `λ(k)` are the summed eigenvalues of `symbol`.
    pub fn apply_multiplier(
        &self,
        u: &Field,
        symbol: Symbol,
        g: impl Fn(f64) -> Complex64,
    ) -> Result<Field> {
        self.grid.ensure_same(u.grid())?;
        let mut data = u.values().to_vec();
        self.fft.forward(&mut data);
        for (v, &lambda) in data.iter_mut().zip(self.eigenvalues(symbol)) {
            *v *= g(lambda);
        }
        self.fft.inverse(&mut data);
        Field::new(self.grid, data)
    }

    /// Pseudo-spectral Laplacian `Δ_h u`.
    pub fn apply(&self, u: &Field) -> Result<Field> {
        self.apply_multiplier(u, Symbol::Spectral, |l| Complex64::new(l, 0.0))
    }

    /// `⟨-Δ_h u, u⟩_h`; real up to roundoff.
    pub fn quadratic_form(&self, u: &Field) -> Result<Complex64> {
        let lap = self.apply(u)?;
        Ok(-inner_product(&lap, u)?)
    }

    /// `|u|_h = sqrt(⟨-Δ_h u, u⟩_h)`. Negative roundoff up to
    /// `1e-12 ‖u‖_h²` is clamped to zero.
    pub fn seminorm_h(&self, u: &Field) -> Result<f64> {
        Ok(self.seminorm_h_squared(u)?.sqrt())
    }

    pub fn seminorm_h_squared(&self, u: &Field) -> Result<f64> {
        let q = self.quadratic_form(u)?.re;
        if q >= 0.0 {
            return Ok(q);
        }
        let allowance = 1e-12 * norm_h(u).powi(2);
        if -q <= allowance {
            Ok(0.0)
        } else {
            Err(DnlsError::NegativeQuadraticForm {
                value: q,
                allowance,
            })
        }
    }
}

/// `Δ_h u` for a one-off application; builds FFT plans each call.
pub fn apply_spectral_laplacian(u: &Field) -> Result<Field> {
    SpectralLaplacian::new(*u.grid()).apply(u)
}

/// Periodic 7-point finite-difference Laplacian `Δ_{1,h} u`, evaluated
/// directly from the stencil.
pub fn apply_fd_laplacian(u: &Field) -> Field {
    let grid = *u.grid();
    let [n1, n2, n3] = grid.counts();
    let inv_h2 = grid.spacings().map(|h| 1.0 / (h * h));
    let v = u.values();
    let mut out = Vec::with_capacity(v.len());
    for j3 in 0..n3 {
        for j2 in 0..n2 {
            for j1 in 0..n1 {
                let c = v[grid.index(j1, j2, j3)];
                let xp = v[grid.index((j1 + 1) % n1, j2, j3)];
                let xm = v[grid.index((j1 + n1 - 1) % n1, j2, j3)];
                let yp = v[grid.index(j1, (j2 + 1) % n2, j3)];
                let ym = v[grid.index(j1, (j2 + n2 - 1) % n2, j3)];
                let zp = v[grid.index(j1, j2, (j3 + 1) % n3)];
                let zm = v[grid.index(j1, j2, (j3 + n3 - 1) % n3)];
                out.push(
                    (xp - 2.0 * c + xm) * inv_h2[0]
                        + (yp - 2.0 * c + ym) * inv_h2[1]
                        + (zp - 2.0 * c + zm) * inv_h2[2],
                );
            }
        }
    }
    Field::new(grid, out).expect("stencil output has grid length")
}
