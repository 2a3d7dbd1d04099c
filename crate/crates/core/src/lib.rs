//! Fourier pseudo-spectral solvers for the three-dimensional damped nonlinear
//! Schrödinger equation
//!
//! ```text
//! i ψ_t + Δψ + β|ψ|²ψ + iγψ = 0,   (x, y, z) ∈ [0, l1) × [0, l2) × [0, l3), periodic.
//! ```
//!
//! Every scheme advances the gauged variable `u = e^{γt} ψ`, which satisfies
//! `i u_t + Δu + β e^{-2γt} |u|² u = 0`. Three time steppers are provided:
//!
//! * [`schemes::licfp`]: the linearly implicit, mass- and energy-conserving
//!   three-level pseudo-spectral scheme with a modified Crank–Nicolson start.
//! * [`schemes::ifd`]: the fully implicit Crank–Nicolson finite-difference
//!   comparator solved by fixed-point iteration.
//! * [`schemes::rk3`]: the classical explicit third-order Runge–Kutta method.
//!
//! Discrete mass/energy functionals, exact plane-wave solutions and
//! convergence-rate tables live in [`diagnostics`].

pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod operators;
pub mod schemes;

pub use error::{DnlsError, Result};
pub use grid::{Field, Grid3, TimeGrid};
pub use num_complex::Complex64;
pub use operators::{LaplacianEigs, SpectralLaplacian};
