//! Brute-force references for tiny grids.
//!
//! Everything here is deliberately naive: operators are materialized as
//! dense Kronecker sums, systems are solved by LU factorization and norms are
//! explicit triple loops over `(j1, j2, j3)`. Nothing in this crate calls the
//! FFT paths of `dnls-core`, so agreement between the two is meaningful.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use dnls_core::{Field, Grid3};

/// Largest operator order the dense builders accept.
pub const MAX_ORDER: usize = 4096;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("operator order {0} exceeds the dense limit {MAX_ORDER}")]
    TooLarge(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
    #[error("direct solve residual {0:e} exceeds 1e-11")]
    Inaccurate(f64),
}

pub type Result<T> = std::result::Result<T, OracleError>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Explicit matrix acting on fields flattened x-fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    pub entries: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn order(&self) -> usize {
        self.entries.nrows()
    }

    pub fn apply(&self, u: &Field) -> Result<Field> {
        if u.len() != self.order() {
            return Err(OracleError::Dimension(format!(
                "field of length {} vs operator of order {}",
                u.len(),
                self.order()
            )));
        }
        let n = self.order();
        let mut out = vec![ZERO; n];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = ZERO;
            for (j, &v) in u.values().iter().enumerate() {
                acc += self.entries[(i, j)] * v;
            }
            *o = acc;
        }
        Ok(Field::new(*u.grid(), out).expect("same length"))
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.order();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn row_sums(&self) -> Vec<Complex64> {
        (0..self.order())
            .map(|i| self.entries.row(i).iter().sum())
            .collect()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        let mut eig: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        eig
    }

    /// `⟨A u, u⟩_h` by direct summation.
    pub fn quadratic_form(&self, u: &Field) -> Result<Complex64> {
        let au = self.apply(u)?;
        Ok(naive_inner_product(&au, u))
    }
}

fn guard(grid: &Grid3) -> Result<usize> {
    let n = grid.len();
    if n > MAX_ORDER {
        Err(OracleError::TooLarge(n))
    } else {
        Ok(n)
    }
}

fn identity(n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
}

/// `I_{N3} ⊗ I_{N2} ⊗ A + I_{N3} ⊗ B ⊗ I_{N1} + C ⊗ I_{N2} ⊗ I_{N1}`
fn kronecker_sum(
    a: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
    c: &DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    let (i1, i2, i3) = (
        identity(a.nrows()),
        identity(b.nrows()),
        identity(c.nrows()),
    );
    i3.kronecker(&i2).kronecker(a)
        + i3.kronecker(b).kronecker(&i1)
        + c.kronecker(&i2).kronecker(&i1)
}

/// Second-derivative collocation matrix along one axis built as
/// `F^H Λ F / N` from the explicit DFT matrix.
pub fn spectral_second_derivative(n: usize, length: f64) -> DMatrix<Complex64> {
    let mu = 2.0 * std::f64::consts::PI / length;
    let dft = DMatrix::from_fn(n, n, |j, k| {
        Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64)
    });
    let lambda = DMatrix::from_fn(n, n, |j, k| {
        if j != k {
            return ZERO;
        }
        let m = if k <= n / 2 {
            k as f64
        } else {
            k as f64 - n as f64
        };
        Complex64::new(-(mu * m).powi(2), 0.0)
    });
    dft.adjoint() * lambda * dft / Complex64::new(n as f64, 0.0)
}

/// Periodic three-point second difference matrix `B`.
pub fn fd_second_derivative(n: usize, h: f64) -> DMatrix<Complex64> {
    let w = 1.0 / (h * h);
    DMatrix::from_fn(n, n, |i, j| {
        let d = (i + n - j) % n;
        if d == 0 {
            Complex64::new(-2.0 * w, 0.0)
        } else if d == 1 || d == n - 1 {
            // on two points both neighbours coincide
            Complex64::new(if n == 2 { 2.0 * w } else { w }, 0.0)
        } else {
            ZERO
        }
    })
}

pub fn dense_spectral_laplacian(grid: &Grid3) -> Result<DenseOperator> {
    guard(grid)?;
    let [n1, n2, n3] = grid.counts();
    let [l1, l2, l3] = grid.lengths();
    Ok(DenseOperator {
        entries: kronecker_sum(
            &spectral_second_derivative(n1, l1),
            &spectral_second_derivative(n2, l2),
            &spectral_second_derivative(n3, l3),
        ),
    })
}

pub fn dense_fd_laplacian(grid: &Grid3) -> Result<DenseOperator> {
    guard(grid)?;
    let [n1, n2, n3] = grid.counts();
    let [h1, h2, h3] = grid.spacings();
    Ok(DenseOperator {
        entries: kronecker_sum(
            &fd_second_derivative(n1, h1),
            &fd_second_derivative(n2, h2),
            &fd_second_derivative(n3, h3),
        ),
    })
}

/// `I - iτ (Δ_h + c diag(p))`
pub fn dense_shifted_system(
    grid: &Grid3,
    potential: &[f64],
    tau: f64,
    coeff: f64,
) -> Result<DenseOperator> {
    let lap = dense_spectral_laplacian(grid)?;
    let n = lap.order();
    if potential.len() != n {
        return Err(OracleError::Dimension(format!(
            "{} potential values for order {n}",
            potential.len()
        )));
    }
    let i_tau = Complex64::new(0.0, tau);
    let mut a = identity(n) - lap.entries * i_tau;
    for (k, &p) in potential.iter().enumerate() {
        a[(k, k)] -= i_tau * coeff * p;
    }
    Ok(DenseOperator { entries: a })
}

/// Direct LU solve of `A x = b`; fails unless `‖Ax - b‖ <= 1e-11 max(1, ‖b‖)`.
pub fn dense_solve(a: &DenseOperator, b: &Field) -> Result<Field> {
    let n = a.order();
    if b.len() != n {
        return Err(OracleError::Dimension(format!(
            "rhs of length {} for order {n}",
            b.len()
        )));
    }
    let rhs = nalgebra::DVector::from_column_slice(b.values());
    let x = a
        .entries
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or(OracleError::Singular)?;
    let residual = (&a.entries * &x - &rhs).norm();
    if residual > 1e-11 * rhs.norm().max(1.0) {
        return Err(OracleError::Inaccurate(residual));
    }
    Ok(Field::new(*b.grid(), x.iter().copied().collect()).expect("same length"))
}

fn at(u: &Field, j1: usize, j2: usize, j3: usize) -> Complex64 {
    let [n1, n2, _] = u.grid().counts();
    u.values()[j1 + n1 * j2 + n1 * n2 * j3]
}

/// `h1 h2 h3 Σ U conj(V)` over an explicit triple loop.
pub fn naive_inner_product(u: &Field, v: &Field) -> Complex64 {
    let [n1, n2, n3] = u.grid().counts();
    let [h1, h2, h3] = u.grid().spacings();
    let mut acc = ZERO;
    for j3 in 0..n3 {
        for j2 in 0..n2 {
            for j1 in 0..n1 {
                acc += at(u, j1, j2, j3) * at(v, j1, j2, j3).conj();
            }
        }
    }
    acc * (h1 * h2 * h3)
}

/// Every grid norm by direct summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaiveNorms {
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    pub l6: f64,
    pub linf: f64,
    /// Finite-difference semi-norm `|U|_{1,h}`.
    pub seminorm_1h: f64,
}

pub fn naive_norms(u: &Field) -> NaiveNorms {
    let [n1, n2, n3] = u.grid().counts();
    let [h1, h2, h3] = u.grid().spacings();
    let vol = h1 * h2 * h3;
    let (mut s2, mut s3, mut s4, mut s6, mut inf, mut grad) = (0.0, 0.0, 0.0, 0.0, 0.0f64, 0.0);
    for j3 in 0..n3 {
        for j2 in 0..n2 {
            for j1 in 0..n1 {
                let v = at(u, j1, j2, j3);
                let m = v.norm();
                s2 += m * m;
                s3 += m * m * m;
                s4 += m.powi(4);
                s6 += m.powi(6);
                inf = inf.max(m);
                let dx = (at(u, (j1 + 1) % n1, j2, j3) - v) / h1;
                let dy = (at(u, j1, (j2 + 1) % n2, j3) - v) / h2;
                let dz = (at(u, j1, j2, (j3 + 1) % n3) - v) / h3;
                grad += dx.norm_sqr() + dy.norm_sqr() + dz.norm_sqr();
            }
        }
    }
    NaiveNorms {
        l2: (vol * s2).sqrt(),
        l3: (vol * s3).cbrt(),
        l4: (vol * s4).powf(0.25),
        l6: (vol * s6).powf(1.0 / 6.0),
        linf: inf,
        seminorm_1h: (vol * grad).sqrt(),
    }
}
