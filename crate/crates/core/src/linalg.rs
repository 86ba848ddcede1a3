//! Dense complex Hermitian linear algebra.
//!
//! Matrices here are small (dimension at most 64), so everything is dense
//! and backed by `nalgebra`.

use log::debug;
use nalgebra::{Complex, DMatrix, DVector};

use crate::{Error, Result};

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;

/// Largest tolerated `max |M - M^dagger|` for Hermitian routines.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as roundoff and clamped to 0.
pub const PSD_CLAMP: f64 = 1e-10;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_SWEEPS: usize = 10_000;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigensystem {
    pub eigenvalues: DVector<f64>,
    /// Orthonormal eigenvectors stored as columns, in eigenvalue order.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigensystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// `V diag(f(lambda)) V^dagger`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= C64::from(f(self.eigenvalues[j]));
        }
        scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_eigenvalues(|x| x)
    }
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// `max_{ij} |M_ij - conj(M_ji)|`.
pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// `Re Tr[A B]` without forming the product.
pub fn trace_product_re(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

fn check_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    Ok(())
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    check_square(m)?;
    let deviation = hermiticity_defect(m);
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

fn symmetrized(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * C64::from(0.5)
}

/// Full eigensystem of a Hermitian matrix.
pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<HermitianEigensystem> {
    check_hermitian(m)?;
    let n = m.nrows();
    let eig = symmetrized(m)
        .try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_SWEEPS)
        .ok_or_else(|| Error::NoConvergence(format!("hermitian eigensystem ({n}x{n})")))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigensystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<DVector<f64>> {
    Ok(hermitian_eigensystem(m)?.eigenvalues)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?[0])
}

/// Eigensystem of a Hermitian PSD matrix with roundoff negatives clamped.
pub fn psd_eigensystem(m: &ComplexMatrix) -> Result<HermitianEigensystem> {
    let mut es = hermitian_eigensystem(m)?;
    let min = es.min_eigenvalue();
    if min < -PSD_CLAMP {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    // eigenvalues at roundoff level are indistinguishable from zero
    let floor = es.max_eigenvalue().abs() * f64::EPSILON * (4 * es.dim()) as f64;
    for v in es.eigenvalues.iter_mut() {
        if *v < floor {
            if *v < 0.0 {
                debug!("clamping eigenvalue {v:e} to zero");
            }
            *v = 0.0;
        }
    }
    Ok(es)
}

/// Principal square root of a Hermitian positive semidefinite matrix.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(psd_eigensystem(m)?.map_eigenvalues(f64::sqrt))
}

/// Kronecker product with entry `((i,k),(j,l)) = A(i,j) B(k,l)`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Which tensor factor a partial transpose acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Partial transpose of an operator on `C^dA (x) C^dB`.
pub fn partial_transpose(
    m: &ComplexMatrix,
    dims: (usize, usize),
    subsystem: Subsystem,
) -> Result<ComplexMatrix> {
    check_square(m)?;
    let (da, db) = dims;
    if da * db != m.nrows() {
        return Err(Error::DimensionMismatch {
            expected: da * db,
            found: m.nrows(),
        });
    }
    let n = m.nrows();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..da {
        for k in 0..db {
            for j in 0..da {
                for l in 0..db {
                    let (row, col) = match subsystem {
                        Subsystem::B => (i * db + l, j * db + k),
                        Subsystem::A => (j * db + k, i * db + l),
                    };
                    out[(row, col)] = m[(i * db + k, j * db + l)];
                }
            }
        }
    }
    Ok(out)
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
pub fn symmetric_eigen(g: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = g.nrows();
    if g.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.ncols(),
        });
    }
    let sym = (g + g.transpose()) * 0.5;
    let eig = sym
        .try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_SWEEPS)
        .ok_or_else(|| Error::NoConvergence(format!("symmetric eigensystem ({n}x{n})")))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}
