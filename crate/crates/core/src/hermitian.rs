//! Hermitian matrices and the spectral functions the quantum layer needs.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::tolerance;

pub type C64 = Complex<f64>;

/// A square complex matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    matrix: DMatrix<C64>,
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl HermitianMatrix {
    /// Accepts `matrix` if it is Hermitian up to a small relative deviation
    /// and stores its Hermitian part.
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NotHermitian {
                deviation: f64::NAN,
            });
        }
        let adjoint = matrix.adjoint();
        let deviation = (&matrix - &adjoint).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let scale = matrix.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if deviation > tolerance::HERMITIAN * scale {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::symmetrized(matrix))
    }

    /// Hermitian part `(m + m†)/2`, without any check. For results of
    /// arithmetic that is Hermitian up to rounding.
    pub fn symmetrized(matrix: DMatrix<C64>) -> Self {
        let adjoint = matrix.adjoint();
        Self {
            matrix: (matrix + adjoint).unscale(2.0),
        }
    }

    /// Rows of `[re, im]` pairs.
    pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |j, k| {
            let [re, im] = rows[j][k];
            C64::new(re, im)
        }))
    }

    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.dim())
            .map(|j| {
                (0..self.dim())
                    .map(|k| {
                        let z = self.matrix[(j, k)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect()
    }

    pub fn from_real_diagonal(diagonal: &[f64]) -> Self {
        let n = diagonal.len();
        Self {
            matrix: DMatrix::from_fn(n, n, |j, k| {
                if j == k {
                    C64::new(diagonal[j], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn entry(&self, j: usize, k: usize) -> C64 {
        self.matrix[(j, k)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|j| self.matrix[(j, j)].re).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.matrix[(j, j)].re).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.matrix
            .iter()
            .enumerate()
            .all(|(idx, z)| idx % (self.dim() + 1) == 0 || (z.re == 0.0 && z.im == 0.0))
    }

    pub fn spectrum(&self) -> Spectrum {
        if self.dim() == 0 {
            return Spectrum {
                values: Vec::new(),
                vectors: DMatrix::zeros(0, 0),
            };
        }
        let eig = SymmetricEigen::new(self.matrix.clone());
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(self.dim(), self.dim(), |j, k| {
            eig.eigenvectors[(j, order[k])]
        });
        Spectrum { values, vectors }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.spectrum().values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// `V f(Λ) V†` for the spectral decomposition of `self`.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let s = self.spectrum();
        let mapped = DVector::from_iterator(
            self.dim(),
            s.values.iter().map(|&x| C64::new(f(x), 0.0)),
        );
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |j, k| s.vectors[(j, k)] * mapped[k]);
        Self::symmetrized(scaled * s.vectors.adjoint())
    }

    /// Positive square root. Eigenvalues in `[-1e-9, 0)` are clamped to zero.
    pub fn psd_sqrt(&self) -> Result<HermitianMatrix> {
        let min = self.min_eigenvalue();
        if min < -tolerance::PSD {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(self.apply_spectral(|x| x.max(0.0).sqrt()))
    }

    /// Inverse square root on the support; eigenvalues at or below `1e-12` map to zero.
    pub fn pinv_sqrt(&self) -> HermitianMatrix {
        self.apply_spectral(|x| {
            if x > tolerance::SUPPORT {
                1.0 / x.sqrt()
            } else {
                0.0
            }
        })
    }

    /// Orthogonal projector onto the span of eigenvectors with eigenvalue above `1e-12`.
    pub fn support_projector(&self) -> HermitianMatrix {
        self.apply_spectral(|x| if x > tolerance::SUPPORT { 1.0 } else { 0.0 })
    }

    /// Sum of absolute eigenvalues.
    pub fn trace_norm(&self) -> f64 {
        self.eigenvalues().iter().map(|x| x.abs()).sum()
    }

    pub fn trace_distance(&self, other: &HermitianMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.sub(other).trace_norm()
    }

    /// Largest entrywise modulus of the difference.
    pub fn max_abs_diff(&self, other: &HermitianMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        (&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn add(&self, other: &HermitianMatrix) -> HermitianMatrix {
        Self {
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &HermitianMatrix) -> HermitianMatrix {
        Self {
            matrix: &self.matrix - &other.matrix,
        }
    }

    pub fn scale(&self, factor: f64) -> HermitianMatrix {
        Self {
            matrix: self.matrix.map(|z| z * factor),
        }
    }

    /// `self · inner · self`, Hermitian whenever both factors are.
    pub fn sandwich(&self, inner: &HermitianMatrix) -> HermitianMatrix {
        Self::symmetrized(&self.matrix * &inner.matrix * &self.matrix)
    }

    /// `Tr(self · other)`, real for Hermitian factors.
    pub fn inner(&self, other: &HermitianMatrix) -> f64 {
        self.matrix
            .iter()
            .zip(other.matrix.transpose().iter())
            .map(|(a, b)| (a * b).re)
            .sum()
    }
}

impl AsRef<HermitianMatrix> for HermitianMatrix {
    fn as_ref(&self) -> &HermitianMatrix {
        self
    }
}

/// Sum of a non-empty sequence of same-dimension matrices; `zeros(dim)` if empty.
pub fn sum<'a, I: IntoIterator<Item = &'a HermitianMatrix>>(dim: usize, items: I) -> HermitianMatrix {
    let mut total = DMatrix::zeros(dim, dim);
    for m in items {
        total += &m.matrix;
    }
    HermitianMatrix { matrix: total }
}
