//! Small dense complex matrices. Eigensolves and singular values go through
//! nalgebra; this type keeps a row-major layout for the Pauli kernels.

use std::ops::{Index, IndexMut};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "matrix must be square");
            m.data[i * dim..(i + 1) * dim].copy_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[Complex64]) {
        for (i, &v) in col.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|i| self.data[i * self.dim..(i + 1) * self.dim].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix { dim: self.dim, data: self.data.iter().map(|a| a * s).collect() }
    }

    /// `self * rhs - rhs * self`.
    pub fn commutator(&self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).sub(&rhs.matmul(self))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation `|A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Operator 2-norm (largest singular value).
    pub fn operator_norm(&self) -> f64 {
        self.to_nalgebra().singular_values().iter().copied().fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl CMatrix {
    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        let dim = m.nrows();
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                out[(i, j)] = m[(i, j)];
            }
        }
        out
    }
}

/// Eigendecomposition of the Hermitian part of `a`.
///
/// Returns unsorted eigenvalues and the unitary whose columns are the matching
/// eigenvectors.
pub fn hermitian_eigh(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let m = a.to_nalgebra();
    let herm = (&m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(herm);
    (eig.eigenvalues.iter().copied().collect(), CMatrix::from_nalgebra(&eig.eigenvectors))
}
