use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{CoepError, Result};

/// Dense complex matrix. Square matrices are the elements of the algebra;
/// rectangular ones appear as bases and stacked operands.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(CoepError::InvalidInput(format!("matrix dimensions must be positive, got {rows}x{cols}")));
        }
        if entries.len() != rows * cols {
            return Err(CoepError::InvalidInput(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(pos) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CoepError::InvalidInput(format!("entry {pos} is not finite")));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    /// Row-major real entries; panics on a length mismatch. Intended for literals.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        Self(DMatrix::from_row_slice(rows, cols, &entries.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>()))
    }

    /// Wraps an nalgebra matrix after checking every entry is finite.
    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CoepError::InvalidInput("matrix has non-finite entries".into()));
        }
        Ok(Self(m))
    }

    pub(crate) fn wrap(m: DMatrix<Complex64>) -> Self {
        Self(m)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    pub fn entries_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    /// `ab - ba`.
    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape(), "shape mismatch");
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        super::subspace::singular_values(&self.0)
    }

    /// Column-major vectorization, the coordinates used by the lifted operators.
    pub fn vectorize(&self) -> DVector<Complex64> {
        DVector::from_column_slice(self.0.as_slice())
    }

    pub fn unvectorize(n: usize, v: &DVector<Complex64>) -> Self {
        assert_eq!(v.len(), n * n, "vector length is not n^2");
        Self(DMatrix::from_column_slice(n, n, v.as_slice()))
    }

    pub fn kronecker(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// Horizontal concatenation `[self other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows(), other.rows(), "row mismatch in hstack");
        let mut m = DMatrix::zeros(self.rows(), self.cols() + other.cols());
        m.columns_mut(0, self.cols()).copy_from(&self.0);
        m.columns_mut(self.cols(), other.cols()).copy_from(&other.0);
        Self(m)
    }

    /// Vertical concatenation `[self; other]`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols(), other.cols(), "column mismatch in vstack");
        let mut m = DMatrix::zeros(self.rows() + other.rows(), self.cols());
        m.rows_mut(0, self.rows()).copy_from(&self.0);
        m.rows_mut(self.rows(), other.rows()).copy_from(&other.0);
        Self(m)
    }

    pub(crate) fn require_square(&self, what: &str) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows())
        } else {
            Err(CoepError::Shape(format!("{what} must be square, got {}x{}", self.rows(), self.cols())))
        }
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows() {
            write!(f, "[")?;
            for j in 0..self.cols() {
                let z = self.0[(i, j)];
                if j > 0 {
                    write!(f, ", ")?;
                }
                if z.im == 0.0 {
                    write!(f, "{}", z.re)?;
                } else {
                    write!(f, "{}{:+}i", z.re, z.im)?;
                }
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

macro_rules! impl_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix((&self.0).$method(&rhs.0))
            }
        }
        impl $tr<ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix((&self.0).$method(&rhs.0))
            }
        }
        impl $tr<&ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix((&self.0).$method(&rhs.0))
            }
        }
        impl $tr<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix((&self.0).$method(&rhs.0))
            }
        }
    };
}

impl_binop!(Add, add);
impl_binop!(Sub, sub);
impl_binop!(Mul, mul);

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-self.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes_and_non_finite() {
        assert!(ComplexMatrix::new(2, 2, vec![Complex64::new(1.0, 0.0); 3]).is_err());
        assert!(ComplexMatrix::new(0, 2, vec![]).is_err());
        let mut e = vec![Complex64::new(0.0, 0.0); 4];
        e[2] = Complex64::new(f64::NAN, 0.0);
        assert!(ComplexMatrix::new(2, 2, e).is_err());
    }

    #[test]
    fn row_major_layout() {
        let m = ComplexMatrix::from_real(2, 3, &[1., 2., 3., 4., 5., 6.]);
        assert_eq!(m.get(0, 2).re, 3.0);
        assert_eq!(m.get(1, 0).re, 4.0);
        let back: Vec<f64> = m.entries_row_major().iter().map(|z| z.re).collect();
        assert_eq!(back, vec![1., 2., 3., 4., 5., 6.]);
    }

    #[test]
    fn singular_values_are_sorted() {
        let m = ComplexMatrix::from_real_diagonal(&[0.5, 3.0, 1.0]);
        assert_eq!(m.singular_values(), vec![3.0, 1.0, 0.5]);
    }

    #[test]
    fn vectorization_is_column_major() {
        let m = ComplexMatrix::from_real(2, 2, &[1., 2., 3., 4.]);
        let v = m.vectorize();
        assert_eq!(v[1].re, 3.0);
        assert_eq!(ComplexMatrix::unvectorize(2, &v), m);
    }
}
