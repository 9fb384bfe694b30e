use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::LinalgError;

/// Dense complex matrix with at least one row and one column and finite entries.
///
/// Arithmetic through the operator traits panics on shape mismatch, the same
/// way the underlying `nalgebra` storage does. Constructors validate.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    inner: DMatrix<Complex64>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyShape { rows, cols });
        }
        if entries.len() != rows * cols {
            return Err(LinalgError::EntryCount {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, &entries))
    }

    /// Builds a real matrix from row slices. Panics on ragged or empty input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(r > 0 && c > 0, "empty matrix");
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let inner = DMatrix::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0));
        Self::from_dmatrix(inner).expect("non-finite literal")
    }

    pub fn from_dmatrix(inner: DMatrix<Complex64>) -> Result<Self, LinalgError> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(LinalgError::EmptyShape {
                rows: inner.nrows(),
                cols: inner.ncols(),
            });
        }
        if let Some((idx, _)) = inner
            .iter()
            .enumerate()
            .find(|(_, z)| !(z.re.is_finite() && z.im.is_finite()))
        {
            // column-major storage index
            let (row, col) = (idx % inner.nrows(), idx / inner.nrows());
            return Err(LinalgError::NonFinite { row, col });
        }
        Ok(Self { inner })
    }

    /// Wraps storage produced by internal arithmetic. Shape must be nonempty.
    pub(crate) fn wrap(inner: DMatrix<Complex64>) -> Self {
        debug_assert!(inner.nrows() > 0 && inner.ncols() > 0);
        Self { inner }
    }

    pub fn identity(n: usize) -> Self {
        Self::wrap(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::wrap(DMatrix::zeros(rows, cols))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::wrap(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Nilpotent Jordan block: ones on the superdiagonal.
    pub fn jordan_zero(n: usize) -> Self {
        Self::wrap(DMatrix::from_fn(n, n, |i, j| {
            if j == i + 1 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    /// Block diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &CMatrix) -> Self {
        let (r1, c1) = self.shape();
        let (r2, c2) = other.shape();
        let mut out = DMatrix::zeros(r1 + r2, c1 + c2);
        out.view_mut((0, 0), (r1, c1)).copy_from(&self.inner);
        out.view_mut((r1, c1), (r2, c2)).copy_from(&other.inner);
        Self::wrap(out)
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.inner
    }

    /// Row-major copy of the entries.
    pub fn entries_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.inner.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::wrap(self.inner.adjoint())
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::wrap(&self.inner * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// `λI − self`.
    pub fn shifted_negation(&self, lambda: Complex64) -> Self {
        assert!(self.is_square(), "shift of a non-square matrix");
        let mut out = -&self.inner;
        for i in 0..self.rows() {
            out[(i, i)] += lambda;
        }
        Self::wrap(out)
    }

    /// `self^k` by repeated squaring; `self^0 = I`.
    pub fn pow(&self, k: usize) -> Self {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut result = DMatrix::identity(self.rows(), self.rows());
        let mut base = self.inner.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Self::wrap(result)
    }

    /// Inverse through LU with partial pivoting; `None` when singular in floating point.
    pub fn try_inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        self.inner.clone().try_inverse().map(Self::wrap)
    }

    /// Frobenius distance, `‖self − other‖`.
    pub fn distance(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CMatrix{:?} ", self.shape())?;
        f.debug_list()
            .entries((0..self.rows()).map(|i| {
                (0..self.cols())
                    .map(|j| self.inner[(i, j)])
                    .collect::<Vec<_>>()
            }))
            .finish()
    }
}

impl fmt::Display for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::text::format_matrix(self))
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix::wrap(&self.inner * &rhs.inner)
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix::wrap(&self.inner + &rhs.inner)
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &'a CMatrix) -> CMatrix {
        CMatrix::wrap(&self.inner - &rhs.inner)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix::wrap(-&self.inner)
    }
}

/// Product of a list of factors, left to right.
pub fn product(factors: &[&CMatrix]) -> CMatrix {
    let (first, rest) = factors.split_first().expect("empty product");
    rest.iter().fold((*first).clone(), |acc, m| &acc * m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rejects_bad_shapes_and_nan() {
        assert!(matches!(
            CMatrix::new(0, 2, vec![]),
            Err(LinalgError::EmptyShape { .. })
        ));
        assert!(matches!(
            CMatrix::new(2, 2, vec![c(1.0); 3]),
            Err(LinalgError::EntryCount { expected: 4, found: 3 })
        ));
        let err = CMatrix::new(2, 2, vec![c(1.0), c(2.0), c(f64::NAN), c(0.0)]).unwrap_err();
        assert_eq!(err, LinalgError::NonFinite { row: 1, col: 0 });
    }

    #[test]
    fn pow_matches_repeated_product() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0, 0.0], &[0.5, -1.0, 3.0], &[0.0, 1.0, 1.0]]);
        let mut expected = CMatrix::identity(3);
        for k in 0..7 {
            assert!(a.pow(k).distance(&expected) <= 1e-12 * (1.0 + expected.norm()));
            expected = &expected * &a;
        }
    }

    #[test]
    fn jordan_block_is_nilpotent() {
        let j = CMatrix::jordan_zero(3);
        assert!(j.pow(2).norm() > 0.0);
        assert_eq!(j.pow(3).norm(), 0.0);
    }

    #[test]
    fn direct_sum_places_blocks() {
        let a = CMatrix::from_real_diagonal(&[2.0]);
        let b = CMatrix::jordan_zero(2);
        let s = a.direct_sum(&b);
        assert_eq!(s.shape(), (3, 3));
        assert_eq!(s.get(0, 0), c(2.0));
        assert_eq!(s.get(1, 2), c(1.0));
        assert_eq!(s.get(0, 1), c(0.0));
    }
}
