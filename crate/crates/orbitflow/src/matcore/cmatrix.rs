use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Double-precision complex scalar used throughout the crate.
pub type C64 = Complex64;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum MatError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {lrows}x{lcols} vs {rrows}x{rcols}")]
    ShapeMismatch {
        lrows: usize,
        lcols: usize,
        rrows: usize,
        rcols: usize,
    },
    #[error("entry buffer has {got} entries, expected {rows}x{cols} = {expected}")]
    BadEntryCount {
        rows: usize,
        cols: usize,
        got: usize,
        expected: usize,
    },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix is not Hermitian within tolerance (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not skew-Hermitian within tolerance (deviation {deviation:.3e})")]
    NotSkewHermitian { deviation: f64 },
    #[error("matrix is too far from unitary (||M*M - I|| = {deviation:.3e})")]
    NotNearUnitary { deviation: f64 },
    #[error("k = {k} out of range 1..={max}")]
    KyFanRange { k: usize, max: usize },
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("factorization did not converge")]
    FactorizationFailed,
}

/// Dense complex matrix with row-major storage.
///
/// The universal value type of the crate: operands, targets, unitaries and
/// residuals are all `CMatrix`. Construction enforces `entries.len() ==
/// rows * cols`; the arithmetic operators panic on shape mismatch (shapes are
/// validated once at the problem boundary, not per operation).
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl CMatrix {
    pub fn from_vec(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self, MatError> {
        if entries.len() != rows * cols {
            return Err(MatError::BadEntryCount {
                rows,
                cols,
                got: entries.len(),
                expected: rows * cols,
            });
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    /// Build from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self, MatError> {
        if entries.len() != rows * cols {
            return Err(MatError::BadEntryCount {
                rows,
                cols,
                got: entries.len(),
                expected: rows * cols,
            });
        }
        Ok(Self {
            rows,
            cols,
            entries: entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
        })
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        Self::diag(&values.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    /// Rectangular matrix with `values` on the main diagonal, zero elsewhere.
    pub fn rect_diag_real(rows: usize, cols: usize, values: &[f64]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, &v) in values.iter().take(rows.min(cols)).enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn validate_finite(&self) -> Result<(), MatError> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(MatError::NonFinite)
        }
    }

    pub fn require_square(&self) -> Result<usize, MatError> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(MatError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn same_shape(&self, other: &Self) -> Result<(), MatError> {
        if self.shape() == other.shape() {
            Ok(())
        } else {
            Err(MatError::ShapeMismatch {
                lrows: self.rows,
                lcols: self.cols,
                rrows: other.rows,
                rcols: other.cols,
            })
        }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose `M*`.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> C64 {
        debug_assert!(self.is_square());
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm `sqrt(sum |m_ij|^2)`.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Real Frobenius inner product `Re tr(A* B)`.
    pub fn frobenius_inner_re(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.shape(), other.shape());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    /// Skew-Hermitian part `(M - M*)/2`.
    pub fn skew_part(&self) -> Result<Self, MatError> {
        self.require_square()?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] - self[(j, i)].conj()) * 0.5
        }))
    }

    /// Hermitian part `(M + M*)/2`.
    pub fn herm_part(&self) -> Result<Self, MatError> {
        self.require_square()?;
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        }))
    }

    /// `||M - M*||`, zero for Hermitian matrices.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `||M + M*||`, zero for skew-Hermitian matrices.
    pub fn skew_deviation(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] + self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `||M*M - I||`, zero for matrices with orthonormal columns.
    pub fn unitary_deviation(&self) -> f64 {
        let gram = &self.adjoint() * self;
        (&gram - &Self::identity(gram.rows)).frobenius_norm()
    }

    pub(crate) fn to_na(&self) -> DMatrix<C64> {
        DMatrix::from_row_iterator(self.rows, self.cols, self.entries.iter().copied())
    }

    pub(crate) fn from_na(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix addition shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix subtraction shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;

    fn neg(self) -> CMatrix {
        self.map(|z| -z)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let lhs_row = i * rhs.cols;
                let rhs_row = k * rhs.cols;
                for j in 0..rhs.cols {
                    out.entries[lhs_row + j] += a * rhs.entries[rhs_row + j];
                }
            }
        }
        out
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frobenius_identity_2x2() {
        assert!((CMatrix::identity(2).frobenius_norm() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn frobenius_zero() {
        assert_eq!(CMatrix::zeros(3, 4).frobenius_norm(), 0.0);
    }

    #[test]
    fn frobenius_three_four_five() {
        let m = CMatrix::from_real(2, 2, &[3.0, 4.0, 0.0, 0.0]).unwrap();
        assert!((m.frobenius_norm() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn skew_part_of_hermitian_is_zero() {
        let h = CMatrix::from_fn(3, 3, |i, j| {
            C64::new((i + j) as f64, i as f64 - j as f64)
        });
        assert!(h.hermitian_deviation() < 1e-15);
        assert!(h.skew_part().unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn skew_part_of_skew_is_identity_map() {
        let s = CMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                C64::new(0.0, 1.0 + i as f64)
            } else if i < j {
                C64::new(1.0, 2.0)
            } else {
                C64::new(-1.0, 2.0)
            }
        });
        assert!(s.skew_deviation() < 1e-15);
        assert!((&s.skew_part().unwrap() - &s).frobenius_norm() < 1e-15);
    }

    #[test]
    fn skew_part_strict_upper() {
        let m = CMatrix::from_real(2, 2, &[0.0, 2.0, 0.0, 0.0]).unwrap();
        let expected = CMatrix::from_real(2, 2, &[0.0, 1.0, -1.0, 0.0]).unwrap();
        assert!((&m.skew_part().unwrap() - &expected).frobenius_norm() < 1e-15);
        // skew + herm recovers the original
        let sum = &m.skew_part().unwrap() + &m.herm_part().unwrap();
        assert!((&sum - &m).frobenius_norm() < 1e-15);
    }

    #[test]
    fn skew_part_rejects_rectangular() {
        let m = CMatrix::zeros(2, 3);
        assert!(matches!(m.skew_part(), Err(MatError::NotSquare { .. })));
    }

    #[test]
    fn matmul_against_known_product() {
        let a = CMatrix::from_real(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let b = CMatrix::from_real(3, 2, &[7.0, 8.0, 9.0, 10.0, 11.0, 12.0]).unwrap();
        let c = &a * &b;
        let expected = CMatrix::from_real(2, 2, &[58.0, 64.0, 139.0, 154.0]).unwrap();
        assert!((&c - &expected).frobenius_norm() < 1e-12);
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let m = CMatrix::from_fn(2, 3, |i, j| C64::new(i as f64, j as f64));
        let a = m.adjoint();
        assert_eq!(a.shape(), (3, 2));
        assert_eq!(a[(2, 1)], C64::new(1.0, -2.0));
    }

    #[test]
    fn bad_entry_count_is_rejected() {
        assert!(matches!(
            CMatrix::from_vec(2, 2, vec![C64::new(1.0, 0.0); 3]),
            Err(MatError::BadEntryCount { .. })
        ));
    }

    #[test]
    fn na_round_trip() {
        let m = CMatrix::from_fn(3, 5, |i, j| C64::new(i as f64 + 0.5, j as f64 - 1.0));
        assert_eq!(CMatrix::from_na(&m.to_na()), m);
    }
}
