//! Small dense real matrices and the few factorizations this crate needs.
//!
//! Everything here targets the problem sizes of this model (tens of rows, at
//! most a few hundred): row-major storage, straightforward loops, no
//! blocking. The solver is direct Gaussian elimination with partial
//! pivoting, which is exact enough and simpler to audit than an iterative
//! method at these sizes.

use crate::scalar::{cast, Scalar};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    nrows: usize,
    ncols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    /// Creates a zero-filled matrix.
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![T::zero(); nrows * ncols],
        }
    }

    /// Builds a matrix from nested rows. All rows must share one length.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged rows");
            data.extend_from_slice(row);
        }
        Self { nrows, ncols, data }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.ncols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.data[row * self.ncols + col] = value;
    }

    /// Returns one row as a slice.
    #[inline]
    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.ncols..(row + 1) * self.ncols]
    }

    /// Returns one row as a mutable slice.
    #[inline]
    pub fn row_mut(&mut self, row: usize) -> &mut [T] {
        &mut self.data[row * self.ncols..(row + 1) * self.ncols]
    }

    /// Copies `values` into the given row.
    pub fn set_row(&mut self, row: usize, values: &[T]) {
        assert_eq!(values.len(), self.ncols);
        self.row_mut(row).copy_from_slice(values);
    }

    /// Matrix-vector product `A x`.
    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![T::zero(); self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    /// Matrix-vector product written into a caller-provided buffer.
    pub fn matvec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (row, out) in y.iter_mut().enumerate() {
            let mut acc = T::zero();
            for (a, &xi) in self.row(row).iter().zip(x) {
                acc += *a * xi;
            }
            *out = acc;
        }
    }

    /// Largest absolute entry; zero for an empty matrix.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    /// Lower-triangular Cholesky factor `L` with `L L^T = self`.
    ///
    /// Returns `None` when a pivot is not strictly positive (the matrix is
    /// not numerically positive definite) or when a non-finite value appears.
    pub fn cholesky_lower(&self) -> Option<DenseMatrix<T>> {
        assert!(self.is_square(), "Cholesky needs a square matrix");
        let n = self.nrows;
        let mut l = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut acc = self.get(i, j);
                for k in 0..j {
                    acc -= l.get(i, k) * l.get(j, k);
                }
                if i == j {
                    if !(acc > T::zero()) || !acc.is_finite() {
                        return None;
                    }
                    l.set(i, j, acc.sqrt());
                } else {
                    l.set(i, j, acc / l.get(j, j));
                }
            }
        }
        Some(l)
    }

    /// Solves `A x = b` by Gaussian elimination with partial pivoting.
    ///
    /// Returns `None` when the matrix is numerically singular (the best
    /// available pivot falls below `n * eps * max_abs(A)`).
    pub fn solve_partial_pivot(&self, b: &[T]) -> Option<Vec<T>> {
        assert!(self.is_square(), "solve needs a square matrix");
        assert_eq!(b.len(), self.nrows);
        let n = self.nrows;
        if n == 0 {
            return Some(Vec::new());
        }
        let pivot_floor = cast::<T>(n as f64) * T::epsilon() * self.max_abs();

        let mut a = self.clone();
        let mut rhs = b.to_vec();
        for col in 0..n {
            let (pivot_row, pivot_abs) = (col..n)
                .map(|r| (r, a.get(r, col).abs()))
                .fold((col, T::zero()), |best, cand| {
                    if cand.1 > best.1 {
                        cand
                    } else {
                        best
                    }
                });
            if !(pivot_abs > pivot_floor) {
                return None;
            }
            if pivot_row != col {
                for c in 0..n {
                    let tmp = a.get(col, c);
                    a.set(col, c, a.get(pivot_row, c));
                    a.set(pivot_row, c, tmp);
                }
                rhs.swap(col, pivot_row);
            }
            let pivot = a.get(col, col);
            for r in col + 1..n {
                let factor = a.get(r, col) / pivot;
                if factor == T::zero() {
                    continue;
                }
                for c in col..n {
                    let v = a.get(r, c) - factor * a.get(col, c);
                    a.set(r, c, v);
                }
                rhs[r] = rhs[r] - factor * rhs[col];
            }
        }

        let mut x = vec![T::zero(); n];
        for row in (0..n).rev() {
            let mut acc = rhs[row];
            for c in row + 1..n {
                acc -= a.get(row, c) * x[c];
            }
            x[row] = acc / a.get(row, row);
        }
        Some(x)
    }
}
