//! Dense row-major matrices.
//!
//! [`Matrix`] is the unconstrained storage type; [`PositiveMatrix`] wraps it
//! with the strict-positivity invariant the scaling and root statistics
//! require. Both are immutable after construction.

use crate::error::{Error, Result};

/// Dense row-major matrix of `f64` entries. At least 1x1.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data. Requires `data.len() == rows * cols`
    /// and at least one row and column.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::WrongShape {
                expected: "at least 1x1",
                rows,
                cols,
            });
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "row-major data length",
                expected: rows * cols,
                actual: data.len(),
            });
        }
        for (idx, &v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NotFinite {
                    row: idx / cols,
                    col: idx % cols,
                    value: v,
                });
            }
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows, which must be non-empty and rectangular.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::WrongShape {
                expected: "at least 1x1",
                rows: r,
                cols: c,
            });
        }
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    what: "row length",
                    expected: c,
                    actual: row.len(),
                });
            }
        }
        Self::new(r, c, rows.concat())
    }

    /// n x m matrix with every entry equal to `value`.
    pub fn constant(rows: usize, cols: usize, value: f64) -> Result<Self> {
        Self::new(rows, cols, vec![value; rows * cols])
    }

    /// n x n identity matrix.
    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::constant(n, n, 0.0)?;
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    /// Row `row` as a contiguous slice.
    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    /// Row-major entries.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Copy with entry (`row`, `col`) replaced by `value`.
    pub fn with_entry(&self, row: usize, col: usize, value: f64) -> Result<Self> {
        let mut data = self.data.clone();
        data[row * self.cols + col] = value;
        Self::new(self.rows, self.cols, data)
    }

    /// Nested-row copy of the entries.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

/// Matrix whose entries are all strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveMatrix {
    inner: Matrix,
}

impl PositiveMatrix {
    /// Validates strict positivity of every entry.
    pub fn new(inner: Matrix) -> Result<Self> {
        for i in 0..inner.rows() {
            for j in 0..inner.cols() {
                let v = inner.get(i, j);
                if v <= 0.0 {
                    return Err(Error::NonPositiveMatrixEntry {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
        }
        Ok(Self { inner })
    }

    /// Convenience constructor from nested rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix {
        self.inner
    }
}

impl std::ops::Deref for PositiveMatrix {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.inner
    }
}
