//! Dense row-major matrices and small vector helpers.
//!
//! Type spaces here are desk-scale (a countable model is always handled
//! through a finite truncation), so a plain `Vec<f64>` backing is the
//! simplest correct representation.

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a matrix from row slices; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// `M xᵗ` for a column vector `x`.
    pub fn mat_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "mat_vec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Matrix) {
        assert_eq!(self.data.len(), other.data.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.data.len(), other.data.len());
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.sub(other).sup_norm()
    }
}

/// `x M` for a row vector `x`.
pub fn vec_mat(x: &[f64], m: &Matrix) -> Vec<f64> {
    assert_eq!(x.len(), m.rows(), "vec_mat dimension mismatch");
    let mut out = vec![0.0; m.cols()];
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0.0 {
            continue;
        }
        for (o, &mij) in out.iter_mut().zip(m.row(i)) {
            *o += xi * mij;
        }
    }
    out
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Outer product `colᵗ · row`.
pub fn outer(col: &[f64], row: &[f64]) -> Matrix {
    let mut m = Matrix::zeros(col.len(), row.len());
    for (i, &c) in col.iter().enumerate() {
        for (j, &r) in row.iter().enumerate() {
            m.set(i, j, c * r);
        }
    }
    m
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Solves `A xᵗ = bᵗ` by LU with partial pivoting.
pub fn solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(a.rows(), a.cols(), "solve wants a square matrix");
    assert_eq!(a.rows(), b.len());
    let n = a.rows();
    let mut lu = a.clone();
    let mut x = b.to_vec();
    for col in 0..n {
        let (pivot_row, pivot) = (col..n)
            .map(|r| (r, lu.get(r, col).abs()))
            .max_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        if pivot < 1e-300 {
            return Err(Error::InvalidArgument(
                "singular matrix in linear solve".into(),
            ));
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = lu.get(col, j);
                lu.set(col, j, lu.get(pivot_row, j));
                lu.set(pivot_row, j, tmp);
            }
            x.swap(col, pivot_row);
        }
        for r in col + 1..n {
            let f = lu.get(r, col) / lu.get(col, col);
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                let v = lu.get(r, j) - f * lu.get(col, j);
                lu.set(r, j, v);
            }
            x[r] -= f * x[col];
        }
    }
    for row in (0..n).rev() {
        let mut v = x[row];
        for (j, &xj) in x.iter().enumerate().skip(row + 1) {
            v -= lu.get(row, j) * xj;
        }
        x[row] = v / lu.get(row, row);
    }
    Ok(x)
}

/// Solves `y A = b` for a row vector `y` (i.e. `Aᵗ yᵗ = bᵗ`).
pub fn solve_left(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.rows();
    let mut at = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            at.set(j, i, a.get(i, j));
        }
    }
    solve(&at, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_identities() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let i = Matrix::identity(2);
        assert_eq!(a.mul(&i), a);
        assert_eq!(a.mat_vec(&[1.0, 1.0]), vec![3.0, 7.0]);
        assert_eq!(vec_mat(&[1.0, 1.0], &a), vec![4.0, 6.0]);
    }

    #[test]
    fn solve_recovers_rhs() {
        let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let x = solve(&a, &[5.0, 10.0]).unwrap();
        assert!((2.0 * x[0] + x[1] - 5.0).abs() < 1e-12);
        assert!((x[0] + 3.0 * x[1] - 10.0).abs() < 1e-12);

        let y = solve_left(&a, &[5.0, 10.0]).unwrap();
        assert!((2.0 * y[0] + y[1] - 5.0).abs() < 1e-12);
        assert!((y[0] + 3.0 * y[1] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(solve(&a, &[1.0, 1.0]).is_err());
    }
}
