//! Minimal dense matrix support for the quadratic-form and least-squares potentials.

use crate::error::{FlowError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>, // row-major
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(FlowError::InvalidArgument(
                "matrix dimensions must be positive".into(),
            ));
        }
        if data.len() != rows * cols {
            return Err(FlowError::InvalidArgument(format!(
                "matrix data length {} does not match {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    /// Parses the dense text format: first line "rows cols", then row-major
    /// whitespace-separated values.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let rows: usize = tokens
            .next()
            .ok_or_else(|| FlowError::InvalidArgument("matrix file: missing row count".into()))?
            .parse()
            .map_err(|e| FlowError::InvalidArgument(format!("matrix file: bad row count: {e}")))?;
        let cols: usize = tokens
            .next()
            .ok_or_else(|| FlowError::InvalidArgument("matrix file: missing col count".into()))?
            .parse()
            .map_err(|e| FlowError::InvalidArgument(format!("matrix file: bad col count: {e}")))?;
        let data: Vec<f64> = tokens
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| FlowError::InvalidArgument(format!("matrix file: bad value '{t}': {e}")))
            })
            .collect::<Result<_>>()?;
        Self::new(rows, cols, data)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(x).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    pub fn matvec_transpose(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (o, &a) in out.iter_mut().zip(row) {
                *o += a * yi;
            }
        }
        out
    }

    /// Solves A x = b by Gaussian elimination with partial pivoting.
    /// Returns None when the matrix is numerically singular.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        if self.rows != self.cols || b.len() != self.rows {
            return None;
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut rhs = b.to_vec();
        for k in 0..n {
            let mut pivot = k;
            for i in (k + 1)..n {
                if a[i * n + k].abs() > a[pivot * n + k].abs() {
                    pivot = i;
                }
            }
            if a[pivot * n + k].abs() < 1e-13 * (1.0 + self.frobenius_norm()) {
                return None;
            }
            if pivot != k {
                for j in 0..n {
                    a.swap(k * n + j, pivot * n + j);
                }
                rhs.swap(k, pivot);
            }
            for i in (k + 1)..n {
                let f = a[i * n + k] / a[k * n + k];
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
                rhs[i] -= f * rhs[k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = rhs[i];
            for j in (i + 1)..n {
                s -= a[i * n + j] * x[j];
            }
            x[i] = s / a[i * n + i];
        }
        Some(x)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest eigenvalue of AᵀA by deterministic power iteration; the square
    /// of the spectral norm of A.
    pub fn gram_spectral_radius(&self) -> f64 {
        let n = self.cols;
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) / (n as f64 + 1.0)).collect();
        let mut lambda = 0.0;
        for _ in 0..200 {
            let av = self.matvec(&v);
            let w = self.matvec_transpose(&av);
            let nw = crate::vec_ops::norm(&w);
            if nw == 0.0 {
                return 0.0;
            }
            let next = crate::vec_ops::dot(&w, &v) / crate::vec_ops::dot(&v, &v);
            v = crate::vec_ops::scale(&w, 1.0 / nw);
            if (next - lambda).abs() <= 1e-14 * (1.0 + next.abs()) {
                return next;
            }
            lambda = next;
        }
        lambda
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_text_format() {
        let m = DenseMatrix::from_text("2 3\n1 2 3\n4 5 6\n").unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.cols(), 3);
        assert_eq!(m.matvec(&[1.0, 0.0, 0.0]), vec![1.0, 4.0]);
        assert_eq!(m.matvec_transpose(&[1.0, 1.0]), vec![5.0, 7.0, 9.0]);
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(DenseMatrix::from_text("2 2\n1 2 3\n").is_err());
    }

    #[test]
    fn solves_linear_system() {
        let m = DenseMatrix::new(2, 2, vec![2.0, 1.0, 1.0, 3.0]).unwrap();
        let x = m.solve(&[5.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn singular_solve_is_none() {
        let m = DenseMatrix::new(2, 2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(m.solve(&[1.0, 2.0]).is_none());
    }

    #[test]
    fn gram_spectral_radius_of_diagonal() {
        let m = DenseMatrix::new(2, 2, vec![3.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((m.gram_spectral_radius() - 9.0).abs() < 1e-9);
    }
}
