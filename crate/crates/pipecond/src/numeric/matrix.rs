//! Dense row-major matrix and the Householder least-squares solver.
//!
//! The matrix type is deliberately small: it carries design matrices and
//! network weights, nothing more. The solver factors X = QR with Householder
//! reflections and recovers both the coefficient vector and the diagonal of
//! (XᵀX)⁻¹ from the R factor, which is what standard-error computation needs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative pivot threshold below which a design is treated as rank deficient.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Build a matrix from row-major data. Rejects wrong lengths and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite matrix entry {v}")));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch(
                "rows have unequal lengths".into(),
            ));
        }
        Matrix::new(r, c, rows.concat())
    }

    /// Internal constructor that skips the finiteness check; used where
    /// transient non-finite values must be observable (diverging training).
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product X·v.
    pub fn mat_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns, vector has {} entries",
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresSolution {
    /// Coefficients minimizing ‖Xβ − y‖².
    pub beta: Vec<f64>,
    /// Diagonal of (XᵀX)⁻¹, the unscaled variance factors.
    pub xtx_inverse_diag: Vec<f64>,
    /// ‖Xβ̂ − y‖².
    pub residual_ss: f64,
}

/// Solve min ‖Xβ − y‖² by Householder QR.
///
/// Rank is checked against the largest |R| diagonal entry with a relative
/// tolerance of [`RANK_TOL`]; the (XᵀX)⁻¹ diagonal comes from (XᵀX)⁻¹ =
/// R⁻¹R⁻ᵀ, i.e. the squared row norms of R⁻¹.
pub fn solve_least_squares(x: &Matrix, y: &[f64]) -> Result<LeastSquaresSolution> {
    let n = x.rows();
    let p = x.cols();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "X has {n} rows, y has {} entries",
            y.len()
        )));
    }
    if n < p {
        return Err(Error::DimensionMismatch(format!(
            "underdetermined system: {n} rows < {p} columns"
        )));
    }
    if p == 0 {
        return Err(Error::DimensionMismatch("X has no columns".into()));
    }

    let mut a = x.data().to_vec();
    let mut rhs = y.to_vec();

    // Householder triangularization of the augmented system [A | rhs].
    for k in 0..p {
        let mut norm = 0.0;
        for i in k..n {
            let v = a[i * p + k];
            norm += v * v;
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            // R[k,k] = 0; caught by the rank check below.
            continue;
        }
        let akk = a[k * p + k];
        let alpha = if akk >= 0.0 { -norm } else { norm };
        let mut v = vec![0.0; n - k];
        v[0] = akk - alpha;
        for i in k + 1..n {
            v[i - k] = a[i * p + k];
        }
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv > 0.0 {
            for j in k..p {
                let mut dot = 0.0;
                for i in k..n {
                    dot += v[i - k] * a[i * p + j];
                }
                let tau = 2.0 * dot / vtv;
                for i in k..n {
                    a[i * p + j] -= tau * v[i - k];
                }
            }
            let mut dot = 0.0;
            for i in k..n {
                dot += v[i - k] * rhs[i];
            }
            let tau = 2.0 * dot / vtv;
            for i in k..n {
                rhs[i] -= tau * v[i - k];
            }
        }
        a[k * p + k] = alpha;
        for i in k + 1..n {
            a[i * p + k] = 0.0;
        }
    }

    let max_pivot = (0..p).map(|j| a[j * p + j].abs()).fold(0.0, f64::max);
    for j in 0..p {
        let pivot = a[j * p + j].abs();
        if pivot <= RANK_TOL * max_pivot || max_pivot == 0.0 {
            return Err(Error::RankDeficient { column: j, pivot });
        }
    }

    // Back substitution: R beta = rhs[0..p].
    let mut beta = vec![0.0; p];
    for j in (0..p).rev() {
        let mut s = rhs[j];
        for k in j + 1..p {
            s -= a[j * p + k] * beta[k];
        }
        beta[j] = s / a[j * p + j];
    }

    let residual_ss: f64 = rhs[p..n].iter().map(|v| v * v).sum();

    // R⁻¹ column by column; accumulate squared row norms.
    let mut diag = vec![0.0; p];
    let mut col = vec![0.0; p];
    for c in 0..p {
        for (j, slot) in col.iter_mut().enumerate() {
            *slot = if j == c { 1.0 } else { 0.0 };
        }
        for j in (0..=c).rev() {
            let mut s = col[j];
            for k in j + 1..=c {
                s -= a[j * p + k] * col[k];
            }
            col[j] = s / a[j * p + j];
            diag[j] += col[j] * col[j];
        }
    }

    Ok(LeastSquaresSolution {
        beta,
        xtx_inverse_diag: diag,
        residual_ss,
    })
}
