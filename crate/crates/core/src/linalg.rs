//! Dense complex matrices and LU factorization with partial pivoting.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::complex::c64;
use crate::error::{Error, Result};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<c64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![c64::default(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<c64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Contract(format!(
                "{} values for a {rows} x {cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[c64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[c64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [c64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[c64]) -> Vec<c64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v.norm_sqr()).sum())
    }

    /// Largest absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = c64;
    fn index(&self, (i, j): (usize, usize)) -> &c64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut c64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `PA = LU` of a square matrix.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    n: usize,
    lu: Vec<c64>,
    perm: Vec<usize>,
    norm1: f64,
}

impl LuFactorization {
    /// Factorizes `a`. Fails with a solver error when a pivot vanishes or
    /// the reciprocal condition estimate falls below machine precision.
    pub fn new(a: &Matrix) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::Contract(format!("LU of a {} x {} matrix", a.rows, a.cols)));
        }
        let n = a.rows;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == 0.0 {
                return Err(Error::Solver {
                    message: format!("zero pivot in column {k}"),
                    condition: f64::INFINITY,
                });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let inv = lu[k * n + k].inv();
            let (head, tail) = lu.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n..];
            for row in tail.chunks_exact_mut(n) {
                let l = row[k] * inv;
                row[k] = l;
                if l != c64::default() {
                    for j in k + 1..n {
                        row[j] -= l * pivot_row[j];
                    }
                }
            }
        }
        let f = Self { n, lu, perm, norm1: a.norm1() };
        let cond = f.condition_estimate();
        if !(cond * f64::EPSILON < 1.0) {
            return Err(Error::Solver { message: "matrix is numerically singular".into(), condition: cond });
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[c64]) -> Vec<c64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x: Vec<c64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: c64 = row.iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s: c64 = row.iter().zip(&x[i + 1..]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }

    /// Solves `A^H x = b`.
    pub fn solve_adjoint(&self, b: &[c64]) -> Vec<c64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        // U^H y = b
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for (k, yk) in y[..i].iter().enumerate() {
                s -= self.lu[k * n + i].conj() * yk;
            }
            y[i] = s / self.lu[i * n + i].conj();
        }
        // L^H w = y
        for i in (0..n).rev() {
            let mut s = y[i];
            for (k, yk) in y.iter().enumerate().skip(i + 1) {
                s -= self.lu[k * n + i].conj() * yk;
            }
            y[i] = s;
        }
        let mut x = vec![c64::default(); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }

    /// 1-norm condition number estimate `‖A‖₁ · est(‖A⁻¹‖₁)` (Hager's method).
    pub fn condition_estimate(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 1.0;
        }
        let mut x = vec![c64::new(1.0 / n as f64, 0.0); n];
        let mut estimate = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x);
            let norm: f64 = y.iter().map(|v| v.norm()).sum();
            if !norm.is_finite() {
                return f64::INFINITY;
            }
            if norm <= estimate {
                break;
            }
            estimate = norm;
            let sign: Vec<c64> = y
                .iter()
                .map(|v| if v.norm() > 0.0 { v / v.norm() } else { c64::new(1.0, 0.0) })
                .collect();
            let z = self.solve_adjoint(&sign);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(j, v)| (j, v.norm()))
                .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            let zx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= zx {
                break;
            }
            x = vec![c64::default(); n];
            x[j] = c64::new(1.0, 0.0);
        }
        estimate * self.norm1
    }
}

/// `‖A x - b‖₂ / (‖A‖_F ‖x‖₂ + ‖b‖₂)`.
pub fn relative_residual(a: &Matrix, x: &[c64], b: &[c64]) -> f64 {
    let ax = a.matvec(x);
    let r: f64 = ax.iter().zip(b).map(|(p, q)| (p - q).norm_sqr()).sum();
    let xn: f64 = x.iter().map(|v| v.norm_sqr()).sum();
    let bn: f64 = b.iter().map(|v| v.norm_sqr()).sum();
    let denom = a.norm_fro() * libm::sqrt(xn) + libm::sqrt(bn);
    if denom == 0.0 {
        0.0
    } else {
        libm::sqrt(r) / denom
    }
}
