//! Dense complex matrices (row-major) and the few decompositions the numerics need.

// Supplies f64 math without std; unused when std's inherent methods are present.
#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut, Mul};

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn cis(phi: f64) -> C64 {
    C64::new(phi.cos(), phi.sin())
}

/// Dense complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: usize, cols: usize, data: &[C64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data: data.to_vec() }
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data: data.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    pub fn diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn add_assign_scaled(&mut self, other: &Matrix, s: C64) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (r, &b) in row.iter_mut().zip(orow) {
                    *r += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        Matrix::from_fn(r, c, |i, j| self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// `‖U U† − I‖_F`.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.matmul(&self.adjoint()).sub(&Matrix::identity(self.rows)).frobenius_norm()
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<C64>) -> Matrix {
        Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// `(self + self†) / 2`.
    pub fn hermitian_part(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and
    /// eigenvectors as the columns of the returned matrix.
    pub fn eigh(&self) -> (Vec<f64>, Matrix) {
        let e = self.hermitian_part().to_nalgebra().symmetric_eigen();
        let mut order: Vec<usize> = (0..self.rows).collect();
        order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
        let vals = order.iter().map(|&k| e.eigenvalues[k]).collect();
        let vecs = Matrix::from_fn(self.rows, self.rows, |i, j| e.eigenvectors[(i, order[j])]);
        (vals, vecs)
    }

    /// Complex eigenvalues of a normal matrix (unitary, Hermitian, …).
    ///
    /// The Hermitian and anti-Hermitian parts `A`, `B` of a normal matrix
    /// commute, so a generic real combination `A + cB` is Hermitian with the
    /// same eigenvectors. Several `c` are tried until every Rayleigh quotient
    /// is an eigenvalue to within the residual tolerance. Shifted QR is avoided
    /// because it can stall on unitary input.
    pub fn normal_eigenvalues(&self) -> Vec<C64> {
        let n = self.rows;
        let adj = self.adjoint();
        let a = Matrix::from_fn(n, n, |i, j| (self[(i, j)] + adj[(i, j)]) * 0.5);
        let b = Matrix::from_fn(n, n, |i, j| (self[(i, j)] - adj[(i, j)]) * C64::new(0.0, -0.5));
        let tol = 1e-9 * self.frobenius_norm().max(1.0);
        let mut best: Option<(f64, Vec<C64>)> = None;
        for c in [0.618_033_988_749_894_8, -1.324_717_957_244_746, 2.718_281_828_459_045, -0.414_213_562_373_095_1] {
            let h = Matrix::from_fn(n, n, |i, j| a[(i, j)] + b[(i, j)] * c);
            let (_, vecs) = h.eigh();
            let mut vals = Vec::with_capacity(n);
            let mut worst: f64 = 0.0;
            for k in 0..n {
                let wv: Vec<C64> = (0..n).map(|i| (0..n).map(|j| self[(i, j)] * vecs[(j, k)]).sum()).collect();
                let lambda: C64 = (0..n).map(|i| vecs[(i, k)].conj() * wv[i]).sum();
                let res = (0..n).map(|i| (wv[i] - lambda * vecs[(i, k)]).norm_sqr()).sum::<f64>().sqrt();
                worst = worst.max(res);
                vals.push(lambda);
            }
            if worst <= tol {
                return vals;
            }
            if best.as_ref().is_none_or(|(r, _)| worst < *r) {
                best = Some((worst, vals));
            }
        }
        best.map(|(_, v)| v).unwrap_or_default()
    }

    /// `f(H)` for Hermitian `H` through its eigen-decomposition.
    pub fn hermitian_fn(&self, f: impl Fn(f64) -> C64) -> Matrix {
        let (vals, vecs) = self.eigh();
        let n = self.rows;
        let mut out = Matrix::zeros(n, n);
        for (k, &v) in vals.iter().enumerate() {
            let fv = f(v);
            for i in 0..n {
                let a = vecs[(i, k)] * fv;
                for j in 0..n {
                    out[(i, j)] += a * vecs[(j, k)].conj();
                }
            }
        }
        out
    }

    /// `exp(-i t H)` for Hermitian `H`.
    pub fn expm_hermitian(&self, t: f64) -> Matrix {
        self.hermitian_fn(|v| cis(-t * v))
    }

    /// Sum of singular values.
    pub fn trace_norm(&self) -> f64 {
        self.to_nalgebra().singular_values().iter().sum()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        self.to_nalgebra().singular_values().iter().copied().fold(0.0, f64::max)
    }

    /// Partial trace over the second factor of a `da·db`-dimensional space.
    pub fn partial_trace_second(&self, da: usize, db: usize) -> Matrix {
        assert_eq!(self.rows, da * db);
        Matrix::from_fn(da, da, |i, j| (0..db).map(|k| self[(i * db + k, j * db + k)]).sum())
    }

    /// Partial trace over the first factor of a `da·db`-dimensional space.
    pub fn partial_trace_first(&self, da: usize, db: usize) -> Matrix {
        assert_eq!(self.rows, da * db);
        Matrix::from_fn(db, db, |i, j| (0..da).map(|k| self[(k * db + i, k * db + j)]).sum())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs)
    }
}

/// Single-qubit Pauli matrices.
pub fn pauli(p: u8) -> Matrix {
    match p {
        b'I' => Matrix::identity(2),
        b'X' => Matrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        b'Y' => Matrix::from_rows(2, 2, &[ZERO, -I, I, ZERO]),
        b'Z' => Matrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]),
        _ => panic!("unknown Pauli {}", p as char),
    }
}

/// Tensor product of Pauli factors given as a string such as `"ZX"`, first letter most significant.
pub fn pauli_string(s: &str) -> Matrix {
    s.bytes().fold(Matrix::identity(1), |acc, p| acc.kron(&pauli(p)))
}
