//! Small dense matrices: a general square [`Matrix`] and a [`SymmetricMatrix`]
//! whose storage is symmetric by construction, plus the cyclic Jacobi
//! eigensolver and a Cholesky factorisation.

use std::ops::{Add, Index, Mul, Sub};

use serde::{Serialize, Serializer};

use crate::error::{arg, Error, Result};
use crate::scalar::Real;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return arg("matrix rows must all have length equal to the row count");
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        Self::from_fn(n, |i, j| {
            (0..n).fold(T::zero(), |acc, l| acc + self.get(i, l) * other.get(l, j))
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| (0..self.n).fold(T::zero(), |acc, j| acc + self.get(i, j) * v[j]))
            .collect()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    /// Symmetric part `(M + Mᵀ)/2`.
    pub fn symmetric_part(&self) -> SymmetricMatrix<T> {
        let half = T::lit(0.5);
        SymmetricMatrix::from_fn(self.n, |i, j| half * (self.get(i, j) + self.get(j, i)))
    }
}

impl<T: Real> Matrix<T> {
    /// Inverse of a lower-triangular matrix by forward substitution.
    pub fn lower_inverse(&self) -> Result<Matrix<T>> {
        let n = self.dim();
        let mut inv = Matrix::zeros(n);
        for col in 0..n {
            for i in col..n {
                let mut s = if i == col { T::one() } else { T::zero() };
                for k in col..i {
                    s = s - self.get(i, k) * inv.get(k, col);
                }
                let d = self.get(i, i);
                if d == T::zero() {
                    return Err(Error::Numeric("singular triangular factor".into()));
                }
                inv.set(i, col, s / d);
            }
        }
        Ok(inv)
    }
}

impl<T: Real> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

/// Real symmetric matrix. Only the upper triangle is ever computed; the lower
/// triangle is a mirror, so `get(i, j) == get(j, i)` holds bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix<T> {
    inner: Matrix<T>,
}

impl<T: Real> SymmetricMatrix<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut inner = Matrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                inner.set(i, j, v);
                inner.set(j, i, v);
            }
        }
        SymmetricMatrix { inner }
    }

    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix {
            inner: Matrix::zeros(n),
        }
    }

    pub fn identity(n: usize) -> Self {
        SymmetricMatrix {
            inner: Matrix::identity(n),
        }
    }

    pub fn diagonal(d: &[T]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { T::zero() })
    }

    /// Rows must be exactly symmetric and finite.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let m = Matrix::from_rows(rows)?;
        let n = m.dim();
        for i in 0..n {
            for j in 0..n {
                if !m.get(i, j).is_finite() {
                    return arg(format!("non-finite entry at ({i}, {j})"));
                }
                if m.get(i, j) != m.get(j, i) {
                    return arg(format!("entries ({i}, {j}) and ({j}, {i}) differ"));
                }
            }
        }
        Ok(SymmetricMatrix { inner: m })
    }

    /// Outer product `a ⊗ b + b ⊗ a` halved, i.e. the symmetrised tensor product.
    pub fn sym_outer(a: &[T], b: &[T]) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(a.len(), |i, j| half * (a[i] * b[j] + a[j] * b[i]))
    }

    pub fn outer(a: &[T]) -> Self {
        Self::from_fn(a.len(), |i, j| a[i] * a[j])
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.inner.get(i, j)
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.inner
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.inner.rows()
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).fold(T::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(self.dim(), |i, j| s * self.get(i, j))
    }

    pub fn max_abs(&self) -> T {
        self.inner.max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.inner.data.iter().all(|x| x.is_finite())
    }

    /// Product of two matrices known to commute (e.g. polynomials in the same
    /// matrix). The result is symmetrised to remove rounding asymmetry.
    pub fn commuting_product(&self, other: &SymmetricMatrix<T>) -> Self {
        self.inner.matmul(&other.inner).symmetric_part()
    }

    pub fn matmul(&self, other: &SymmetricMatrix<T>) -> Matrix<T> {
        self.inner.matmul(&other.inner)
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        self.inner.mul_vec(v)
    }

    /// Congruence `Pᵀ S P`.
    pub fn congruence(&self, p: &Matrix<T>) -> Self {
        p.transpose().matmul(&self.inner).matmul(p).symmetric_part()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        Ok(self.eigen()?.values)
    }

    /// Full eigen-decomposition by cyclic Jacobi rotations.
    pub fn eigen(&self) -> Result<SymmetricEigen<T>> {
        if !self.is_finite() {
            return Err(Error::Numeric(
                "eigen-decomposition of a matrix with non-finite entries".into(),
            ));
        }
        jacobi(self)
    }

    /// Lower-triangular Cholesky factor `L` with `S = L Lᵀ`.
    pub fn cholesky(&self) -> Result<Matrix<T>> {
        let n = self.dim();
        let mut l = Matrix::zeros(n);
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d = d - l.get(j, k) * l.get(j, k);
            }
            if !(d > T::zero()) {
                return arg("matrix is not positive definite");
            }
            let djj = d.sqrt();
            l.set(j, j, djj);
            for i in j + 1..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s = s - l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, s / djj);
            }
        }
        Ok(l)
    }
}

impl<T: Real> Add for &SymmetricMatrix<T> {
    type Output = SymmetricMatrix<T>;
    fn add(self, rhs: Self) -> SymmetricMatrix<T> {
        SymmetricMatrix::from_fn(self.dim(), |i, j| self.get(i, j) + rhs.get(i, j))
    }
}

impl<T: Real> Sub for &SymmetricMatrix<T> {
    type Output = SymmetricMatrix<T>;
    fn sub(self, rhs: Self) -> SymmetricMatrix<T> {
        SymmetricMatrix::from_fn(self.dim(), |i, j| self.get(i, j) - rhs.get(i, j))
    }
}

impl<T: Real> Mul<T> for &SymmetricMatrix<T> {
    type Output = SymmetricMatrix<T>;
    fn mul(self, s: T) -> SymmetricMatrix<T> {
        self.scale(s)
    }
}

impl<T: Real> Serialize for SymmetricMatrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = self
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(Real::as_f64).collect())
            .collect();
        rows.serialize(s)
    }
}

/// Eigenvalues (ascending) with the matching orthonormal eigenvectors stored
/// as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

fn jacobi<T: Real>(s: &SymmetricMatrix<T>) -> Result<SymmetricEigen<T>> {
    let n = s.dim();
    let mut a = s.inner.clone();
    let mut v = Matrix::identity(n);
    let scale = a.max_abs();
    if scale == T::zero() || n == 1 {
        return Ok(sorted(a, v));
    }
    let tol = T::unit_roundoff() * scale;
    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a.get(p, q).abs());
            }
        }
        if off <= tol * T::lit(1e-3) {
            return Ok(sorted(a, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq.abs() <= tol * T::lit(1e-3) {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - sn * akq);
                    a.set(k, q, sn * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - sn * aqk);
                    a.set(q, k, sn * apk + c * aqk);
                }
                a.set(p, q, T::zero());
                a.set(q, p, T::zero());
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - sn * vkq);
                    v.set(k, q, sn * vkp + c * vkq);
                }
            }
        }
    }
    Err(Error::Numeric("Jacobi sweeps did not converge".into()))
}

fn sorted<T: Real>(a: Matrix<T>, v: Matrix<T>) -> SymmetricEigen<T> {
    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).partial_cmp(&a.get(j, j)).unwrap());
    let values = order.iter().map(|&i| a.get(i, i)).collect();
    let vectors = Matrix::from_fn(n, |r, c| v.get(r, order[c]));
    SymmetricEigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_diagonal_is_sorted() {
        let s = SymmetricMatrix::diagonal(&[3.0, -1.0, 2.0]);
        assert_eq!(s.eigenvalues().unwrap(), vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn eigen_reconstructs() {
        let s = SymmetricMatrix::from_fn(4, |i, j| 1.0 / (1.0 + i as f64 + j as f64) + (i == j) as u8 as f64);
        let e = s.eigen().unwrap();
        let d = SymmetricMatrix::diagonal(&e.values);
        let back = d.congruence(&e.vectors.transpose());
        assert!((&back - &s).max_abs() < 1e-13);
        for w in e.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        let s = SymmetricMatrix::<f64>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let e = s.eigenvalues().unwrap();
        assert!((e[0] - 1.0).abs() < 1e-15 && (e[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_asymmetric_rows() {
        assert!(SymmetricMatrix::from_rows(&[vec![1.0, 2.0], vec![2.5, 1.0]]).is_err());
        assert!(SymmetricMatrix::from_rows(&[vec![1.0, f64::NAN], vec![f64::NAN, 1.0]]).is_err());
    }

    #[test]
    fn cholesky_factor() {
        let s = SymmetricMatrix::<f64>::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let l = s.cholesky().unwrap();
        let back = l.matmul(&l.transpose());
        assert!((back.get(0, 1) - 2.0).abs() < 1e-15 && (back.get(1, 1) - 3.0).abs() < 1e-15);
        let bad = SymmetricMatrix::diagonal(&[1.0, -1.0]);
        assert!(bad.cholesky().is_err());
    }

    #[test]
    fn non_finite_eigen_is_numeric_error() {
        let s = SymmetricMatrix::diagonal(&[1.0, f64::INFINITY]);
        assert!(matches!(s.eigen(), Err(Error::Numeric(_))));
    }
}
