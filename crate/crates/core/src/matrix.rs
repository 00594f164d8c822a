//! Dense matrices over any [`Scalar`].

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    entries: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, entries: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, entries: vec![S::one(); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Matrix { rows, cols, entries }
    }

    pub fn from_vec(rows: usize, cols: usize, entries: Vec<S>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Matrix { rows, cols, entries })
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(diag: Vec<S>) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.into_iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Entries in row-major order.
    pub fn as_slice(&self) -> &[S] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<S> {
        self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.entries[r * self.cols + c]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_negligible)
    }

    pub fn map<T: Scalar>(&self, f: impl FnMut(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|e| e.mul_ref(s))
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            let out_row = &mut out.entries[r * rhs.cols..(r + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = &self.entries[r * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let rhs_row = &rhs.entries[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    o.mul_add_assign(a, b);
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, rhs: &Self, what: &str, f: impl Fn(&S, &S) -> S) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Dimension(format!(
                "cannot {what} {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| f(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "add", |a, b| a.clone() + b.clone())
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "subtract", |a, b| a.clone() - b.clone())
    }

    /// `self += s * rhs`.
    pub fn add_scaled(&mut self, s: &S, rhs: &Self) -> Result<()> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Dimension("add_scaled shape mismatch".into()));
        }
        for (a, b) in self.entries.iter_mut().zip(&rhs.entries) {
            a.mul_add_assign(s, b);
        }
        Ok(())
    }

    /// `self * rhs - rhs * self`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        self.try_mul(rhs)?.try_sub(&rhs.try_mul(self)?)
    }

    /// Kronecker product `self ⊗ rhs`, i.e. the block matrix `(a_ij · rhs)`.
    pub fn kronecker(&self, rhs: &Self) -> Self {
        Self::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |r, c| {
            self.get(r / rhs.rows, c / rhs.cols)
                .mul_ref(rhs.get(r % rhs.rows, c % rhs.cols))
        })
    }

    /// The sub-matrix on the given row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |r, c| self.get(rows[r], cols[c]).clone())
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[S]) -> Result<Vec<S>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|r| {
                let mut acc = S::zero();
                for (a, x) in self.entries[r * self.cols..(r + 1) * self.cols].iter().zip(v) {
                    acc.mul_add_assign(a, x);
                }
                acc
            })
            .collect())
    }

    /// True when every entry equals `S::one()` or `S::zero()`.
    pub fn is_zero_one(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero() || e.is_one())
    }

    /// Entry-wise comparison using [`Scalar::approx_eq`].
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a.approx_eq(b))
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (r, c): (usize, usize)) -> &S {
        &self.entries[r * self.cols + c]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        &mut self.entries[r * self.cols + c]
    }
}

impl<S: Scalar> std::ops::Mul for &Matrix<S> {
    type Output = Matrix<S>;
    /// Panics on a shape mismatch; see [`Matrix::try_mul`].
    fn mul(self, rhs: &Matrix<S>) -> Matrix<S> {
        self.try_mul(rhs).expect("matrix shape mismatch")
    }
}

impl<S: Scalar> std::ops::Add for &Matrix<S> {
    type Output = Matrix<S>;
    fn add(self, rhs: &Matrix<S>) -> Matrix<S> {
        self.try_add(rhs).expect("matrix shape mismatch")
    }
}

impl<S: Scalar> std::ops::Sub for &Matrix<S> {
    type Output = Matrix<S>;
    fn sub(self, rhs: &Matrix<S>) -> Matrix<S> {
        self.try_sub(rhs).expect("matrix shape mismatch")
    }
}

impl<S: Scalar + fmt::Display> fmt::Display for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{CycloNum, Rational};

    fn int(rows: usize, cols: usize, v: &[i64]) -> Matrix<Rational> {
        Matrix::from_vec(rows, cols, v.iter().map(|&x| Rational::from_i64(x)).collect()).unwrap()
    }

    #[test]
    fn multiply_and_identity() {
        let a = int(2, 3, &[1, 2, 3, 4, 5, 6]);
        let b = int(3, 2, &[1, 0, 0, 1, 1, 1]);
        assert_eq!(&a * &b, int(2, 2, &[4, 5, 10, 11]));
        assert_eq!(&Matrix::identity(2) * &a, a);
        assert!(b.try_mul(&b).is_err());
    }

    #[test]
    fn kronecker_layout() {
        let a = int(2, 2, &[0, 1, 1, 0]);
        let j = Matrix::<Rational>::ones(2, 2);
        let k = a.kronecker(&j);
        assert_eq!(k.rows(), 4);
        assert_eq!(k[(0, 2)], Rational::from_i64(1));
        assert_eq!(k[(0, 1)], Rational::from_i64(0));
    }

    #[test]
    fn commutator_of_non_commuting_pair() {
        let a = int(2, 2, &[0, 1, 0, 0]);
        let b = int(2, 2, &[0, 0, 1, 0]);
        assert_eq!(a.commutator(&b).unwrap(), int(2, 2, &[1, 0, 0, -1]));
    }

    #[test]
    fn cyclotomic_entries() {
        let z = CycloNum::zeta(4, 1).unwrap();
        let m = Matrix::diagonal(vec![z.clone(), z]);
        let sq = &m * &m;
        assert_eq!(sq, Matrix::identity(2).scale(&CycloNum::integer(-1)));
    }
}
