//! Exact linear spans of matrices and the algebra-closure fixpoint.
//!
//! Matrices are flattened row-major into vectors of length `rows * cols`. The
//! basis is kept in fully reduced echelon form with the first nonzero entry of
//! each vector as its pivot, so membership is a single reduction pass.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Products evaluated per parallel batch inside [`algebra_closure`].
const PRODUCT_BATCH: usize = 256;

/// A subspace of `S^ambient` in reduced echelon form.
#[derive(Clone, Debug)]
pub struct SpanBasis<S> {
    shape: (usize, usize),
    rows: Vec<Vec<S>>,
    pivots: Vec<usize>,
}

impl<S: Scalar> SpanBasis<S> {
    /// Empty span of plain vectors of the given length.
    pub fn new(ambient: usize) -> Self {
        SpanBasis { shape: (1, ambient), rows: Vec::new(), pivots: Vec::new() }
    }

    /// Empty span inside `rows x cols` matrices.
    pub fn for_matrices(rows: usize, cols: usize) -> Self {
        SpanBasis { shape: (rows, cols), rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_matrices<'a>(rows: usize, cols: usize, ms: impl IntoIterator<Item = &'a Matrix<S>>) -> Result<Self>
    where
        S: 'a,
    {
        let mut span = Self::for_matrices(rows, cols);
        for m in ms {
            span.insert_matrix(m)?;
        }
        Ok(span)
    }

    pub fn ambient(&self) -> usize {
        self.shape.0 * self.shape.1
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_vectors(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn basis_matrices(&self) -> Vec<Matrix<S>> {
        self.rows
            .iter()
            .map(|r| Matrix::from_vec(self.shape.0, self.shape.1, r.clone()).expect("shape recorded at construction"))
            .collect()
    }

    /// What remains of `v` after eliminating every pivot of the basis.
    pub fn residual(&self, v: &[S]) -> Result<Vec<S>> {
        if v.len() != self.ambient() {
            return Err(Error::Dimension(format!("vector of length {} in ambient {}", v.len(), self.ambient())));
        }
        let mut out = v.to_vec();
        self.reduce_in_place(&mut out);
        Ok(out)
    }

    fn reduce_in_place(&self, v: &mut [S]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_negligible() {
                continue;
            }
            let c = v[p].clone();
            for (x, r) in v.iter_mut().zip(row).skip(p) {
                x.mul_sub_assign(&c, r);
            }
            v[p] = S::zero();
        }
    }

    pub fn contains(&self, v: &[S]) -> Result<bool> {
        Ok(self.residual(v)?.iter().all(Scalar::is_negligible))
    }

    pub fn contains_matrix(&self, m: &Matrix<S>) -> Result<bool> {
        self.check_shape(m)?;
        self.contains(m.as_slice())
    }

    fn check_shape(&self, m: &Matrix<S>) -> Result<()> {
        if (m.rows(), m.cols()) != self.shape {
            return Err(Error::Dimension(format!(
                "{}x{} matrix in a span of {}x{} matrices",
                m.rows(),
                m.cols(),
                self.shape.0,
                self.shape.1
            )));
        }
        Ok(())
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[S]) -> Result<bool> {
        let mut r = self.residual(v)?;
        let Some(p) = r.iter().position(|x| !x.is_negligible()) else {
            return Ok(false);
        };
        let inv = r[p].try_inv().ok_or(Error::DivisionByZero)?;
        for x in r.iter_mut().skip(p) {
            *x = x.mul_ref(&inv);
        }
        for x in r.iter_mut().take(p) {
            *x = S::zero();
        }
        for row in &mut self.rows {
            if row[p].is_negligible() {
                continue;
            }
            let c = row[p].clone();
            for (x, y) in row.iter_mut().zip(&r).skip(p) {
                x.mul_sub_assign(&c, y);
            }
            row[p] = S::zero();
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, r);
        Ok(true)
    }

    pub fn insert_matrix(&mut self, m: &Matrix<S>) -> Result<bool> {
        self.check_shape(m)?;
        self.insert(m.as_slice())
    }

    /// Whether every product of two basis elements stays in the span.
    pub fn is_closed_under_product(&self) -> Result<bool> {
        let basis = self.basis_matrices();
        for a in &basis {
            for b in &basis {
                if !self.contains_matrix(&a.try_mul(b)?)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// The smallest subspace containing `generators` and closed under matrix
/// product.
///
/// The span is seeded with the generators; every round multiplies all pairs
/// of accepted elements (skipping pairs already multiplied in an earlier
/// round) and adjoins the products that enlarge the span, until a round adds
/// nothing. Products are evaluated in parallel and inserted in a fixed order,
/// so the resulting basis does not depend on the thread count.
pub fn algebra_closure<S: Scalar>(generators: &[Matrix<S>]) -> Result<SpanBasis<S>> {
    let Some(first) = generators.first() else {
        return Err(Error::Domain("closure of an empty generating set".into()));
    };
    let n = first.rows();
    if generators.iter().any(|g| g.rows() != n || g.cols() != n) {
        return Err(Error::Dimension("closure generators must be square of equal size".into()));
    }
    let mut span = SpanBasis::for_matrices(n, n);
    let mut members: Vec<Matrix<S>> = Vec::new();
    for g in generators {
        if span.insert_matrix(g)? {
            members.push(g.clone());
        }
    }
    let mut settled = 0;
    while settled < members.len() {
        let total = members.len();
        let pairs: Vec<(usize, usize)> = (0..total)
            .flat_map(|a| (0..total).map(move |b| (a, b)))
            .filter(|&(a, b)| a >= settled || b >= settled)
            .collect();
        for batch in pairs.chunks(PRODUCT_BATCH) {
            let products: Vec<Matrix<S>> = batch
                .par_iter()
                .map(|&(a, b)| {
                    let mut flat = members[a].try_mul(&members[b]).expect("square generators").into_vec();
                    // pre-reduce against the span as it stood before this batch
                    span.reduce_in_place(&mut flat);
                    Matrix::from_vec(n, n, flat).expect("shape preserved")
                })
                .collect();
            for p in products {
                if p.is_zero() {
                    continue;
                }
                if span.insert_matrix(&p)? {
                    members.push(p);
                }
            }
        }
        settled = total;
    }
    Ok(span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn r(x: i64) -> Rational {
        Rational::from_i64(x)
    }

    #[test]
    fn rank_and_membership() {
        let mut s = SpanBasis::<Rational>::new(3);
        assert!(s.insert(&[r(1), r(2), r(3)]).unwrap());
        assert!(s.insert(&[r(0), r(1), r(1)]).unwrap());
        assert!(!s.insert(&[r(2), r(5), r(7)]).unwrap());
        assert_eq!(s.dimension(), 2);
        assert!(s.contains(&[r(1), r(3), r(4)]).unwrap());
        assert!(!s.contains(&[r(0), r(0), r(1)]).unwrap());
        assert_eq!(s.pivots(), &[0, 1]);
        // fully reduced: pivot columns are unit vectors
        assert_eq!(s.basis_vectors()[0][1], r(0));
        assert!(s.insert(&[r(1)]).is_err());
    }

    #[test]
    fn closure_of_identity_is_one_dimensional() {
        let span = algebra_closure(&[Matrix::<Rational>::identity(4)]).unwrap();
        assert_eq!(span.dimension(), 1);
    }

    #[test]
    fn closure_of_orthogonal_idempotents() {
        let gens: Vec<Matrix<Rational>> = (0..3)
            .map(|i| Matrix::diagonal((0..3).map(|j| if i == j { r(1) } else { r(0) }).collect()))
            .collect();
        assert_eq!(algebra_closure(&gens).unwrap().dimension(), 3);
    }

    #[test]
    fn closure_of_shift_and_diagonal_is_full_matrix_algebra() {
        let shift = Matrix::from_fn(3, 3, |i, j| if (i + 1) % 3 == j { r(1) } else { r(0) });
        let e0 = Matrix::diagonal(vec![r(1), r(0), r(0)]);
        let span = algebra_closure(&[shift, e0]).unwrap();
        assert_eq!(span.dimension(), 9);
        assert!(span.is_closed_under_product().unwrap());
    }

    #[test]
    fn closure_rejects_mixed_sizes() {
        let a = Matrix::<Rational>::identity(2);
        let b = Matrix::<Rational>::identity(3);
        assert!(algebra_closure(&[a, b]).is_err());
        assert!(algebra_closure::<Rational>(&[]).is_err());
    }
}
