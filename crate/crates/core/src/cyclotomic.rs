//! Exact arithmetic in the cyclotomic fields ℚ(ζ_N).
//!
//! An element is stored as its coordinate vector in the power basis
//! `1, ζ_N, …, ζ_N^{φ(N)-1}`, reduced modulo the N-th cyclotomic polynomial
//! Φ_N. The reduction is canonical, so equality at a fixed conductor is
//! coefficient equality. Operands with different conductors are promoted to
//! ℚ(ζ_lcm) before the operation.

use std::borrow::Cow;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Reduction data for one conductor.
#[derive(Debug)]
struct CycloField {
    degree: usize,
    /// `powers[e]` holds `x^e mod Φ_N` for `e < powers.len()`.
    powers: Vec<Vec<i64>>,
}

fn field_cache() -> &'static RwLock<HashMap<u64, Arc<CycloField>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<CycloField>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn field(n: u64) -> Arc<CycloField> {
    if let Some(f) = field_cache().read().expect("cyclotomic cache poisoned").get(&n) {
        return Arc::clone(f);
    }
    let built = Arc::new(build_field(n));
    let mut cache = field_cache().write().expect("cyclotomic cache poisoned");
    Arc::clone(cache.entry(n).or_insert(built))
}

/// Coefficients of Φ_n, lowest degree first, computed as
/// `(x^n - 1) / ∏_{d | n, d < n} Φ_d`.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    assert!(n >= 1, "cyclotomic polynomial of order 0");
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = div_monic(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

/// Exact quotient of `num` by the monic `den`; the remainder must vanish.
fn div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    debug_assert_eq!(den[dn], 1);
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![0i64; qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dn];
        quot[k] = c;
        if c != 0 {
            for (t, &dc) in den.iter().enumerate() {
                rem[k + t] = rem[k + t]
                    .checked_sub(c.checked_mul(dc).expect("cyclotomic coefficient overflow"))
                    .expect("cyclotomic coefficient overflow");
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0), "inexact cyclotomic division");
    quot
}

fn build_field(n: u64) -> CycloField {
    let phi = cyclotomic_polynomial(n);
    let degree = phi.len() - 1;
    let table_len = (n as usize).max(2 * degree - 1).max(1);
    let mut powers = Vec::with_capacity(table_len);
    let mut cur = vec![0i64; degree];
    cur[0] = 1;
    for _ in 0..table_len {
        powers.push(cur.clone());
        // multiply by x, then replace x^degree with -(Φ - x^degree)
        let top = cur[degree - 1];
        let mut next = vec![0i64; degree];
        next[1..degree].copy_from_slice(&cur[..(degree - 1)]);
        if top != 0 {
            for (k, slot) in next.iter_mut().enumerate() {
                *slot = slot
                    .checked_sub(top.checked_mul(phi[k]).expect("overflow"))
                    .expect("overflow");
            }
        }
        cur = next;
    }
    CycloField { degree, powers }
}

/// Euler's totient, the degree of ℚ(ζ_n) over ℚ.
pub fn totient(n: u64) -> usize {
    field(n).degree
}

/// An exact element of ℚ(ζ_N).
#[derive(Clone, Debug)]
pub struct CycloNum {
    conductor: u64,
    coeffs: Vec<BigRational>,
}

impl CycloNum {
    pub fn rational(q: BigRational) -> Self {
        CycloNum { conductor: 1, coeffs: vec![q] }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// ζ_n^k, with `k` read modulo `n`.
    pub fn zeta(n: u64, k: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("conductor must be positive".into()));
        }
        let f = field(n);
        let e = k.rem_euclid(n as i64) as usize;
        let coeffs = f.powers[e]
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c)))
            .collect();
        Ok(CycloNum { conductor: n, coeffs })
    }

    /// Builds an element from power-basis coordinates; extra coordinates are
    /// reduced modulo Φ_n.
    pub fn from_coeffs(n: u64, coeffs: Vec<BigRational>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("conductor must be positive".into()));
        }
        let f = field(n);
        if coeffs.len() <= f.degree {
            let mut c = coeffs;
            c.resize(f.degree, BigRational::zero());
            return Ok(CycloNum { conductor: n, coeffs: c });
        }
        let mut out = vec![BigRational::zero(); f.degree];
        for (e, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &f.powers[e % n as usize];
            for (slot, &r) in out.iter_mut().zip(row) {
                if r != 0 {
                    *slot += c * BigInt::from(r);
                }
            }
        }
        Ok(CycloNum { conductor: n, coeffs: out })
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// The rational value if the element lies in ℚ.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Re-expresses the element in ℚ(ζ_m); `m` must be a multiple of the
    /// current conductor.
    pub fn promote(&self, m: u64) -> Result<Self> {
        if m == 0 || !m.is_multiple_of(self.conductor) {
            return Err(Error::Domain(format!(
                "cannot embed conductor {} into conductor {m}",
                self.conductor
            )));
        }
        if m == self.conductor {
            return Ok(self.clone());
        }
        let step = (m / self.conductor) as usize;
        let f = field(m);
        let mut out = vec![BigRational::zero(); f.degree];
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &f.powers[(k * step) % m as usize];
            for (slot, &r) in out.iter_mut().zip(row) {
                if r != 0 {
                    *slot += c * BigInt::from(r);
                }
            }
        }
        Ok(CycloNum { conductor: m, coeffs: out })
    }

    fn aligned<'a>(a: &'a Self, b: &'a Self) -> (Cow<'a, Self>, Cow<'a, Self>) {
        if a.conductor == b.conductor {
            return (Cow::Borrowed(a), Cow::Borrowed(b));
        }
        let m = a.conductor.lcm(&b.conductor);
        let pa = if a.conductor == m {
            Cow::Borrowed(a)
        } else {
            Cow::Owned(a.promote(m).expect("lcm is a common multiple"))
        };
        let pb = if b.conductor == m {
            Cow::Borrowed(b)
        } else {
            Cow::Owned(b.promote(m).expect("lcm is a common multiple"))
        };
        (pa, pb)
    }

    fn add_ref(&self, other: &Self) -> Self {
        let (a, b) = Self::aligned(self, other);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        CycloNum { conductor: a.conductor, coeffs }
    }

    fn sub_ref(&self, other: &Self) -> Self {
        let (a, b) = Self::aligned(self, other);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
        CycloNum { conductor: a.conductor, coeffs }
    }

    fn product(&self, other: &Self) -> Self {
        if self.conductor == 1 {
            return other.scale(&self.coeffs[0]);
        }
        if other.conductor == 1 {
            return self.scale(&other.coeffs[0]);
        }
        let (a, b) = Self::aligned(self, other);
        let n = a.conductor;
        let f = field(n);
        let deg = f.degree;
        if deg == 1 {
            return CycloNum { conductor: n, coeffs: vec![&a.coeffs[0] * &b.coeffs[0]] };
        }
        let mut full = vec![BigRational::zero(); 2 * deg - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    full[i + j] += x * y;
                }
            }
        }
        let mut out: Vec<BigRational> = full.drain(..deg).collect();
        for (off, c) in full.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (slot, &r) in out.iter_mut().zip(&f.powers[deg + off]) {
                if r != 0 {
                    *slot += c * BigInt::from(r);
                }
            }
        }
        CycloNum { conductor: n, coeffs: out }
    }

    fn scale(&self, q: &BigRational) -> Self {
        CycloNum { conductor: self.conductor, coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    /// Multiplicative inverse; fails on zero.
    pub fn checked_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = self.to_rational() {
            return Ok(CycloNum {
                conductor: self.conductor,
                coeffs: CycloNum::rational(q.recip()).promote(self.conductor)?.coeffs,
            });
        }
        // Solve (multiplication by self) v = 1 in the power basis.
        let n = self.conductor;
        let deg = self.coeffs.len();
        let mut cols = Vec::with_capacity(deg);
        for k in 0..deg {
            cols.push(self.product(&CycloNum::zeta(n, k as i64)?).coeffs);
        }
        // augmented rows: row r = [cols[0][r], ..., cols[deg-1][r] | rhs]
        let mut rows: Vec<Vec<BigRational>> = (0..deg)
            .map(|r| {
                let mut row: Vec<BigRational> = cols.iter().map(|c| c[r].clone()).collect();
                row.push(if r == 0 { BigRational::one() } else { BigRational::zero() });
                row
            })
            .collect();
        for c in 0..deg {
            let p = (c..deg)
                .find(|&r| !rows[r][c].is_zero())
                .ok_or(Error::DivisionByZero)?;
            rows.swap(c, p);
            let inv = rows[c][c].recip();
            for v in rows[c].iter_mut() {
                *v *= &inv;
            }
            let pivot = rows[c].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r == c || row[c].is_zero() {
                    continue;
                }
                let factor = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot) {
                    if !pv.is_zero() {
                        *v -= &factor * pv;
                    }
                }
            }
        }
        let coeffs = rows.into_iter().map(|mut r| r.pop().expect("augmented")).collect();
        Ok(CycloNum { conductor: n, coeffs })
    }

    /// Numerical embedding with ζ_N ↦ e^{2πi/N}. Diagnostics only.
    pub fn to_complex(&self) -> Complex64 {
        let n = self.conductor as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let theta = 2.0 * PI * k as f64 / n;
                Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), theta)
            })
            .sum()
    }

    /// Complex conjugate, ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Self {
        let mut acc = CycloNum::zero().promote(self.conductor).expect("1 divides n");
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let z = CycloNum::zeta(self.conductor, -(k as i64)).expect("positive conductor");
            acc = acc.add_ref(&z.scale(c));
        }
        acc
    }

    fn add_assign_ref(&mut self, other: &Self) {
        if self.conductor == other.conductor {
            for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
                if !y.is_zero() {
                    *x += y;
                }
            }
        } else {
            *self = self.add_ref(other);
        }
    }

    fn sub_assign_ref(&mut self, other: &Self) {
        if self.conductor == other.conductor {
            for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
                if !y.is_zero() {
                    *x -= y;
                }
            }
        } else {
            *self = self.sub_ref(other);
        }
    }
}

impl PartialEq for CycloNum {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor == other.conductor {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = Self::aligned(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloNum {}

impl Zero for CycloNum {
    fn zero() -> Self {
        CycloNum::rational(BigRational::zero())
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl One for CycloNum {
    fn one() -> Self {
        CycloNum::rational(BigRational::one())
    }
}

impl Add for CycloNum {
    type Output = CycloNum;
    fn add(self, rhs: Self) -> Self {
        self.add_ref(&rhs)
    }
}

impl<'a> Add<&'a CycloNum> for &'a CycloNum {
    type Output = CycloNum;
    fn add(self, rhs: &'a CycloNum) -> CycloNum {
        self.add_ref(rhs)
    }
}

impl Sub for CycloNum {
    type Output = CycloNum;
    fn sub(self, rhs: Self) -> Self {
        self.sub_ref(&rhs)
    }
}

impl<'a> Sub<&'a CycloNum> for &'a CycloNum {
    type Output = CycloNum;
    fn sub(self, rhs: &'a CycloNum) -> CycloNum {
        self.sub_ref(rhs)
    }
}

impl Mul for CycloNum {
    type Output = CycloNum;
    fn mul(self, rhs: Self) -> Self {
        self.product(&rhs)
    }
}

impl<'a> Mul<&'a CycloNum> for &'a CycloNum {
    type Output = CycloNum;
    fn mul(self, rhs: &'a CycloNum) -> CycloNum {
        self.product(rhs)
    }
}

impl Div for CycloNum {
    type Output = CycloNum;
    /// Panics on a zero divisor; use [`CycloNum::checked_inv`] to handle it.
    fn div(self, rhs: Self) -> Self {
        self.product(&rhs.checked_inv().expect("division by zero in ℚ(ζ)"))
    }
}

impl Neg for CycloNum {
    type Output = CycloNum;
    fn neg(self) -> Self {
        CycloNum { conductor: self.conductor, coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl Scalar for CycloNum {
    fn from_rational(q: &BigRational) -> Self {
        CycloNum::rational(q.clone())
    }

    fn try_inv(&self) -> Option<Self> {
        self.checked_inv().ok()
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let p = a.product(b);
        self.add_assign_ref(&p);
    }

    fn mul_sub_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let p = a.product(b);
        self.sub_assign_ref(&p);
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self.product(other)
    }
}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if wrote {
                write!(f, " + ")?;
            }
            if k == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})·ζ{}^{k}", self.conductor)?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct CycloRepr {
    conductor: u64,
    coeffs: Vec<String>,
}

impl Serialize for CycloNum {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CycloRepr {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(ToString::to_string).collect(),
        }
        .serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(totient(12), 4);
        assert_eq!(totient(7), 6);
    }

    #[test]
    fn zeta_examples() {
        assert_eq!(CycloNum::zeta(1, 0).unwrap(), CycloNum::one());
        assert_eq!(CycloNum::zeta(2, 1).unwrap(), CycloNum::integer(-1));
        let s = CycloNum::zeta(3, 1).unwrap() + CycloNum::zeta(3, 2).unwrap();
        assert_eq!(s, CycloNum::integer(-1));
        assert!(matches!(CycloNum::zeta(0, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn field_operation_examples() {
        let i = CycloNum::zeta(4, 1).unwrap();
        assert_eq!(&i * &i, CycloNum::integer(-1));
        assert_eq!(CycloNum::zeta(3, 1).unwrap().checked_inv().unwrap(), CycloNum::zeta(3, 2).unwrap());
        assert_eq!(CycloNum::zero().checked_inv(), Err(Error::DivisionByZero));
        let x = CycloNum::from_coeffs(5, vec![q(1, 2), q(-3, 1), q(0, 1), q(7, 5)]).unwrap();
        assert!((x.clone() + (-x)).is_zero());
    }

    #[test]
    fn zeta_power_wraps_and_relations_hold() {
        for n in 1..=12u64 {
            let z = CycloNum::zeta(n, 1).unwrap();
            let mut p = CycloNum::one();
            for _ in 0..n {
                p = p * z.clone();
            }
            assert_eq!(p, CycloNum::one(), "ζ_{n}^{n}");
            // Φ_n(ζ) = 0
            let phi = cyclotomic_polynomial(n);
            let mut acc = CycloNum::zero();
            for (k, &c) in phi.iter().enumerate() {
                acc = acc + CycloNum::integer(c) * CycloNum::zeta(n, k as i64).unwrap();
            }
            assert!(acc.is_zero(), "Φ_{n}(ζ_{n})");
            if n >= 2 {
                let total = (0..n as i64).fold(CycloNum::zero(), |a, k| a + CycloNum::zeta(n, k).unwrap());
                assert!(total.is_zero(), "sum of {n}-th roots");
            }
            assert_eq!(CycloNum::zeta(n, -1).unwrap(), CycloNum::zeta(n, n as i64 - 1).unwrap());
        }
    }

    #[test]
    fn mixed_conductors_promote_to_lcm() {
        let a = CycloNum::zeta(2, 1).unwrap();
        let b = CycloNum::zeta(3, 1).unwrap();
        let c = &a * &b;
        assert_eq!(c.conductor(), 6);
        // -ζ_3 = ζ_6^5
        assert_eq!(c, CycloNum::zeta(6, 5).unwrap());
        // ζ_3 seen inside ℚ(ζ_6) is ζ_6^2
        assert_eq!(b.promote(6).unwrap(), CycloNum::zeta(6, 2).unwrap());
        assert!(b.promote(4).is_err());
    }

    #[test]
    fn float_embedding() {
        let one = CycloNum::one().to_complex();
        assert_eq!((one.re, one.im), (1.0, 0.0));
        let m = CycloNum::zeta(2, 1).unwrap().to_complex();
        assert!((m.re + 1.0).abs() < 1e-15 && m.im.abs() < 1e-15);
        assert!((CycloNum::zeta(5, 1).unwrap().to_complex().norm() - 1.0).abs() < 1e-12);
        let z = CycloNum::zeta(8, 3).unwrap().to_complex();
        let expect = Complex64::from_polar(1.0, 2.0 * PI * 3.0 / 8.0);
        assert!((z - expect).norm() < 1e-12);
    }

    #[test]
    fn conjugate_inverts_roots() {
        let z = CycloNum::zeta(7, 3).unwrap();
        assert_eq!(z.conj(), CycloNum::zeta(7, 4).unwrap());
        assert_eq!(&z * &z.conj(), CycloNum::one());
    }

    #[test]
    fn from_coeffs_reduces_high_powers() {
        // x^3 in ℚ(ζ_3) is 1
        let v = CycloNum::from_coeffs(3, vec![q(0, 1), q(0, 1), q(0, 1), q(1, 1)]).unwrap();
        assert_eq!(v, CycloNum::one());
    }
}
