//! The coefficient abstraction shared by matrices, spans and the algebra checks.
//!
//! Every kernel in this crate is written against [`Scalar`]. Exact verdicts use
//! [`Rational`](crate::Rational) or [`CycloNum`](crate::CycloNum); the float
//! implementations exist for diagnostics and compare against a fixed
//! tolerance instead of exact zero.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// A field element usable as a matrix entry.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Embeds an exact rational.
    fn from_rational(q: &BigRational) -> Self;

    /// Multiplicative inverse, `None` for zero.
    fn try_inv(&self) -> Option<Self>;

    /// `self += a * b` without consuming the operands.
    fn mul_add_assign(&mut self, a: &Self, b: &Self);

    /// `self -= a * b` without consuming the operands.
    fn mul_sub_assign(&mut self, a: &Self, b: &Self);

    /// `self * other` by reference.
    fn mul_ref(&self, other: &Self) -> Self;

    /// Zero test used by pivoting and support checks. Exact types use `is_zero`.
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Entry-wise equality under [`Scalar::is_negligible`].
    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_negligible()
    }
}

impl Scalar for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self += a * b;
    }

    fn mul_sub_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self -= a * b;
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

/// Tolerance for the float diagnostics path.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

macro_rules! impl_float_scalar {
    ($f:ty) => {
        impl Scalar for $f {
            fn from_rational(q: &BigRational) -> Self {
                q.to_f64().unwrap_or(f64::NAN) as $f
            }

            fn try_inv(&self) -> Option<Self> {
                if self.is_negligible() {
                    None
                } else {
                    Some(1.0 / *self)
                }
            }

            fn mul_add_assign(&mut self, a: &Self, b: &Self) {
                *self += *a * *b;
            }

            fn mul_sub_assign(&mut self, a: &Self, b: &Self) {
                *self -= *a * *b;
            }

            fn mul_ref(&self, other: &Self) -> Self {
                *self * *other
            }

            fn is_negligible(&self) -> bool {
                (*self as f64).abs() < FLOAT_TOLERANCE
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);
