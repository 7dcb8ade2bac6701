use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Commutative ring with identity, as used by every matrix and polynomial kernel.
pub trait Ring:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

/// Rings in which `a / b` is available whenever `b` divides `a`.
///
/// Fraction-free elimination only ever divides by known exact divisors, so integer
/// types and fields both qualify.
pub trait ExactDiv: Ring {
    fn exact_div(&self, rhs: &Self) -> Self;
}

impl ExactDiv for i64 {
    fn exact_div(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self % rhs, 0, "inexact division {self} / {rhs}");
        self / rhs
    }
}

impl ExactDiv for i128 {
    fn exact_div(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self % rhs, 0, "inexact division {self} / {rhs}");
        self / rhs
    }
}

impl ExactDiv for BigInt {
    fn exact_div(&self, rhs: &Self) -> Self {
        debug_assert!((self % rhs).is_zero(), "inexact division {self} / {rhs}");
        self / rhs
    }
}

impl ExactDiv for BigRational {
    fn exact_div(&self, rhs: &Self) -> Self {
        self / rhs
    }
}

/// Lift a small integer into any ring by repeated addition of one.
pub fn from_i64<T: Ring>(value: i64) -> T {
    let mut acc = T::zero();
    let mut base = T::one();
    let mut k = value.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc = acc + base.clone();
        }
        base = base.clone() + base;
        k >>= 1;
    }
    if value < 0 {
        -acc
    } else {
        acc
    }
}
