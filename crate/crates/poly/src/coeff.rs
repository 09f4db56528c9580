use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// Coefficient field for [`crate::Polynomial`].
pub trait Coeff: Num + Neg<Output = Self> + Clone + Debug + PartialEq + Send + Sync + 'static {
    fn from_i64(v: i64) -> Self;
    fn to_f64_lossy(&self) -> f64;
    fn abs_f64(&self) -> f64 {
        self.to_f64_lossy().abs()
    }
}

impl Coeff for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

impl Coeff for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(if self.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
    }
}

/// Exact rational from a finite float (every finite `f64` is a dyadic rational).
pub fn rational_from_f64(v: f64) -> Option<Rational> {
    if v == 0.0 {
        return Some(Rational::zero());
    }
    BigRational::from_float(v)
}

/// `num/den` as a rational, `den` nonzero.
pub fn ratio(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn is_one<C: Coeff>(c: &C) -> bool {
    c.is_one()
}

pub(crate) fn pow_coeff<C: Coeff>(base: &C, e: u32) -> C {
    let mut acc = C::one();
    let mut b = base.clone();
    let mut k = e;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * b.clone();
        }
        k >>= 1;
        if k > 0 {
            b = b.clone() * b;
        }
    }
    acc
}
