//! Exact big-integer combinatorics: factorials, double factorials, binomials
//! and conversion of big rationals back to floating point.

use crate::scalar::Real;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// n!! with 0!! = (-1)!! = 1.
pub fn double_factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = n;
    while k >= 2 {
        acc *= k;
        k -= 2;
    }
    acc
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn big_ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Cumulative table of ln k! for k = 0..=max.
pub fn ln_factorial_table<R: Real>(max: usize) -> Vec<R> {
    let mut table = Vec::with_capacity(max + 1);
    let mut acc = 0.0f64;
    table.push(R::zero());
    for k in 1..=max {
        acc += (k as f64).ln();
        table.push(R::of(acc));
    }
    table
}

/// Convert a big rational to floating point, robust against numerator or
/// denominator overflowing the f64 range.
pub fn ratio_to_real<R: Real>(r: &BigRational) -> R {
    if let Some(x) = r.to_f64() {
        if x.is_finite() {
            return R::of(x);
        }
    }
    // Scale both parts down by a common power of two.
    let shift = (r.numer().bits().max(r.denom().bits()) as i64 - 900).max(0) as u64;
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    R::of(n / d)
}

/// Sign times the square root of |r|, for exact radicands.
pub fn signed_sqrt<R: Real>(r: &BigRational) -> R {
    let mag = ratio_to_real::<R>(&r.abs()).sqrt();
    if r.is_negative() {
        -mag
    } else {
        mag
    }
}

/// "p/q" rendering, denominator always present.
pub fn fraction_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
