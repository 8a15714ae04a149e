//! Exact coordinates in Z[1/p]: the representable points of Q_p.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// p-adic valuation of a nonzero rational.
pub(crate) fn val_p(x: &BigRational, p: u32) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v: i64 = 0;
    let mut n = x.numer().abs();
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    let mut d = x.denom().clone();
    while (&d % &p).is_zero() {
        d /= &p;
        v -= 1;
    }
    Some(v)
}

/// The exponent k with denom(x) = p^k, if the denominator is a power of p.
pub(crate) fn denom_p_exponent(x: &BigRational, p: u32) -> Option<u32> {
    let p = BigInt::from(p);
    let mut d = x.denom().clone();
    let mut k = 0u32;
    while (&d % &p).is_zero() {
        d /= &p;
        k += 1;
    }
    if d.is_one() {
        Some(k)
    } else {
        None
    }
}

pub(crate) fn is_p_rational(x: &BigRational, p: u32) -> bool {
    denom_p_exponent(x, p).is_some()
}

/// p^e as an exact rational, e of either sign.
pub(crate) fn pow_p(p: u32, e: i64) -> BigRational {
    let b = BigInt::from(p);
    if e >= 0 {
        BigRational::from(b.pow(e as u32))
    } else {
        BigRational::new(BigInt::one(), b.pow((-e) as u32))
    }
}

/// Digit-truncation representative of x + p^n Z_p: the unique
/// r = m * p^{-k}, 0 <= m < p^{n+k}, with x - r in p^n Z_p.
pub(crate) fn canonical(x: &BigRational, p: u32, n: i64) -> BigRational {
    if x.is_zero() {
        return BigRational::zero();
    }
    let v = val_p(x, p).unwrap();
    if v >= n {
        return BigRational::zero();
    }
    let k = denom_p_exponent(x, p).expect("p-adic coordinate must have p-power denominator") as i64;
    let e = n + k;
    debug_assert!(e > 0);
    let modulus = BigInt::from(p).pow(e as u32);
    let m = x.numer().mod_floor(&modulus);
    BigRational::new(m, BigInt::from(p).pow(k as u32))
}
