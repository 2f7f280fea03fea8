//! Exact rational helpers: p-adic valuation and nearest-integer rounding.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Reduced big rational with positive denominator (guaranteed by
/// `num_rational`'s canonical form).
pub type Rat = BigRational;

/// p-adic valuation of an integer; `None` encodes +infinity (n = 0).
pub fn vp_int(p: &BigInt, n: &BigInt) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let mut v = 0i64;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

/// p-adic valuation of a rational: v_p(num) - v_p(den); `None` for 0.
pub fn vp(p: &BigInt, x: &Rat) -> Option<i64> {
    Some(vp_int(p, x.numer())? - vp_int(p, x.denom()).expect("nonzero denominator"))
}

/// Nearest integer under the Euclidean metric; exact ties round away
/// from zero, so round(-1/2) = -1 and round(1/2) = 1.
pub fn round_nearest(x: &Rat) -> BigInt {
    let two = BigInt::from(2);
    let num2 = x.numer() * &two;
    let den2 = x.denom() * &two;
    if x.is_negative() {
        // ceil(x - 1/2): the half-way case lands on the smaller integer
        (num2 - x.denom()).div_ceil(&den2)
    } else {
        (num2 + x.denom()).div_floor(&den2)
    }
}

/// Sign of a rational as an integer in {-1, 0, 1}.
pub fn sign(x: &Rat) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_negative() {
        -1
    } else {
        1
    }
}

pub fn pow_p(p: &BigInt, k: u32) -> BigInt {
    p.pow(k)
}
