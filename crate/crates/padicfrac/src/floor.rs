//! Partial quotients and the floor functions s-bar, t-bar, s1, t1.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::{pow_p, round_nearest, sign, vp_int, Rat};
use crate::surd::Surd;

/// An element of Z[1/p] stored as unit / p^exp, with either exp = 0 or
/// gcd(unit, p) = 1; the zero value is (0, 0).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialQuotient {
    unit: BigInt,
    exp: u32,
}

impl PartialQuotient {
    pub fn zero() -> PartialQuotient {
        PartialQuotient {
            unit: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn from_integer(n: BigInt) -> PartialQuotient {
        PartialQuotient { unit: n, exp: 0 }
    }

    /// Canonical form of a rational whose denominator is a power of p.
    pub fn from_rat(p: &BigInt, x: &Rat) -> Result<PartialQuotient> {
        if x.is_zero() {
            return Ok(PartialQuotient::zero());
        }
        let den = x.denom();
        let vd = vp_int(p, den).expect("nonzero denominator") as u32;
        if den != &pow_p(p, vd) {
            return Err(Error::NotPAdicInteger(x.to_string()));
        }
        let mut unit = x.numer().clone();
        let mut exp = vd;
        // pull p-factors out of the numerator while the exponent lasts
        while exp > 0 {
            let (q, r) = unit.div_rem(p);
            if !r.is_zero() {
                break;
            }
            unit = q;
            exp -= 1;
        }
        Ok(PartialQuotient { unit, exp })
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    pub fn value(&self, p: &BigInt) -> Rat {
        Rat::new(self.unit.clone(), pow_p(p, self.exp))
    }

    /// v_p of the value; `None` for zero.
    pub fn vp(&self, p: &BigInt) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        if self.exp > 0 {
            Some(-(self.exp as i64))
        } else {
            vp_int(p, &self.unit)
        }
    }
}

impl PartialQuotient {
    /// Rendered as `unit` or `unit/p^exp` with the power written out,
    /// e.g. `4/5`, `-10/71`, `8/25`.
    pub fn display_with(&self, p: &BigInt) -> String {
        if self.exp == 0 {
            format!("{}", self.unit)
        } else {
            format!("{}/{}", self.unit, pow_p(p, self.exp))
        }
    }
}

/// s-bar: round((P/Q - s(alpha))/p) * p + s(alpha).
pub fn sbar(alpha: &Surd) -> PartialQuotient {
    let p = alpha.ctx().big().clone();
    let s = alpha.s();
    let center = alpha.rational_part();
    let m = round_nearest(&((&center - &s) / Rat::from(p.clone())));
    let value = Rat::from(m * &p) + s;
    PartialQuotient::from_rat(&p, &value).expect("s-bar lies in Z[1/p]")
}

/// t-bar: round(P/Q - t(alpha)) + t(alpha).
pub fn tbar(alpha: &Surd) -> PartialQuotient {
    let p = alpha.ctx().big().clone();
    let t = alpha.t();
    let center = alpha.rational_part();
    let m = round_nearest(&(&center - &t));
    let value = Rat::from(m) + t;
    PartialQuotient::from_rat(&p, &value).expect("t-bar lies in Z[1/p]")
}

/// s1: whichever of s(alpha) and s(alpha) - p*sign(s(alpha)) is closer to
/// P/Q in the Euclidean metric; ties keep s(alpha).
pub fn s1(alpha: &Surd) -> Result<PartialQuotient> {
    if alpha.is_rational() {
        return Err(Error::RationalInput);
    }
    let p = alpha.ctx().big().clone();
    let s = alpha.s();
    let alt = &s - Rat::from(BigInt::from(sign(&s)) * &p);
    Ok(PartialQuotient::from_rat(&p, &pick_closer(alpha, s, alt)).expect("in Z[1/p]"))
}

/// t1: the analogue over {t(alpha), t(alpha) - sign(t(alpha))}.
pub fn t1(alpha: &Surd) -> Result<PartialQuotient> {
    if alpha.is_rational() {
        return Err(Error::RationalInput);
    }
    let p = alpha.ctx().big().clone();
    let t = alpha.t();
    let alt = &t - Rat::from(BigInt::from(sign(&t)));
    Ok(PartialQuotient::from_rat(&p, &pick_closer(alpha, t, alt)).expect("in Z[1/p]"))
}

fn pick_closer(alpha: &Surd, first: Rat, second: Rat) -> Rat {
    let center = alpha.rational_part();
    let d1 = (&center - &first).abs();
    let d2 = (&center - &second).abs();
    if d2 < d1 {
        second
    } else {
        first
    }
}

/// s(alpha) as a canonical partial quotient.
pub fn s_quotient(alpha: &Surd) -> PartialQuotient {
    PartialQuotient::from_rat(alpha.ctx().big(), &alpha.s()).expect("s lies in Z[1/p]")
}

/// t(alpha) as a canonical partial quotient.
pub fn t_quotient(alpha: &Surd) -> PartialQuotient {
    PartialQuotient::from_rat(alpha.ctx().big(), &alpha.t()).expect("t lies in Z[1/p]")
}
