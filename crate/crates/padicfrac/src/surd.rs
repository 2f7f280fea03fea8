//! Quadratic surds (P + sqrt(D))/Q over Q_p, their balanced p-adic digits
//! and the truncation functions s and t.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::prime::{mod_inverse, Branch, PrimeCtx};
use crate::rat::{pow_p, vp, vp_int, Rat};

/// One coefficient of a balanced p-adic expansion: an integer in
/// [-(p-1)/2, (p-1)/2] for odd p, or in {0, 1} for p = 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BalancedDigit(pub i64);

/// Balanced representative of `n` mod p.
pub fn balanced_residue(p: u64, n: &BigInt) -> BalancedDigit {
    let p_big = BigInt::from(p);
    let r = n.mod_floor(&p_big);
    let mut val = i64::try_from(&r).expect("residue fits in i64");
    if p != 2 && val as u64 > (p - 1) / 2 {
        val -= p as i64;
    }
    BalancedDigit(val)
}

/// Exact value (P + sqrt(D))/Q with rational P, Q and integer D >= 0.
/// D = 0 encodes a rational; D > 0 is non-square with sqrt(D) in Q_p,
/// and `branch` picks which of the two roots is meant.
#[derive(Clone)]
pub struct Surd {
    ctx: Arc<PrimeCtx>,
    p_coef: Rat,
    q_coef: Rat,
    d: BigInt,
    branch: Branch,
}

/// Integer-coefficient form used by the expansion engine: value is
/// (P + sqrt(D))/Q with P, Q, D integers and q0 | D - P^2 where
/// Q = p^f0 * q0, gcd(q0, p) = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedSurd {
    pub p_coef: BigInt,
    pub q_coef: BigInt,
    pub d: BigInt,
    pub branch: Branch,
}

impl Surd {
    pub fn new(ctx: Arc<PrimeCtx>, p_coef: Rat, q_coef: Rat, d: BigInt, branch: Branch) -> Result<Surd> {
        if q_coef.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if !d.is_zero() {
            if !ctx.sqrt_in_qp(&d)? {
                return Err(Error::NotInQp { p: ctx.p(), d });
            }
        }
        Ok(Surd {
            ctx,
            p_coef,
            q_coef,
            d,
            branch,
        })
    }

    /// Internal constructor skipping validation (coefficients already vetted).
    pub(crate) fn raw(ctx: Arc<PrimeCtx>, p_coef: Rat, q_coef: Rat, d: BigInt, branch: Branch) -> Surd {
        Surd {
            ctx,
            p_coef,
            q_coef,
            d,
            branch,
        }
    }

    pub fn from_rat(ctx: Arc<PrimeCtx>, x: Rat) -> Surd {
        Surd::raw(ctx, x, Rat::one(), BigInt::zero(), Branch::Plus)
    }

    pub fn from_sqrt(ctx: Arc<PrimeCtx>, d: BigInt, branch: Branch) -> Result<Surd> {
        Surd::new(ctx, Rat::zero(), Rat::one(), d, branch)
    }

    pub fn ctx(&self) -> &Arc<PrimeCtx> {
        &self.ctx
    }

    pub fn p_coef(&self) -> &Rat {
        &self.p_coef
    }

    pub fn q_coef(&self) -> &Rat {
        &self.q_coef
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn is_rational(&self) -> bool {
        self.d.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.is_rational() && self.p_coef.is_zero()
    }

    /// Rational value for D = 0.
    pub fn as_rat(&self) -> Option<Rat> {
        self.is_rational().then(|| &self.p_coef / &self.q_coef)
    }

    /// The rational center P/Q (equals Tr(alpha)/2 for D != 0, and the
    /// value itself for D = 0).
    pub fn rational_part(&self) -> Rat {
        &self.p_coef / &self.q_coef
    }

    /// alpha - r for rational r, keeping the same D and branch.
    pub fn sub_rat(&self, r: &Rat) -> Surd {
        Surd::raw(
            self.ctx.clone(),
            &self.p_coef - r * &self.q_coef,
            self.q_coef.clone(),
            self.d.clone(),
            self.branch,
        )
    }

    /// Integer form (A + sqrt(D'))/C with the same value, where D' =
    /// D * scale^2 absorbs the square of the cleared denominator `scale`.
    fn integer_form(&self) -> (BigInt, BigInt, BigInt, BigInt) {
        let (a, b) = (self.p_coef.numer(), self.p_coef.denom());
        let (c, e) = (self.q_coef.numer(), self.q_coef.denom());
        // (a/b + sqrt(D)) * e/c = (a*e + b*e*sqrt(D)) / (b*c)
        let scale = b * e; // > 0: both denominators positive
        let big_a = a * e;
        let big_c = b * c;
        let big_d = &self.d * (&scale * &scale);
        (big_a, big_c, big_d, scale)
    }

    /// Branch label for the scaled discriminant D * scale^2 that keeps
    /// the root equal to scale * (this surd's root).
    fn scaled_branch(&self, scale: &BigInt) -> Branch {
        if scale.is_one() {
            self.branch
        } else {
            self.ctx.scaled_branch(&self.d, self.branch, scale)
        }
    }

    /// p-adic valuation of the value; `None` means +infinity (value 0).
    pub fn vp(&self) -> Option<i64> {
        if self.is_rational() {
            return vp(self.ctx.big(), &self.as_rat().unwrap());
        }
        let (a, c, d2, scale) = self.integer_form();
        let w = self.numerator_valuation(&a, &d2, self.scaled_branch(&scale));
        Some(w - vp_int(self.ctx.big(), &c).expect("nonzero Q"))
    }

    /// Valuation of the p-adic number A + sqrt(D2), found by growing the
    /// working precision until a nonzero residue appears.
    fn numerator_valuation(&self, a: &BigInt, d2: &BigInt, branch: Branch) -> i64 {
        let mut k = 32u32;
        loop {
            let modulus = pow_p(self.ctx.big(), k);
            let root = self
                .ctx
                .hensel_sqrt(d2, branch, k)
                .expect("validated surd");
            let n = (a + root).mod_floor(&modulus);
            if !n.is_zero() {
                if let Some(w) = vp_int(self.ctx.big(), &n) {
                    if (w as u32) < k {
                        return w;
                    }
                }
            }
            k *= 2;
            assert!(k < (1 << 24), "precision runaway: is the surd actually zero?");
        }
    }

    /// Balanced digits a_from ... a_to of the p-adic expansion.
    pub fn digits(&self, from: i64, to: i64) -> Result<Vec<BalancedDigit>> {
        if self.is_zero() {
            return Err(Error::ZeroValue);
        }
        if from > to {
            return Ok(Vec::new());
        }
        let v = self.vp().expect("nonzero");
        let mut out = Vec::with_capacity((to - from + 1) as usize);
        // indices below the valuation are zero
        for idx in from..=to {
            if idx < v {
                out.push(BalancedDigit(0));
            }
        }
        if to < v {
            return Ok(out);
        }
        let count = (to - v + 1) as usize;
        let run = if self.is_rational() {
            self.rational_digit_run(v, count)
        } else {
            self.surd_digit_run(v, count)
        };
        let skip = if from > v { (from - v) as usize } else { 0 };
        out.extend(&run[skip..]);
        Ok(out)
    }

    /// Digits of a nonzero rational starting at its valuation, by exact
    /// residue arithmetic (no Hensel machinery).
    fn rational_digit_run(&self, v: i64, count: usize) -> Vec<BalancedDigit> {
        let p_big = self.ctx.big().clone();
        let x = self.as_rat().unwrap();
        // unit part: x / p^v
        let shift = if v >= 0 {
            Rat::from(pow_p(&p_big, v as u32))
        } else {
            Rat::new(BigInt::one(), pow_p(&p_big, (-v) as u32))
        };
        let mut u = x / shift;
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            // residue of num * den^{-1} mod p
            let den_inv = mod_inverse(u.denom(), &p_big);
            let res = (u.numer() * den_inv).mod_floor(&p_big);
            let digit = balanced_residue(self.ctx.p(), &res);
            out.push(digit);
            u = (u - Rat::from(BigInt::from(digit.0))) / Rat::from(p_big.clone());
        }
        out
    }

    /// Digits of a quadratic irrational starting at its valuation, by
    /// evaluating (A + root)/C modulo a dynamically grown p^K.
    fn surd_digit_run(&self, _v: i64, count: usize) -> Vec<BalancedDigit> {
        let p = self.ctx.p();
        let p_big = self.ctx.big().clone();
        let (a, c, d2, scale) = self.integer_form();
        let branch = self.scaled_branch(&scale);
        let f = vp_int(&p_big, &c).expect("nonzero Q") as u32;
        let c0 = &c / pow_p(&p_big, f);
        let mut k = 32u32.max(count as u32 + 2);
        loop {
            let modulus = pow_p(&p_big, k);
            let root = self
                .ctx
                .hensel_sqrt(&d2, branch, k)
                .expect("validated surd");
            let n = (&a + root).mod_floor(&modulus);
            let w = match vp_int(&p_big, &n) {
                Some(w) if (w as u32) < k && k - (w as u32) > count as u32 => w as u32,
                _ => {
                    k *= 2;
                    assert!(k < (1 << 24), "precision runaway in digit extraction");
                    continue;
                }
            };
            let avail = k - w;
            let m_avail = pow_p(&p_big, avail);
            let mut x = ((&n / pow_p(&p_big, w)) * mod_inverse(&c0, &m_avail)).mod_floor(&m_avail);
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let digit = balanced_residue(p, &x.mod_floor(&p_big));
                out.push(digit);
                x = (x - BigInt::from(digit.0)) / &p_big;
            }
            return out;
        }
    }

    /// s(alpha): the truncation of the balanced expansion through index 0.
    pub fn s(&self) -> Rat {
        self.truncate_through(0)
    }

    /// t(alpha): the truncation through index -1.
    pub fn t(&self) -> Rat {
        self.truncate_through(-1)
    }

    fn truncate_through(&self, top: i64) -> Rat {
        if self.is_zero() {
            return Rat::zero();
        }
        let v = self.vp().expect("nonzero");
        if v > top {
            return Rat::zero();
        }
        let digits = self.digits(v, top).expect("nonzero");
        let p_big = self.ctx.big();
        let mut acc = Rat::zero();
        for (i, d) in digits.iter().enumerate() {
            let idx = v + i as i64;
            let term = if idx >= 0 {
                Rat::from(BigInt::from(d.0) * pow_p(p_big, idx as u32))
            } else {
                Rat::new(BigInt::from(d.0), pow_p(p_big, (-idx) as u32))
            };
            acc += term;
        }
        acc
    }

    /// Rewrites the value with integer P, Q such that q0 | D - P^2
    /// (Q = p^f0 q0, gcd(q0, p) = 1), so the whole expansion stays in Z.
    pub fn normalize(&self) -> Result<NormalizedSurd> {
        if self.is_rational() {
            return Err(Error::RationalInput);
        }
        let (mut a, mut c, mut d2, mut scale) = self.integer_form();
        let p_big = self.ctx.big();
        let f = vp_int(p_big, &c).expect("nonzero Q") as u32;
        let q0 = &c / pow_p(p_big, f);
        if !q0.abs().is_one() {
            // replace (P, q0, D) by (P|q0|, q0|q0|, D q0^2)
            let q0_abs = q0.abs();
            a *= &q0_abs;
            c *= &q0_abs;
            d2 *= &q0_abs * &q0_abs;
            scale *= q0_abs;
        }
        let branch = self.scaled_branch(&scale);
        debug_assert!((&d2 - &a * &a)
            .mod_floor(&(&c / pow_p(p_big, vp_int(p_big, &c).unwrap() as u32)).abs())
            .is_zero());
        Ok(NormalizedSurd {
            p_coef: a,
            q_coef: c,
            d: d2,
            branch,
        })
    }
}

/// Non-square check for integer D (D = 0 is allowed and means rational).
pub fn is_perfect_square(d: &BigInt) -> bool {
    if d.is_negative() {
        return false;
    }
    let r = d.sqrt();
    &(&r * &r) == d
}
