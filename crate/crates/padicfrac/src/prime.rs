//! The ambient field Q_p: primality check, quadratic-residue test and
//! Hensel-lifted square roots with a monotone precision cache.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::rat::{pow_p, vp_int};

/// Which of the two square roots of D in Q_p a surd refers to.
///
/// For odd p, `Plus` is the root whose unit-part residue mod p lies in
/// {1, ..., (p-1)/2}; for p = 2 it is the root congruent to 1 mod 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn flip(self) -> Branch {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }
}

#[derive(Clone)]
struct CacheEntry {
    /// Plus-branch root of the unit part of D, modulo p^prec.
    unit_root: BigInt,
    prec: u32,
}

/// A prime p together with cached Hensel data.
pub struct PrimeCtx {
    p: u64,
    big_p: BigInt,
    cache: Mutex<HashMap<BigInt, CacheEntry>>,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeCtx {
    pub fn new(p: u64) -> Result<PrimeCtx> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeCtx {
            p,
            big_p: BigInt::from(p),
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn big(&self) -> &BigInt {
        &self.big_p
    }

    pub fn is_odd(&self) -> bool {
        self.p != 2
    }

    /// Membership test for sqrt(D) in Q_p: v_p(D) even and the unit part
    /// a quadratic residue mod p (odd p), or congruent to 1 mod 8 (p = 2).
    ///
    /// Rejects D <= 0 and perfect squares, which are out of the surd domain.
    pub fn sqrt_in_qp(&self, d: &BigInt) -> Result<bool> {
        if !d.is_positive() {
            return Err(Error::NonPositiveD(d.clone()));
        }
        let r = d.sqrt();
        if &(&r * &r) == d {
            return Err(Error::SquareD(d.clone()));
        }
        let v = vp_int(&self.big_p, d).expect("d > 0");
        if v % 2 != 0 {
            return Ok(false);
        }
        let unit = d / pow_p(&self.big_p, v as u32);
        if self.is_odd() {
            Ok(self.is_qr(&unit))
        } else {
            Ok(unit.mod_floor(&BigInt::from(8)) == BigInt::one())
        }
    }

    fn is_qr(&self, unit: &BigInt) -> bool {
        // Euler's criterion
        let exp = (&self.big_p - 1) / 2;
        let u = unit.mod_floor(&self.big_p);
        u.modpow(&exp, &self.big_p) == BigInt::one()
    }

    /// Square root of D modulo p^k on the requested branch.
    ///
    /// Requires `sqrt_in_qp(D)` to hold. Results are compatible across
    /// precisions: the mod-p^k' reduction of a higher-precision root is
    /// the root returned at k'.
    pub fn hensel_sqrt(&self, d: &BigInt, branch: Branch, k: u32) -> Result<BigInt> {
        if !self.sqrt_in_qp(d)? {
            return Err(Error::NotInQp {
                p: self.p,
                d: d.clone(),
            });
        }
        assert!(k >= 1, "precision must be at least 1");
        let v = vp_int(&self.big_p, d).expect("d > 0") as u32;
        let e = v / 2;
        // root = p^e * (root of the unit part); the unit root needs
        // k - e digits for the product to be exact mod p^k.
        let unit_prec = k.saturating_sub(e).max(1);
        let unit = d / pow_p(&self.big_p, v);
        let unit_root = self.unit_root(&unit, unit_prec);
        let modulus = pow_p(&self.big_p, k);
        let plus = (pow_p(&self.big_p, e) * unit_root).mod_floor(&modulus);
        Ok(match branch {
            Branch::Plus => plus,
            Branch::Minus => (&modulus - plus).mod_floor(&modulus),
        })
    }

    /// Plus-branch root of a unit quadratic residue mod p^k, via the cache.
    fn unit_root(&self, unit: &BigInt, k: u32) -> BigInt {
        let mut cache = self.cache.lock().expect("hensel cache poisoned");
        let entry = cache.entry(unit.clone()).or_insert_with(|| CacheEntry {
            unit_root: self.root_mod_p(unit),
            prec: 1,
        });
        if entry.prec < k {
            let (root, prec) = self.lift(unit, entry.unit_root.clone(), entry.prec, k);
            entry.unit_root = root;
            entry.prec = prec;
        }
        entry.unit_root.mod_floor(&pow_p(&self.big_p, k))
    }

    /// Brute-force root mod p, canonicalized to the plus branch.
    fn root_mod_p(&self, unit: &BigInt) -> BigInt {
        if self.p == 2 {
            return BigInt::one();
        }
        let u = unit.mod_floor(&self.big_p);
        let mut r = BigInt::one();
        loop {
            if (&r * &r).mod_floor(&self.big_p) == u {
                break;
            }
            r += 1;
            assert!(r < self.big_p, "no square root mod p: unit not a residue");
        }
        let half = (&self.big_p - 1) / 2;
        if r > half {
            r = &self.big_p - r;
        }
        r
    }

    fn lift(&self, unit: &BigInt, mut root: BigInt, mut prec: u32, k: u32) -> (BigInt, u32) {
        if self.p == 2 {
            // invariant: root is the mod-2^j reduction of the 2-adic root
            // that is 1 mod 4; the next bit is decided by squaring mod 2^(j+2)
            if prec < 2 {
                root = BigInt::one();
                prec = 2;
            }
            let two = BigInt::from(2);
            for j in prec..k {
                let m = pow_p(&two, j + 2);
                if (&root * &root).mod_floor(&m) != unit.mod_floor(&m) {
                    root += pow_p(&two, j);
                }
            }
            return (root, k.max(prec));
        }
        // Newton: r <- (r + u/r) / 2, doubling precision each round
        while prec < k {
            prec *= 2;
            let modulus = pow_p(&self.big_p, prec);
            let inv_r = mod_inverse(&root, &modulus);
            let inv_2 = mod_inverse(&BigInt::from(2), &modulus);
            root = ((&root + unit * inv_r) * inv_2).mod_floor(&modulus);
        }
        (root, prec)
    }

    /// The branch label under which the root of D * scale^2 equals
    /// scale * (the `branch` root of D), for scale > 0.
    ///
    /// Scaling can move a root across the canonical-branch boundary (the
    /// unit residue of scale * root may land in the upper half), so code
    /// that rescales a discriminant must relabel the branch with this.
    pub fn scaled_branch(&self, d: &BigInt, branch: Branch, scale: &BigInt) -> Branch {
        assert!(scale.is_positive(), "scale must be positive");
        let v = vp_int(&self.big_p, scale).expect("scale > 0") as u32;
        let s0 = scale / pow_p(&self.big_p, v);
        let same = if self.p == 2 {
            // canonical root is 1 mod 4 and s0 is odd, so s0 * root = s0 mod 4
            s0.mod_floor(&BigInt::from(4)).is_one()
        } else {
            let vd = vp_int(&self.big_p, d).expect("d > 0") as u32;
            let unit = d / pow_p(&self.big_p, vd);
            let r1 = self.unit_root(&unit, 1);
            let res = (s0.mod_floor(&self.big_p) * r1).mod_floor(&self.big_p);
            res <= (&self.big_p - 1) / 2
        };
        if same {
            branch
        } else {
            branch.flip()
        }
    }
}

/// Modular inverse for m coprime to the modulus.
pub fn mod_inverse(a: &BigInt, modulus: &BigInt) -> BigInt {
    let a = a.mod_floor(modulus);
    let e = a.extended_gcd(modulus);
    assert!(e.gcd.is_one(), "not invertible mod p^k");
    e.x.mod_floor(modulus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn primality() {
        assert!(PrimeCtx::new(2).is_ok());
        assert!(PrimeCtx::new(97).is_ok());
        assert!(PrimeCtx::new(1).is_err());
        assert!(PrimeCtx::new(91).is_err());
    }

    #[test]
    fn membership() {
        let p5 = PrimeCtx::new(5).unwrap();
        assert!(p5.sqrt_in_qp(&BigInt::from(19)).unwrap());
        assert!(!p5.sqrt_in_qp(&BigInt::from(2)).unwrap());
        assert!(p5.sqrt_in_qp(&BigInt::from(0)).is_err());
        assert!(p5.sqrt_in_qp(&BigInt::from(25)).is_err());
        assert!(p5.sqrt_in_qp(&BigInt::from(-19)).is_err());
        // v_p(D) odd
        assert!(!p5.sqrt_in_qp(&BigInt::from(5 * 19)).unwrap());
        // v_p(D) = 2 with residue unit
        assert!(p5.sqrt_in_qp(&BigInt::from(25 * 19)).unwrap());
    }

    #[test]
    fn table_total_row_p3() {
        let p3 = PrimeCtx::new(3).unwrap();
        let mut count = 0;
        for d in 1..=1000u32 {
            let d = BigInt::from(d);
            let r = d.sqrt();
            if &r * &r == d {
                continue;
            }
            if p3.sqrt_in_qp(&d).unwrap() {
                count += 1;
            }
        }
        assert_eq!(count, 345);
    }

    #[test]
    fn hensel_examples() {
        let p5 = PrimeCtx::new(5).unwrap();
        let d19 = BigInt::from(19);
        assert_eq!(p5.hensel_sqrt(&d19, Branch::Plus, 1).unwrap(), BigInt::from(2));
        assert_eq!(p5.hensel_sqrt(&d19, Branch::Plus, 2).unwrap(), BigInt::from(12));
        assert_eq!(
            p5.hensel_sqrt(&BigInt::from(6), Branch::Plus, 1).unwrap(),
            BigInt::from(1)
        );
    }

    #[test]
    fn hensel_consistency_and_square() {
        for (p, d) in [(3u64, 7i64), (5, 19), (7, 2), (13, 3), (2, 17)] {
            let ctx = PrimeCtx::new(p).unwrap();
            let d = BigInt::from(d);
            let big = ctx.hensel_sqrt(&d, Branch::Plus, 40).unwrap();
            for k in 1..=40u32 {
                let m = pow_p(ctx.big(), k);
                let r = ctx.hensel_sqrt(&d, Branch::Plus, k).unwrap();
                assert_eq!(r, big.mod_floor(&m), "p={p} k={k}");
                assert_eq!((&r * &r).mod_floor(&m), d.mod_floor(&m), "p={p} k={k}");
                let neg = ctx.hensel_sqrt(&d, Branch::Minus, k).unwrap();
                assert_eq!((&neg * &neg).mod_floor(&m), d.mod_floor(&m));
                assert_eq!((neg + &r).mod_floor(&m), BigInt::zero());
            }
        }
    }

    #[test]
    fn hensel_even_valuation() {
        let p5 = PrimeCtx::new(5).unwrap();
        let d = BigInt::from(19 * 25);
        let r = p5.hensel_sqrt(&d, Branch::Plus, 6).unwrap();
        let m = pow_p(p5.big(), 6);
        assert_eq!((&r * &r).mod_floor(&m), d.mod_floor(&m));
    }

    #[test]
    fn scaled_branch_tracks_scaled_roots() {
        // root of D * scale^2 on the relabeled branch must equal
        // scale * root of D at every precision
        for (p, d, scale) in [
            (5u64, 19i64, 2i64),
            (5, 19, 3),
            (5, 19, 10),
            (3, 7, 2),
            (7, 2, 5),
            (2, 17, 3),
            (2, 17, 5),
        ] {
            let ctx = PrimeCtx::new(p).unwrap();
            let d = BigInt::from(d);
            let scale = BigInt::from(scale);
            let d2 = &d * &scale * &scale;
            for branch in [Branch::Plus, Branch::Minus] {
                let relabeled = ctx.scaled_branch(&d, branch, &scale);
                for k in 3..=20u32 {
                    let m = pow_p(ctx.big(), k);
                    let lhs = ctx.hensel_sqrt(&d2, relabeled, k).unwrap();
                    let rhs = (&scale * ctx.hensel_sqrt(&d, branch, k).unwrap()).mod_floor(&m);
                    assert_eq!(lhs, rhs, "p={p} scale={scale} k={k} {branch:?}");
                }
            }
        }
    }

    #[test]
    fn p2_roots_exact_per_bit() {
        // brute-force pin: x = root mod 2^k iff x = 1 mod 4 and
        // x^2 = u mod 2^(k+1)
        let ctx = PrimeCtx::new(2).unwrap();
        for u in [17i64, 41, 73, 89, 97, 153] {
            let u = BigInt::from(u);
            for k in 3..=12u32 {
                let m = pow_p(ctx.big(), k);
                let check = pow_p(ctx.big(), k + 1);
                let r = ctx.hensel_sqrt(&u, Branch::Plus, k).unwrap();
                let mut expected = None;
                let mut x = BigInt::one();
                while x < m {
                    if (&x * &x).mod_floor(&check) == u.mod_floor(&check) {
                        expected = Some(x.clone());
                        break;
                    }
                    x += 4;
                }
                assert_eq!(Some(r), expected, "u={u} k={k}");
            }
        }
        assert_eq!(
            ctx.hensel_sqrt(&BigInt::from(17), Branch::Plus, 5).unwrap(),
            BigInt::from(9)
        );
    }

    #[test]
    fn p2_branch_rule() {
        let ctx = PrimeCtx::new(2).unwrap();
        let d = BigInt::from(17);
        let plus = ctx.hensel_sqrt(&d, Branch::Plus, 10).unwrap();
        let minus = ctx.hensel_sqrt(&d, Branch::Minus, 10).unwrap();
        assert_eq!(plus.mod_floor(&BigInt::from(4)), BigInt::one());
        assert_eq!(minus.mod_floor(&BigInt::from(4)), BigInt::from(3));
    }
}
