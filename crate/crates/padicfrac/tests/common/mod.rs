//! Shared drivers for the invariant suites. Each function returns
//! `Err(witness)` on the first violated case so failures are replayable
//! from the printed seed and input.
#![allow(dead_code)]

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use padicfrac::rat::pow_p;
use padicfrac::sweep::{admissible_d, random_rational};
use padicfrac::{
    expand, sbar, tbar, vp, zero_eliminate, AlgorithmId, Branch, Kind, PrimeCtx, Rat, Surd,
};
use padicfrac::oracle::{audit_bounds, ceil_log4, verify_period};

pub type Outcome = Result<(), String>;

pub fn ctx(p: u64) -> Arc<PrimeCtx> {
    Arc::new(PrimeCtx::new(p).expect("prime"))
}

/// A random quadratic surd (P + sqrt(D))/Q with D admissible for p.
pub fn random_surd(ctx: &Arc<PrimeCtx>, ds: &[u64], rng: &mut impl Rng) -> Surd {
    let d = ds[rng.gen_range(0..ds.len())];
    let p = rng.gen_range(-60i64..=60);
    let q = loop {
        let q = rng.gen_range(-40i64..=40);
        if q != 0 {
            break q;
        }
    };
    let branch = if rng.gen() { Branch::Plus } else { Branch::Minus };
    Surd::new(
        ctx.clone(),
        Rat::from(BigInt::from(p)),
        Rat::from(BigInt::from(q)),
        BigInt::from(d),
        branch,
    )
    .expect("admissible D")
}

/// A mixed corpus: rationals and quadratic surds, deterministic per seed.
pub fn mixed_corpus(ctx: &Arc<PrimeCtx>, cases: usize, seed: u64) -> Vec<Surd> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ctx.p());
    let ds = admissible_d(ctx, 2, 2000);
    (0..cases)
        .map(|i| {
            if i % 2 == 0 {
                Surd::from_rat(ctx.clone(), random_rational(&mut rng, 1_000_000))
            } else {
                random_surd(ctx, &ds, &mut rng)
            }
        })
        .collect()
}

fn half() -> Rat {
    Rat::new(BigInt::one(), BigInt::from(2))
}

/// Value-set properties of the truncation floors s and t:
/// distinct s-values differ with v_p <= 0, distinct t-values with
/// v_p < 0, and |s| < p/2, |t| < 1/2.
pub fn floor_value_sets(p: u64, cases: usize, seed: u64) -> Outcome {
    let c = ctx(p);
    let p_big = c.big();
    let p_half = Rat::new(BigInt::from(p), BigInt::from(2));
    let mut s_vals = Vec::new();
    let mut t_vals = Vec::new();
    for (i, alpha) in mixed_corpus(&c, cases, seed).into_iter().enumerate() {
        let (s, t) = (alpha.s(), alpha.t());
        if s.abs() >= p_half {
            return Err(format!("case {i}: |s| = |{s}| >= p/2"));
        }
        if t.abs() >= half() {
            return Err(format!("case {i}: |t| = |{t}| >= 1/2"));
        }
        s_vals.push(s);
        t_vals.push(t);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    for _ in 0..cases {
        let (i, j) = (rng.gen_range(0..s_vals.len()), rng.gen_range(0..s_vals.len()));
        if s_vals[i] != s_vals[j] {
            let v = vp(p_big, &(&s_vals[i] - &s_vals[j])).expect("nonzero");
            if v > 0 {
                return Err(format!(
                    "s-values {} and {} differ with v_p = {v} > 0",
                    s_vals[i], s_vals[j]
                ));
            }
        }
        if t_vals[i] != t_vals[j] {
            let v = vp(p_big, &(&t_vals[i] - &t_vals[j])).expect("nonzero");
            if v >= 0 {
                return Err(format!(
                    "t-values {} and {} differ with v_p = {v} >= 0",
                    t_vals[i], t_vals[j]
                ));
            }
        }
    }
    Ok(())
}

/// Rounded-floor properties: v_p(alpha - sbar) > 0, v_p(alpha - tbar) >= 0,
/// and Euclidean proximity to the rational center P/Q:
/// |sbar - P/Q| < p/2, |tbar - P/Q| < 1/2.
pub fn rounded_floor_properties(p: u64, cases: usize, seed: u64) -> Outcome {
    let c = ctx(p);
    let p_big = c.big();
    let p_half = Rat::new(BigInt::from(p), BigInt::from(2));
    for (i, alpha) in mixed_corpus(&c, cases, seed).into_iter().enumerate() {
        let center = alpha.rational_part();
        let s = sbar(&alpha).value(p_big);
        let t = tbar(&alpha).value(p_big);
        match alpha.sub_rat(&s).vp() {
            None => {} // alpha - sbar = 0: infinite valuation
            Some(v) if v > 0 => {}
            Some(v) => return Err(format!("case {i}: v_p(alpha - sbar) = {v} <= 0")),
        }
        match alpha.sub_rat(&t).vp() {
            None => {}
            Some(v) if v >= 0 => {}
            Some(v) => return Err(format!("case {i}: v_p(alpha - tbar) = {v} < 0")),
        }
        // strict except at an exact rounding tie, where |round(x) - x|
        // = 1/2 is unavoidable for any integer choice
        if (&s - &center).abs() > p_half {
            return Err(format!("case {i}: |sbar - P/Q| = |{}| > p/2", &s - &center));
        }
        if (&t - &center).abs() > half() {
            return Err(format!("case {i}: |tbar - P/Q| = |{}| > 1/2", &t - &center));
        }
    }
    Ok(())
}

/// For the round-based algorithms: every quotient past b_0 is nonzero
/// with v_p <= 0, and consecutive quotients from n >= 1 satisfy
/// v_p(b_n b_{n+1}) < 0 (the convergence condition).
pub fn quotient_valuations(p: u64, alg: AlgorithmId, cases: usize, seed: u64) -> Outcome {
    let c = ctx(p);
    let p_big = c.big();
    for (i, alpha) in mixed_corpus(&c, cases, seed).into_iter().enumerate() {
        let e = expand(&alpha, alg, 200).map_err(|e| format!("case {i}: {e}"))?;
        let qs = &e.quotients;
        for n in 1..qs.len() {
            let v = match qs[n].vp(p_big) {
                Some(v) => v,
                None => return Err(format!("case {i}: b_{n} = 0")),
            };
            if v > 0 {
                return Err(format!("case {i}: v_p(b_{n}) = {v} > 0"));
            }
            if n + 1 < qs.len() {
                let v_next = qs[n + 1].vp(p_big).expect("nonzero past b_0");
                if v + v_next >= 0 {
                    return Err(format!(
                        "case {i}: v_p(b_{n} b_{}) = {} >= 0",
                        n + 1,
                        v + v_next
                    ));
                }
            }
        }
    }
    Ok(())
}

/// A_n B_{n-1} - A_{n-1} B_n = (-1)^(n-1), with (A_{-1}, B_{-1}) = (1, 0).
pub fn determinant_identity(p: u64, alg: AlgorithmId, cases: usize, seed: u64) -> Outcome {
    let c = ctx(p);
    for (i, alpha) in mixed_corpus(&c, cases, seed).into_iter().enumerate() {
        let e = expand(&alpha, alg, 120).map_err(|e| format!("case {i}: {e}"))?;
        let mut prev = (Rat::one(), Rat::zero());
        for (n, (a, b)) in e.convergents.iter().enumerate() {
            let det = a * &prev.1 - &prev.0 * b;
            let expected = if n % 2 == 0 { -Rat::one() } else { Rat::one() };
            if det != expected {
                return Err(format!("case {i}: det at n = {n} is {det}, expected {expected}"));
            }
            prev = (a.clone(), b.clone());
        }
    }
    Ok(())
}

/// Valuation formula for convergents: under the hypotheses
/// (b_n != 0, v_p(b_n) <= 0 for n >= 1, v_p(b_n b_{n+1}) < 0 for n >= 1),
/// v_p(B_n) = sum_{k=1..n} v_p(b_k) and v_p(A_n) = sum_{k=0..n} v_p(b_k)
/// when b_0 != 0 (sum from 2 when b_0 = 0, n >= 2).
pub fn convergent_valuation_formula(p: u64, alg: AlgorithmId, cases: usize, seed: u64) -> Outcome {
    let c = ctx(p);
    let p_big = c.big();
    for (i, alpha) in mixed_corpus(&c, cases, seed).into_iter().enumerate() {
        let e = expand(&alpha, alg, 120).map_err(|e| format!("case {i}: {e}"))?;
        let qs = &e.quotients;
        // check the hypotheses hold on this expansion; skip if not
        let hyp = qs
            .iter()
            .enumerate()
            .skip(1)
            .all(|(n, q)| q.vp(p_big).is_some_and(|v| v <= 0)
                && (n + 1 >= qs.len()
                    || q.vp(p_big).unwrap() + qs[n + 1].vp(p_big).unwrap_or(1) < 0));
        if !hyp {
            continue;
        }
        let b0_zero = qs.first().is_some_and(|q| q.is_zero());
        // the A_n formula needs the product condition on (b_0, b_1) too:
        // A_1 = b_1 b_0 + 1 gains valuation when both are units
        let a_applicable = b0_zero
            || (qs.len() > 1
                && qs[0].vp(p_big).unwrap_or(1) + qs[1].vp(p_big).unwrap_or(1) < 0);
        let mut b_sum = 0i64;
        let mut a_sum = if b0_zero { 0 } else { qs[0].vp(p_big).unwrap_or(0) };
        for n in 1..qs.len() {
            let v = qs[n].vp(p_big).unwrap();
            b_sum += v;
            if !(b0_zero && n < 2) {
                a_sum += v;
            }
            let (a_n, b_n) = &e.convergents[n];
            if vp(p_big, b_n) != Some(b_sum) {
                return Err(format!(
                    "case {i}: v_p(B_{n}) = {:?}, expected {b_sum}",
                    vp(p_big, b_n)
                ));
            }
            if a_applicable && !(b0_zero && n < 2) && vp(p_big, a_n) != Some(a_sum) {
                return Err(format!(
                    "case {i}: v_p(A_{n}) = {:?}, expected {a_sum}",
                    vp(p_big, a_n)
                ));
            }
        }
    }
    Ok(())
}

/// Block-3 scheme, after zero elimination: whenever v_p(b_n) < 0 and
/// v_p(b_{n+1}) = v_p(b_{n+2}) = 0, also v_p(b_{n+1} b_{n+2} + 1) = 0.
pub fn block3_unit_condition(p: u64, cases: usize, seed: u64) -> Outcome {
    let c = ctx(p);
    let p_big = c.big();
    for (i, alpha) in mixed_corpus(&c, cases, seed).into_iter().enumerate() {
        let e = expand(&alpha, AlgorithmId::Modified, 200).map_err(|e| format!("case {i}: {e}"))?;
        let qs = zero_eliminate(p_big, &e.quotients).quotients;
        for n in 0..qs.len().saturating_sub(2) {
            let neg = qs[n].vp(p_big).is_some_and(|v| v < 0);
            let u1 = qs[n + 1].vp(p_big) == Some(0);
            let u2 = qs[n + 2].vp(p_big) == Some(0);
            if neg && u1 && u2 {
                let prod = qs[n + 1].value(p_big) * qs[n + 2].value(p_big) + Rat::one();
                if vp(p_big, &prod) != Some(0) {
                    return Err(format!(
                        "case {i}: v_p(b_{} b_{} + 1) = {:?} != 0",
                        n + 1,
                        n + 2,
                        vp(p_big, &prod)
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Finiteness machinery on rationals for the round-based algorithms:
/// the expansion terminates, the contraction inequalities hold, and the
/// step count obeys 2 ceil(log4 Q) + 2.
pub fn rational_finiteness(p: u64, alg: AlgorithmId, cases: usize, seed: u64) -> Outcome {
    let c = ctx(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p);
    for i in 0..cases {
        // denominators up to 10^18
        let num = loop {
            let n: i128 = rng.gen_range(-1_000_000_000_000_000_000i128..=1_000_000_000_000_000_000);
            if n != 0 {
                break n;
            }
        };
        let den: i128 = rng.gen_range(1..=1_000_000_000_000_000_000i128);
        let x = Rat::new(BigInt::from(num), BigInt::from(den));
        let alpha = Surd::from_rat(c.clone(), x.clone());
        let e = expand(&alpha, alg, 1000).map_err(|e| format!("case {i}: {e}"))?;
        if e.kind != Kind::Finite {
            return Err(format!("case {i}: expansion of {x} did not terminate"));
        }
        let bound = 2 * ceil_log4(x.denom()) + 2;
        if e.quotients.len() as u64 > bound {
            return Err(format!(
                "case {i}: {} steps for {x}, bound {bound}",
                e.quotients.len()
            ));
        }
        let report = audit_bounds(&alpha, alg, &e);
        if !report.all_pass() {
            return Err(format!("case {i}: {x}: {:?}", report.checks));
        }
    }
    Ok(())
}

/// Small-prime periodicity: at p in {2, 3} every admissible sqrt(D) is
/// periodic under the round-based algorithms, the |Q_n| bound holds, and
/// the detected period verifies.
pub fn small_prime_periodicity(p: u64, alg: AlgorithmId, d_max: u64) -> Outcome {
    assert!(p == 2 || p == 3);
    surd_periodicity(p, alg, d_max, 5000)
}

/// Block-3 periodicity at p <= 7 with the |Q_n| <= (p^2/4) M + 1 audit.
pub fn block3_periodicity(p: u64, d_max: u64) -> Outcome {
    assert!(p <= 7);
    surd_periodicity(p, AlgorithmId::Modified, d_max, 2000)
}

fn surd_periodicity(p: u64, alg: AlgorithmId, d_max: u64, cap: usize) -> Outcome {
    let c = ctx(p);
    for d in admissible_d(&c, 2, d_max) {
        let alpha = Surd::from_sqrt(c.clone(), BigInt::from(d), Branch::Plus)
            .map_err(|e| format!("D = {d}: {e}"))?;
        let e = expand(&alpha, alg, cap).map_err(|e| format!("D = {d}: {e}"))?;
        if !matches!(e.kind, Kind::Periodic { .. }) {
            return Err(format!("D = {d}: not periodic within {cap} steps"));
        }
        let bounds = audit_bounds(&alpha, alg, &e);
        if !bounds.all_pass() {
            return Err(format!("D = {d}: bound audit failed: {:?}", bounds.checks));
        }
        let period = verify_period(&alpha, alg, &e).map_err(|e| format!("D = {d}: {e}"))?;
        if !period.all_pass() {
            return Err(format!("D = {d}: period audit failed: {:?}", period.checks));
        }
    }
    Ok(())
}

/// Engine digit extraction vs. the independent rational digit oracle.
pub fn digit_oracle_agreement(p: u64, cases: usize, seed: u64) -> Outcome {
    let c = ctx(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p);
    for i in 0..cases {
        let x = random_rational(&mut rng, 1_000_000_000);
        let (v, want) = padicfrac::rational_digit_oracle(p, &x, 10)
            .map_err(|e| format!("case {i}: {e}"))?;
        let got = Surd::from_rat(c.clone(), x.clone())
            .digits(v, 10)
            .map_err(|e| format!("case {i}: {e}"))?;
        if want != got {
            return Err(format!("case {i}: digits of {x} disagree: {want:?} vs {got:?}"));
        }
    }
    Ok(())
}

/// reconstruct_rational inverts every finite expansion.
pub fn reconstruction_identity(p: u64, algs: &[AlgorithmId], cases: usize, seed: u64) -> Outcome {
    let c = ctx(p);
    let p_big = c.big();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p);
    for i in 0..cases {
        let x = random_rational(&mut rng, 1_000_000);
        let alpha = Surd::from_rat(c.clone(), x.clone());
        for &alg in algs {
            let e = expand(&alpha, alg, 10_000).map_err(|e| format!("case {i}: {e}"))?;
            if e.kind == Kind::Finite {
                let back = padicfrac::reconstruct_rational(p_big, &e.quotients)
                    .map_err(|e| format!("case {i}: {e}"))?;
                if back != x {
                    return Err(format!("case {i} ({alg}): {x} reconstructed as {back}"));
                }
            } else if matches!(alg, AlgorithmId::New | AlgorithmId::Neww | AlgorithmId::Modified) {
                return Err(format!("case {i} ({alg}): rational {x} not finite"));
            }
        }
    }
    Ok(())
}

/// p^k helper re-exported for test assertions.
pub fn p_pow(p: u64, k: u32) -> BigInt {
    pow_p(&BigInt::from(p), k)
}
