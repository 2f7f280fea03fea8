//! The (P_n, Q_n) state machine: quotient selection for the six
//! algorithms, exact state updates, convergents, cycle detection and
//! zero elimination.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::floor::{s1, s_quotient, sbar, t1, t_quotient, tbar, PartialQuotient};
use crate::prime::{Branch, PrimeCtx};
use crate::rat::{pow_p, sign, vp, vp_int, Rat};
use crate::surd::Surd;

/// The expansion algorithms from the literature plus the generalized
/// r-block scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgorithmId {
    Browkin1,
    Browkin4,
    Murru,
    New,
    Neww,
    Modified,
    RBlock(u32),
}

impl AlgorithmId {
    /// Index class (mod this) that, together with (P_n, Q_n), determines
    /// the floor-function choice; part of the cycle-detection state.
    pub fn phase_modulus(self) -> u32 {
        match self {
            AlgorithmId::Browkin1 | AlgorithmId::Browkin4 | AlgorithmId::Murru | AlgorithmId::Neww => 2,
            AlgorithmId::New => 1,
            AlgorithmId::Modified => 3,
            AlgorithmId::RBlock(r) => r,
        }
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgorithmId::Browkin1 => write!(f, "browkin1"),
            AlgorithmId::Browkin4 => write!(f, "browkin4"),
            AlgorithmId::Murru => write!(f, "murru"),
            AlgorithmId::New => write!(f, "new"),
            AlgorithmId::Neww => write!(f, "neww"),
            AlgorithmId::Modified => write!(f, "modified"),
            AlgorithmId::RBlock(r) => write!(f, "rblock{}", r),
        }
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<AlgorithmId> {
        match s {
            "browkin1" => Ok(AlgorithmId::Browkin1),
            "browkin4" => Ok(AlgorithmId::Browkin4),
            "murru" => Ok(AlgorithmId::Murru),
            "new" => Ok(AlgorithmId::New),
            "neww" => Ok(AlgorithmId::Neww),
            "modified" => Ok(AlgorithmId::Modified),
            other => {
                if let Some(r) = other.strip_prefix("rblock") {
                    let r: u32 = r
                        .parse()
                        .map_err(|_| Error::InvalidInput(format!("unknown algorithm {other}")))?;
                    if r < 3 {
                        return Err(Error::BlockTooShort(r));
                    }
                    Ok(AlgorithmId::RBlock(r))
                } else {
                    Err(Error::InvalidInput(format!("unknown algorithm {other}")))
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kind {
    Finite,
    Periodic { preperiod: usize, period: usize },
    Truncated,
}

/// Per-step measurements; the substrate for the invariant suites.
#[derive(Clone, Debug)]
pub struct StepDiag {
    pub vp_alpha: Option<i64>,
    pub vp_b: Option<i64>,
    pub abs_p: BigInt,
    pub abs_q: BigInt,
    pub vp_b_conv: Option<i64>,
}

#[derive(Clone, Debug)]
pub struct Expansion {
    pub p: u64,
    pub alg: AlgorithmId,
    pub kind: Kind,
    pub quotients: Vec<PartialQuotient>,
    pub diagnostics: Vec<StepDiag>,
    /// (A_n, B_n) per step, over Z[1/p].
    pub convergents: Vec<(Rat, Rat)>,
}

impl Expansion {
    pub fn preperiod_len(&self) -> Option<usize> {
        match self.kind {
            Kind::Periodic { preperiod, .. } => Some(preperiod),
            _ => None,
        }
    }

    pub fn period_len(&self) -> Option<usize> {
        match self.kind {
            Kind::Periodic { period, .. } => Some(period),
            _ => None,
        }
    }

    /// The quotients of one full period, when periodic.
    pub fn period_quotients(&self) -> Option<&[PartialQuotient]> {
        match self.kind {
            Kind::Periodic { preperiod, period } => {
                Some(&self.quotients[preperiod..preperiod + period])
            }
            _ => None,
        }
    }
}

/// The floor-function choice for step n of an algorithm.
pub fn choose_quotient(alg: AlgorithmId, alpha: &Surd, n: usize) -> Result<PartialQuotient> {
    let p = alpha.ctx().big();
    match alg {
        AlgorithmId::Browkin1 => {
            if n % 2 == 0 {
                Ok(s_quotient(alpha))
            } else {
                let t = alpha.t();
                if alpha.sub_rat(&t).vp() == Some(0) {
                    Ok(t_quotient(alpha))
                } else {
                    let shifted = &t - Rat::from(BigInt::from(sign(&t)));
                    PartialQuotient::from_rat(p, &shifted)
                }
            }
        }
        AlgorithmId::Browkin4 => {
            if alpha.is_rational() {
                return Err(Error::QuadraticOnly("browkin4".into()));
            }
            if n % 2 == 0 {
                s1(alpha)
            } else {
                t1(alpha)
            }
        }
        AlgorithmId::Murru => {
            if n % 2 == 0 {
                Ok(s_quotient(alpha))
            } else {
                Ok(t_quotient(alpha))
            }
        }
        AlgorithmId::New => {
            if n == 0 {
                return Ok(sbar(alpha));
            }
            let v = alpha.vp().expect("complete quotients are nonzero");
            assert!(v <= 0, "v_p(alpha_n) > 0 cannot occur after a legal step");
            if v < 0 {
                Ok(tbar(alpha))
            } else {
                Ok(sbar(alpha))
            }
        }
        AlgorithmId::Neww => {
            if n % 2 == 0 {
                Ok(sbar(alpha))
            } else {
                Ok(tbar(alpha))
            }
        }
        AlgorithmId::Modified => {
            if n % 3 == 0 {
                Ok(sbar(alpha))
            } else {
                Ok(tbar(alpha))
            }
        }
        AlgorithmId::RBlock(r) => {
            if r < 3 {
                return Err(Error::BlockTooShort(r));
            }
            if n as u32 % r == 0 {
                Ok(sbar(alpha))
            } else {
                Ok(tbar(alpha))
            }
        }
    }
}

/// Element of Z[1/p] as num / p^exp, not necessarily canonical. The
/// convergent recurrence runs on this representation because reduced
/// rationals would pay a full gcd on ever-growing integers every step.
#[derive(Clone)]
struct Zp1 {
    num: BigInt,
    exp: u32,
}

impl Zp1 {
    fn zero() -> Zp1 {
        Zp1 { num: BigInt::zero(), exp: 0 }
    }

    fn one() -> Zp1 {
        Zp1 { num: BigInt::one(), exp: 0 }
    }

    /// b*x + y without any gcd; only powers of p are ever factored out.
    fn combine(p: &BigInt, b: &PartialQuotient, x: &Zp1, y: &Zp1) -> Zp1 {
        let e1 = b.exp() + x.exp;
        let m = e1.max(y.exp);
        let num = b.unit() * &x.num * pow_p(p, m - e1) + &y.num * pow_p(p, m - y.exp);
        Zp1 { num, exp: m }
    }

    /// Reduced rational; the only common factor possible is a power of p.
    fn to_rat(&self, p: &BigInt) -> Rat {
        let g = vp_int(p, &self.num).map_or(self.exp, |v| (v as u32).min(self.exp));
        let num = &self.num / pow_p(p, g);
        Rat::new_raw(num, pow_p(p, self.exp - g))
    }
}

struct EngineState {
    ctx: Arc<PrimeCtx>,
    d: BigInt,
    branch: Branch,
    p_n: BigInt,
    q_n: BigInt,
    // A_{n-2}, A_{n-1}, B_{n-2}, B_{n-1}
    a_pp: Zp1,
    a_p: Zp1,
    b_pp: Zp1,
    b_p: Zp1,
}

impl EngineState {
    fn alpha(&self) -> Surd {
        Surd::raw(
            self.ctx.clone(),
            Rat::from(self.p_n.clone()),
            Rat::from(self.q_n.clone()),
            self.d.clone(),
            self.branch,
        )
    }

    fn push_convergent(&mut self, b: &PartialQuotient) -> (Rat, Rat) {
        let p = self.ctx.big();
        let a_n = Zp1::combine(p, b, &self.a_p, &self.a_pp);
        let b_n = Zp1::combine(p, b, &self.b_p, &self.b_pp);
        let out = (a_n.to_rat(p), b_n.to_rat(p));
        self.a_pp = std::mem::replace(&mut self.a_p, a_n);
        self.b_pp = std::mem::replace(&mut self.b_p, b_n);
        out
    }

    /// One step of Lemma-style state update; division exactness is a
    /// hard invariant, a failure means a normalization bug.
    fn step(&mut self, b: &PartialQuotient, vp_alpha: i64) {
        let p = self.ctx.big();
        let b_val = b.value(p);
        let bq = &b_val * Rat::from(self.q_n.clone());
        assert!(bq.is_integer(), "b_n Q_n must be an integer");
        let bq = bq.to_integer();
        if self.d.is_zero() {
            let e = -vp_alpha;
            let num = &self.p_n - &bq;
            assert!(!num.is_zero(), "finite termination must be caught upstream");
            let (q_next_base, divisor) = if e >= 0 {
                let pe = pow_p(p, e as u32);
                let (q, r) = self.q_n.div_rem(&pe);
                assert!(r.is_zero(), "p^e must divide Q_n");
                (q, pe)
            } else {
                (self.q_n.clone(), BigInt::one())
            };
            let (t, r) = num.div_rem(&divisor);
            assert!(r.is_zero(), "inexact division in rational step");
            // positive-denominator convention: sign rides on P
            self.p_n = if t.is_negative() { -q_next_base } else { q_next_base };
            self.q_n = t.abs();
        } else {
            let p_next = bq - &self.p_n;
            let num = &self.d - &p_next * &p_next;
            let (q_next, r) = num.div_rem(&self.q_n);
            assert!(r.is_zero(), "inexact division in quadratic step");
            assert!(!q_next.is_zero(), "D is non-square");
            self.p_n = p_next;
            self.q_n = q_next;
        }
    }
}

/// Expand `alpha` under `alg` for at most `max_steps` quotients.
pub fn expand(alpha: &Surd, alg: AlgorithmId, max_steps: usize) -> Result<Expansion> {
    if max_steps < 1 {
        return Err(Error::BadStepCap);
    }
    if let AlgorithmId::RBlock(r) = alg {
        if r < 3 {
            return Err(Error::BlockTooShort(r));
        }
    }
    let ctx = alpha.ctx().clone();
    let mut st = if alpha.is_rational() {
        let x = alpha.as_rat().unwrap();
        EngineState {
            ctx: ctx.clone(),
            d: BigInt::zero(),
            branch: Branch::Plus,
            p_n: x.numer().clone(),
            q_n: x.denom().clone(),
            a_pp: Zp1::zero(),
            a_p: Zp1::one(),
            b_pp: Zp1::one(),
            b_p: Zp1::zero(),
        }
    } else {
        let n = alpha.normalize()?;
        EngineState {
            ctx: ctx.clone(),
            d: n.d,
            branch: n.branch,
            p_n: n.p_coef,
            q_n: n.q_coef,
            a_pp: Zp1::zero(),
            a_p: Zp1::one(),
            b_pp: Zp1::one(),
            b_p: Zp1::zero(),
        }
    };
    let phase = alg.phase_modulus() as usize;
    let quadratic = !st.d.is_zero();
    let mut seen: HashMap<(BigInt, BigInt, usize), usize> = HashMap::new();
    let mut quotients = Vec::new();
    let mut diagnostics = Vec::new();
    let mut convergents = Vec::new();

    let mut result_kind = Kind::Truncated;
    for n in 0.. {
        if quadratic {
            let key = (st.p_n.clone(), st.q_n.clone(), n % phase);
            if let Some(&first) = seen.get(&key) {
                let claimed = Kind::Periodic {
                    preperiod: first,
                    period: n - first,
                };
                result_kind = claimed;
                break;
            }
            seen.insert(key, n);
        }
        if n == max_steps {
            result_kind = Kind::Truncated;
            break;
        }
        let alpha_n = st.alpha();
        let vp_alpha = alpha_n.vp();
        let b = choose_quotient(alg, &alpha_n, n)?;
        let b_val = b.value(ctx.big());
        let (a_conv, b_conv) = st.push_convergent(&b);
        diagnostics.push(StepDiag {
            vp_alpha,
            vp_b: b.vp(ctx.big()),
            abs_p: st.p_n.abs(),
            abs_q: st.q_n.abs(),
            vp_b_conv: vp(ctx.big(), &b_conv),
        });
        convergents.push((a_conv, b_conv));
        let finite = !quadratic && alpha_n.as_rat().unwrap() == b_val;
        quotients.push(b.clone());
        if finite {
            result_kind = Kind::Finite;
            break;
        }
        let va = vp_alpha.expect("nonzero complete quotient");
        st.step(&b, va);
    }

    Ok(Expansion {
        p: ctx.p(),
        alg,
        kind: result_kind,
        quotients,
        diagnostics,
        convergents,
    })
}

/// Exact convergent sequence (A_n, B_n) for a quotient list; the
/// determinant identity A_n B_{n-1} - B_n A_{n-1} = (-1)^(n-1) holds at
/// every index.
pub fn convergents(p: &BigInt, quotients: &[PartialQuotient]) -> Vec<(Rat, Rat)> {
    let mut out = Vec::with_capacity(quotients.len());
    let mut a_pp = Rat::zero();
    let mut a_p = Rat::one();
    let mut b_pp = Rat::one();
    let mut b_p = Rat::zero();
    for q in quotients {
        let b = q.value(p);
        let a_n = &b * &a_p + &a_pp;
        let b_n = &b * &b_p + &b_pp;
        a_pp = std::mem::replace(&mut a_p, a_n.clone());
        b_pp = std::mem::replace(&mut b_p, b_n.clone());
        out.push((a_n, b_n));
    }
    out
}

/// Result of folding zero quotients out of a finished expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroEliminated {
    pub quotients: Vec<PartialQuotient>,
    /// A zero in final position has no elimination identity; it is kept
    /// and flagged.
    pub trailing_zero: bool,
}

/// Applies [..., b, 0, c, ...] = [..., b + c, ...] left to right until no
/// interior zero remains.
pub fn zero_eliminate(p: &BigInt, quotients: &[PartialQuotient]) -> ZeroEliminated {
    let mut qs: Vec<PartialQuotient> = quotients.to_vec();
    loop {
        let interior = (1..qs.len().saturating_sub(1)).find(|&i| qs[i].is_zero());
        match interior {
            Some(i) => {
                let merged = qs[i - 1].value(p) + qs[i + 1].value(p);
                let merged = PartialQuotient::from_rat(p, &merged).expect("sum stays in Z[1/p]");
                qs.splice(i - 1..=i + 1, [merged]);
            }
            None => break,
        }
    }
    let trailing_zero = qs.last().is_some_and(|q| q.is_zero()) && qs.len() > 1;
    ZeroEliminated {
        quotients: qs,
        trailing_zero,
    }
}

/// Convergence-condition certificate for the r-block scheme: indices
/// (m, i) where v_p(U_m^(i)) != 0 was required but violated.
#[derive(Clone, Debug, Default)]
pub struct RBlockCertificate {
    pub violations: Vec<(usize, u32)>,
    /// Number of (m, i) conditions actually evaluated.
    pub checked: usize,
}

impl RBlockCertificate {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// U_m^(0) = 1, U_m^(1) = b_m, U_m^(n+1) = b_{m+n} U_m^(n) + U_m^(n-1).
pub fn u_sequence(p: &BigInt, quotients: &[PartialQuotient], m: usize, top: u32) -> Vec<Rat> {
    let mut out = vec![Rat::one()];
    if top == 0 {
        return out;
    }
    out.push(quotients[m].value(p));
    for i in 2..=top as usize {
        let b = quotients[m + i - 1].value(p);
        let next = &b * &out[i - 1] + &out[i - 2];
        out.push(next);
    }
    out
}

/// Runs the r-block scheme and evaluates the block convergence
/// conditions alongside.
pub fn rblock_expand(
    alpha: &Surd,
    r: u32,
    max_steps: usize,
) -> Result<(Expansion, RBlockCertificate)> {
    if r < 3 {
        return Err(Error::BlockTooShort(r));
    }
    let exp = expand(alpha, AlgorithmId::RBlock(r), max_steps)?;
    let p = alpha.ctx().big();
    let mut cert = RBlockCertificate::default();
    let len = exp.quotients.len();
    for block in 0.. {
        let m = r as usize * block + 2;
        // U_m^(i) for i in {2, ..., r-1} needs b_m ... b_{m+r-2}
        if m + (r as usize - 2) >= len {
            break;
        }
        let us = u_sequence(p, &exp.quotients, m, r - 1);
        for i in 2..=r - 1 {
            cert.checked += 1;
            if vp(p, &us[i as usize]) != Some(0) {
                cert.violations.push((m, i));
            }
        }
        if r >= 4 {
            let m3 = r as usize * block + 3;
            if m3 + (r as usize - 3) < len {
                let us = u_sequence(p, &exp.quotients, m3, r - 2);
                for i in 2..=r - 2 {
                    cert.checked += 1;
                    if vp(p, &us[i as usize]) != Some(0) {
                        cert.violations.push((m3, i));
                    }
                }
            }
        }
    }
    Ok((exp, cert))
}
