//! Independent, deliberately naive re-implementations used to validate
//! the engine: digit oracle, rational reconstruction, period
//! re-verification and theorem-bound audits.
//!
//! Nothing here shares code with the engine's state machine; the loops
//! below recompute complete quotients with plain surd arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::engine::{choose_quotient, AlgorithmId, Expansion, Kind};
use crate::error::{Error, Result};
use crate::floor::PartialQuotient;
use crate::rat::Rat;
use crate::surd::{BalancedDigit, Surd};

/// One audited subject with its check outcomes; failing checks always
/// carry a concrete witness.
#[derive(Clone, Debug)]
pub struct AuditReport {
    pub subject: String,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub witness_index: Option<usize>,
    pub witness: Option<String>,
}

impl AuditReport {
    pub fn new(subject: impl Into<String>) -> AuditReport {
        AuditReport {
            subject: subject.into(),
            checks: Vec::new(),
        }
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass: true,
            witness_index: None,
            witness: None,
        });
    }

    pub fn fail(&mut self, name: impl Into<String>, index: usize, witness: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass: false,
            witness_index: Some(index),
            witness: Some(witness.into()),
        });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Balanced digits of a nonzero rational from its valuation through index
/// K, by the straight-line loop: balanced residue of num * den^-1 mod p,
/// subtract, divide by p.
pub fn rational_digit_oracle(p: u64, x: &Rat, through: i64) -> Result<(i64, Vec<BalancedDigit>)> {
    if x.is_zero() {
        return Err(Error::ZeroValue);
    }
    let p_big = BigInt::from(p);
    // valuation by hand
    let mut v = 0i64;
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    while num.mod_floor(&p_big).is_zero() {
        num /= &p_big;
        v += 1;
    }
    while den.mod_floor(&p_big).is_zero() {
        den /= &p_big;
        v -= 1;
    }
    let mut digits = Vec::new();
    let mut u = BigRational::new(num, den);
    let mut idx = v;
    while idx <= through {
        // residue of u mod p without any modular-inverse shortcut:
        // search the balanced set for the digit with v_p(u - d) > 0
        let mut found = None;
        let half = if p == 2 { 1 } else { ((p - 1) / 2) as i64 };
        let lo = if p == 2 { 0 } else { -half };
        for cand in lo..=half {
            let diff = &u - BigRational::from(BigInt::from(cand));
            if diff.is_zero() || diff.numer().mod_floor(&p_big).is_zero() {
                found = Some(cand);
                break;
            }
        }
        let d = found.expect("balanced residue exists");
        digits.push(BalancedDigit(d));
        u = (&u - BigRational::from(BigInt::from(d))) / BigRational::from(p_big.clone());
        idx += 1;
    }
    Ok((v, digits))
}

/// Evaluates [b0, b1, ..., bN] back to front; errors on a malformed list
/// whose tail evaluates to zero mid-way.
pub fn reconstruct_rational(p: &BigInt, quotients: &[PartialQuotient]) -> Result<Rat> {
    let mut acc: Option<Rat> = None;
    for q in quotients.iter().rev() {
        let b = q.value(p);
        acc = Some(match acc {
            None => b,
            Some(tail) => {
                if tail.is_zero() {
                    return Err(Error::InvalidInput("malformed continued fraction".into()));
                }
                b + tail.recip()
            }
        });
    }
    acc.ok_or_else(|| Error::InvalidInput("empty quotient list".into()))
}

/// Complete quotient as exact coefficients (u, w) with alpha = u + w*sqrt(D).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct PlainState {
    u: Rat,
    w: Rat,
}

/// Recompute the expansion with plain surd arithmetic (no Lemma state
/// machine): alpha' = 1/(alpha - b) via (u + w sqrt(D))^-1 =
/// (u - w sqrt(D)) / (u^2 - w^2 D).
fn plain_trajectory(
    alpha: &Surd,
    alg: AlgorithmId,
    steps: usize,
) -> Result<(Vec<PlainState>, Vec<PartialQuotient>)> {
    let ctx = alpha.ctx().clone();
    let d = alpha.d().clone();
    let branch = alpha.branch();
    let mut u = alpha.p_coef() / alpha.q_coef();
    let mut w = if d.is_zero() {
        Rat::zero()
    } else {
        (alpha.q_coef()).recip()
    };
    let mut states = Vec::with_capacity(steps + 1);
    let mut quotients = Vec::with_capacity(steps);
    for n in 0..=steps {
        states.push(PlainState {
            u: u.clone(),
            w: w.clone(),
        });
        if n == steps {
            break;
        }
        // rebuild a Surd view for the floor functions: alpha = (u/w' + sqrt D)/(1/w)
        let view = if d.is_zero() {
            Surd::from_rat(ctx.clone(), u.clone())
        } else {
            let q = w.recip();
            Surd::raw(ctx.clone(), &u * &q, q, d.clone(), branch)
        };
        let b = choose_quotient(alg, &view, n)?;
        let b_val = b.value(ctx.big());
        quotients.push(b);
        let du = &u - &b_val;
        if d.is_zero() {
            if du.is_zero() {
                break; // finite
            }
            u = du.recip();
        } else {
            // 1/(du + w sqrt(D))
            let denom = &du * &du - &w * &w * Rat::from(d.clone());
            u = &du / &denom;
            w = -&w / &denom;
        }
    }
    Ok((states, quotients))
}

/// Re-verifies a Periodic result from scratch: state equality at the
/// claimed indices, quotient equality over one full period, agreement
/// with the engine's quotients, and minimality of the first recurrence.
pub fn verify_period(alpha: &Surd, alg: AlgorithmId, result: &Expansion) -> Result<AuditReport> {
    let (preperiod, period) = match result.kind {
        Kind::Periodic { preperiod, period } => (preperiod, period),
        _ => {
            return Err(Error::InvalidInput(
                "verify_period requires a Periodic result".into(),
            ))
        }
    };
    let mut report = AuditReport::new(format!(
        "verify_period p={} alg={} pre={} period={}",
        result.p, alg, preperiod, period
    ));
    let horizon = preperiod + 2 * period;
    let (states, quotients) = plain_trajectory(alpha, alg, horizon)?;

    if states[preperiod] == states[preperiod + period] {
        report.pass("state equality at (preperiod, preperiod+period)");
    } else {
        report.fail(
            "state equality at (preperiod, preperiod+period)",
            preperiod,
            format!("{:?} != {:?}", states[preperiod], states[preperiod + period]),
        );
    }

    let mut quotient_cycle_ok = true;
    for k in 0..period {
        if quotients[preperiod + k] != quotients[preperiod + period + k] {
            report.fail(
                "quotient cycle repeats",
                preperiod + k,
                format!(
                    "{:?} != {:?}",
                    quotients[preperiod + k],
                    quotients[preperiod + period + k]
                ),
            );
            quotient_cycle_ok = false;
            break;
        }
    }
    if quotient_cycle_ok {
        report.pass("quotient cycle repeats");
    }

    let shared = result.quotients.len().min(quotients.len());
    if result.quotients[..shared] == quotients[..shared] {
        report.pass("engine quotients agree with independent loop");
    } else {
        let i = (0..shared)
            .find(|&i| result.quotients[i] != quotients[i])
            .unwrap_or(0);
        report.fail(
            "engine quotients agree with independent loop",
            i,
            format!("{:?} != {:?}", result.quotients[i], quotients[i]),
        );
    }

    // minimality: no recurrence with matching phase strictly before the
    // claimed one (naive scan)
    let m = alg.phase_modulus() as usize;
    let mut minimal = true;
    'outer: for i in 0..preperiod + period {
        for j in (i + 1)..=(preperiod + period) {
            if (j - i) % m != 0 {
                continue;
            }
            if states[i] == states[j] {
                if i == preperiod && j == preperiod + period {
                    continue;
                }
                report.fail(
                    "first recurrence is minimal",
                    i,
                    format!("earlier recurrence at ({i}, {j})"),
                );
                minimal = false;
                break 'outer;
            }
        }
    }
    if minimal {
        report.pass("first recurrence is minimal");
    }
    Ok(report)
}

fn max_rat(items: impl IntoIterator<Item = Rat>) -> Rat {
    items
        .into_iter()
        .fold(None::<Rat>, |acc, x| match acc {
            None => Some(x),
            Some(a) => Some(if x > a { x } else { a }),
        })
        .expect("nonempty")
}

/// Evaluates every theorem bound applicable to the (p, algorithm, input)
/// combination against the recorded diagnostics.
pub fn audit_bounds(alpha: &Surd, alg: AlgorithmId, result: &Expansion) -> AuditReport {
    let p = result.p;
    let mut report = AuditReport::new(format!("audit_bounds p={p} alg={alg}"));
    let rational = alpha.is_rational();
    let p2_over_4 = Rat::new(BigInt::from(p * p), BigInt::from(4));

    if rational && matches!(alg, AlgorithmId::New | AlgorithmId::Neww) {
        // contraction: |P_{n+2}| < |P_{n+1}|/2 and |Q_{n+2}| < |Q_n|/4
        let d = &result.diagnostics;
        let mut ok = true;
        for n in 0..d.len().saturating_sub(2) {
            let p_ok = Rat::from(d[n + 2].abs_p.clone()) < Rat::new(d[n + 1].abs_p.clone(), 2.into());
            let q_ok = Rat::from(d[n + 2].abs_q.clone()) < Rat::new(d[n].abs_q.clone(), 4.into());
            if !p_ok || !q_ok {
                report.fail(
                    "finiteness contraction",
                    n,
                    format!(
                        "|P_{}|={} |P_{}|={} |Q_{}|={} |Q_{}|={}",
                        n + 2,
                        d[n + 2].abs_p,
                        n + 1,
                        d[n + 1].abs_p,
                        n + 2,
                        d[n + 2].abs_q,
                        n,
                        d[n].abs_q
                    ),
                );
                ok = false;
                break;
            }
        }
        if ok {
            report.pass("finiteness contraction");
        }

        // step bound 2*ceil(log4 Q) + 2, audited against the proof
        if result.kind == Kind::Finite {
            let q = alpha.as_rat().unwrap().denom().clone();
            let bound = 2 * ceil_log4(&q) + 2;
            if result.quotients.len() as u64 <= bound {
                report.pass("rational step bound");
            } else {
                report.fail(
                    "rational step bound",
                    result.quotients.len(),
                    format!("{} steps > bound {bound} for Q = {q}", result.quotients.len()),
                );
            }
        }
    }

    if !rational && (p == 2 || p == 3) && matches!(alg, AlgorithmId::New | AlgorithmId::Neww) {
        // |Q_n| <= M = max(|Q_0|, |Q_1|, (p^2/4)|D| + 1)
        let d_abs = Rat::from(normalized_d(alpha).abs());
        let q0 = Rat::from(result.diagnostics[0].abs_q.clone());
        let q1 = result
            .diagnostics
            .get(1)
            .map(|s| Rat::from(s.abs_q.clone()))
            .unwrap_or_else(Rat::zero);
        let m = max_rat([q0, q1, &p2_over_4 * &d_abs + Rat::one()]);
        check_q_bound(&mut report, "small-prime Q bound", result, &m);
    }

    if !rational && p <= 7 && alg == AlgorithmId::Modified {
        // |Q_n| <= (p^2/4) M + 1, M = max(|Q|, (p^2/4)|D| + 1, 4(p^2+1)/3)
        let d_abs = Rat::from(normalized_d(alpha).abs());
        let q0 = Rat::from(result.diagnostics[0].abs_q.clone());
        let m = max_rat([
            q0,
            &p2_over_4 * &d_abs + Rat::one(),
            Rat::new(BigInt::from(4 * (p * p + 1)), BigInt::from(3)),
        ]);
        let bound = &p2_over_4 * &m + Rat::one();
        check_q_bound(&mut report, "block-3 Q bound", result, &bound);
    }

    report
}

fn normalized_d(alpha: &Surd) -> BigInt {
    alpha
        .normalize()
        .map(|n| n.d)
        .unwrap_or_else(|_| BigInt::zero())
}

fn check_q_bound(report: &mut AuditReport, name: &str, result: &Expansion, bound: &Rat) {
    for (n, d) in result.diagnostics.iter().enumerate() {
        if &Rat::from(d.abs_q.clone()) > bound {
            report.fail(name, n, format!("|Q_{n}| = {} > {bound}", d.abs_q));
            return;
        }
    }
    report.pass(name);
}

/// ceil(log4 q) for q >= 1.
pub fn ceil_log4(q: &BigInt) -> u64 {
    let mut bound = BigInt::one();
    let four = BigInt::from(4);
    let mut k = 0u64;
    while &bound < q {
        bound *= &four;
        k += 1;
    }
    k
}
