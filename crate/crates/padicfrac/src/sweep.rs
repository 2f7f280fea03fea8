//! Batch harness: admissible-D enumeration, the periodicity table and a
//! corpus audit driver. Parallel over independent inputs, with results
//! reduced in key order so output bytes never depend on thread count.

use std::sync::Arc;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::engine::{expand, AlgorithmId, Kind};
use crate::error::{Error, Result};
use crate::oracle::{
    audit_bounds, rational_digit_oracle, reconstruct_rational, verify_period, AuditReport,
};
use crate::prime::{Branch, PrimeCtx};
use crate::rat::Rat;
use crate::surd::{is_perfect_square, Surd};

/// Everything a table or audit run depends on; `resolved_pairs` renders
/// it back out so outputs carry their own provenance.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub primes: Vec<u64>,
    pub d_min: u64,
    pub d_max: u64,
    /// Step cap for every algorithm except the `neww` small-prime case.
    pub max_steps: usize,
    /// Step cap for `neww` at p <= 31.
    pub neww_small_prime_steps: usize,
    pub threads: Option<usize>,
    /// Seed for randomized audit corpora.
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> SweepConfig {
        SweepConfig {
            primes: vec![3, 5, 7],
            d_min: 1,
            d_max: 1000,
            max_steps: 1000,
            neww_small_prime_steps: 5000,
            threads: None,
            seed: 1,
        }
    }
}

impl SweepConfig {
    /// Step cap for one (algorithm, prime) pair.
    pub fn cap(&self, alg: AlgorithmId, p: u64) -> usize {
        if alg == AlgorithmId::Neww && p <= 31 {
            self.neww_small_prime_steps
        } else {
            self.max_steps
        }
    }

    /// Parses flat `key = value` lines; `#` starts a comment. Unknown
    /// keys are rejected so typos cannot silently revert to defaults.
    pub fn apply_kv_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("config line {}: expected key = value", lineno + 1)))?;
            self.apply_kv(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Applies one override; shared by config files and CLI flags.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::InvalidInput(format!("config key {key}: bad {what} `{value}`"));
        match key {
            "primes" => {
                self.primes = value
                    .split(',')
                    .map(|s| s.trim().parse::<u64>().map_err(|_| bad("prime list")))
                    .collect::<Result<Vec<_>>>()?;
            }
            "d_min" => self.d_min = value.parse().map_err(|_| bad("integer"))?,
            "d_max" => self.d_max = value.parse().map_err(|_| bad("integer"))?,
            "max_steps" => self.max_steps = value.parse().map_err(|_| bad("integer"))?,
            "neww_small_prime_steps" => {
                self.neww_small_prime_steps = value.parse().map_err(|_| bad("integer"))?
            }
            "threads" => self.threads = Some(value.parse().map_err(|_| bad("integer"))?),
            "seed" => self.seed = value.parse().map_err(|_| bad("integer"))?,
            other => return Err(Error::InvalidInput(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// The fully resolved configuration as ordered key/value pairs.
    pub fn resolved_pairs(&self) -> Vec<(String, String)> {
        let primes = self
            .primes
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",");
        vec![
            ("primes".into(), primes),
            ("d_min".into(), self.d_min.to_string()),
            ("d_max".into(), self.d_max.to_string()),
            ("max_steps".into(), self.max_steps.to_string()),
            (
                "neww_small_prime_steps".into(),
                self.neww_small_prime_steps.to_string(),
            ),
            // threads is deliberately omitted: it cannot affect results,
            // and echoing it would break byte-stability across
            // parallelism degrees
            ("seed".into(), self.seed.to_string()),
        ]
    }
}

/// One table row: how many admissible D in range became periodic under
/// each algorithm within its step cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub p: u64,
    pub murru: u64,
    pub browkin1: u64,
    pub neww: u64,
    pub modified: u64,
    pub total: u64,
}

/// Non-square D in [d_min, d_max] with sqrt(D) in Q_p.
pub fn admissible_d(ctx: &PrimeCtx, d_min: u64, d_max: u64) -> Vec<u64> {
    (d_min.max(1)..=d_max)
        .filter(|&d| {
            let d = BigInt::from(d);
            !is_perfect_square(&d) && ctx.sqrt_in_qp(&d).unwrap_or(false)
        })
        .collect()
}

fn is_periodic(ctx: &Arc<PrimeCtx>, d: u64, alg: AlgorithmId, cap: usize) -> bool {
    let alpha = Surd::from_sqrt(ctx.clone(), BigInt::from(d), Branch::Plus)
        .expect("admissible D");
    matches!(
        expand(&alpha, alg, cap).expect("sqrt input is valid for every algorithm").kind,
        Kind::Periodic { .. }
    )
}

/// One row of the periodicity table for prime `p`.
pub fn table_row(config: &SweepConfig, p: u64) -> Result<SweepRow> {
    let ctx = Arc::new(PrimeCtx::new(p)?);
    let ds = admissible_d(&ctx, config.d_min, config.d_max);
    // per-D tallies are summed; u64 addition is order-independent, so the
    // parallel reduce is deterministic
    let (murru, browkin1, neww, modified) = ds
        .par_iter()
        .map(|&d| {
            (
                u64::from(is_periodic(&ctx, d, AlgorithmId::Murru, config.cap(AlgorithmId::Murru, p))),
                u64::from(is_periodic(&ctx, d, AlgorithmId::Browkin1, config.cap(AlgorithmId::Browkin1, p))),
                u64::from(is_periodic(&ctx, d, AlgorithmId::Neww, config.cap(AlgorithmId::Neww, p))),
                u64::from(is_periodic(&ctx, d, AlgorithmId::Modified, config.cap(AlgorithmId::Modified, p))),
            )
        })
        .reduce(
            || (0, 0, 0, 0),
            |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 + b.3),
        );
    Ok(SweepRow {
        p,
        murru,
        browkin1,
        neww,
        modified,
        total: ds.len() as u64,
    })
}

/// The full table, rows sorted by p.
pub fn run_table(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let mut primes = config.primes.clone();
    primes.sort_unstable();
    primes.dedup();
    primes.iter().map(|&p| table_row(config, p)).collect()
}

/// A random rational with nonzero numerator, both parts bounded by
/// `magnitude` in absolute value.
pub fn random_rational(rng: &mut impl Rng, magnitude: i64) -> Rat {
    let num = loop {
        let n = rng.gen_range(-magnitude..=magnitude);
        if n != 0 {
            break n;
        }
    };
    let den = rng.gen_range(1..=magnitude);
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Digit-oracle agreement and reconstruction identity over a seeded
/// random corpus, plus period verification and bound audits over the
/// admissible surds of the config. Every failure carries a witness.
pub fn audit_corpus(config: &SweepConfig, rational_cases: usize) -> Result<Vec<AuditReport>> {
    let mut reports = Vec::new();
    for &p in &config.primes {
        let ctx = Arc::new(PrimeCtx::new(p)?);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ p);
        let mut digit_report = AuditReport::new(format!("digit oracle agreement p={p}"));
        let mut recon_report = AuditReport::new(format!("reconstruction identity p={p}"));
        let mut digit_ok = true;
        let mut recon_ok = true;
        for i in 0..rational_cases {
            let x = random_rational(&mut rng, 1_000_000);
            let surd = Surd::from_rat(ctx.clone(), x.clone());
            let (v, oracle_digits) = rational_digit_oracle(p, &x, 8)?;
            let engine_digits = surd.digits(v, 8)?;
            if digit_ok && oracle_digits != engine_digits {
                digit_report.fail("digits agree", i, format!("x = {x}"));
                digit_ok = false;
            }
            let e = expand(&surd, AlgorithmId::Neww, 10_000)?;
            if recon_ok && e.kind == Kind::Finite {
                let back = reconstruct_rational(ctx.big(), &e.quotients)?;
                if back != x {
                    recon_report.fail("reconstruct inverts expand", i, format!("x = {x}, got {back}"));
                    recon_ok = false;
                }
            }
        }
        if digit_ok {
            digit_report.pass("digits agree");
        }
        if recon_ok {
            recon_report.pass("reconstruct inverts expand");
        }
        reports.push(digit_report);
        reports.push(recon_report);

        // every admissible surd in range: bound audits always, period
        // verification whenever the engine claims periodicity
        for alg in [AlgorithmId::Neww, AlgorithmId::Modified] {
            let ds = admissible_d(&ctx, config.d_min, config.d_max);
            let audits: Vec<AuditReport> = ds
                .par_iter()
                .map(|&d| {
                    let alpha = Surd::from_sqrt(ctx.clone(), BigInt::from(d), Branch::Plus)
                        .expect("admissible D");
                    let e = expand(&alpha, alg, config.cap(alg, p)).expect("valid input");
                    let mut report = audit_bounds(&alpha, alg, &e);
                    report.subject = format!("{} D={d}", report.subject);
                    if matches!(e.kind, Kind::Periodic { .. }) {
                        let vp = verify_period(&alpha, alg, &e).expect("periodic result");
                        report.checks.extend(vp.checks);
                    }
                    report
                })
                .collect();
            reports.extend(audits);
        }
    }
    Ok(reports)
}
