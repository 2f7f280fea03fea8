//! Engine vs. independent oracles: digit streams on 10^4 random
//! rationals per prime, and the reconstruction identity on every finite
//! expansion.

mod common;

use common::*;
use padicfrac::AlgorithmId;

const PRIMES: [u64; 5] = [3, 5, 7, 11, 13];
const SEED: u64 = 0x5eed_0002;

#[test]
fn digits_agree_with_independent_oracle() {
    for p in PRIMES {
        digit_oracle_agreement(p, 10_000, SEED).unwrap();
    }
}

#[test]
fn reconstruction_inverts_finite_expansions() {
    let algs = [
        AlgorithmId::New,
        AlgorithmId::Neww,
        AlgorithmId::Modified,
        AlgorithmId::Murru,
        AlgorithmId::Browkin1,
    ];
    for p in PRIMES {
        reconstruction_identity(p, &algs, 1000, SEED).unwrap();
    }
}
