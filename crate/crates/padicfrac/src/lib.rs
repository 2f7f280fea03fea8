//! Exact arithmetic for p-adic continued fractions of rationals and
//! quadratic irrationals.
//!
//! The crate expands a value alpha in Q_p — either a rational P/Q or a
//! surd (P + sqrt(D))/Q — under several floor-function schemes, with all
//! arithmetic over exact big rationals: no floating point anywhere.
//! Expansions terminate, become periodic, or are truncated at a step
//! cap, and every run carries per-step diagnostics so the known
//! invariants (valuation patterns, convergent identities, boundedness of
//! the surd state) can be audited after the fact.
//!
//! ```
//! use std::sync::Arc;
//! use num_bigint::BigInt;
//! use padicfrac::{expand, AlgorithmId, Kind, PrimeCtx, Rat, Surd};
//!
//! let ctx = Arc::new(PrimeCtx::new(5)?);
//! let x = Surd::from_rat(ctx, Rat::new(BigInt::from(973), BigInt::from(234)));
//! let e = expand(&x, AlgorithmId::Neww, 100)?;
//! assert_eq!(e.kind, Kind::Finite);
//! assert_eq!(e.quotients.len(), 6);
//! # Ok::<(), padicfrac::Error>(())
//! ```

pub mod engine;
pub mod error;
pub mod floor;
pub mod oracle;
pub mod prime;
pub mod rat;
pub mod report;
pub mod surd;
pub mod sweep;

pub use engine::{
    convergents, expand, rblock_expand, u_sequence, zero_eliminate, AlgorithmId, Expansion, Kind,
    RBlockCertificate, StepDiag, ZeroEliminated,
};
pub use error::{Error, Result};
pub use floor::{s1, s_quotient, sbar, t1, t_quotient, tbar, PartialQuotient};
pub use oracle::{
    audit_bounds, rational_digit_oracle, reconstruct_rational, verify_period, AuditReport, Check,
};
pub use prime::{Branch, PrimeCtx};
pub use rat::{round_nearest, vp, vp_int, Rat};
pub use surd::{balanced_residue, BalancedDigit, NormalizedSurd, Surd};

/// The long-form guide, mirrored from `book/` so every code block in it
/// compiles and runs as a doc-test of this crate.
pub mod guide {
    #[doc = include_str!("../../../book/src/overview.md")]
    pub mod overview {}
    #[doc = include_str!("../../../book/src/exact-arithmetic.md")]
    pub mod exact_arithmetic {}
    #[doc = include_str!("../../../book/src/padic-square-roots.md")]
    pub mod padic_square_roots {}
    #[doc = include_str!("../../../book/src/surds-and-state.md")]
    pub mod surds_and_state {}
    #[doc = include_str!("../../../book/src/algorithms.md")]
    pub mod algorithms {}
    #[doc = include_str!("../../../book/src/periodicity.md")]
    pub mod periodicity {}
    #[doc = include_str!("../../../book/src/verification.md")]
    pub mod verification {}
    #[doc = include_str!("../../../book/src/sweeps.md")]
    pub mod sweeps {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
