//! Kolyvagin-prime enumeration, the discrete-log-weighted modular-symbol sums
//! δ_n with their p-divisibility indices, and bounded-search reports with
//! conjecture verdicts.

pub mod delta;
pub mod dlog;
pub mod primes;
pub mod sweep;

use thiserror::Error;

pub use delta::{delta, DeltaResidue, DeltaResult, DivIndex};
pub use dlog::{discrete_log_p_part, dlog_table};
pub use primes::{enumerate_kolyvagin_primes, KolyvaginPrime};
pub use sweep::{sha_prediction, sweep, SearchReport, SweepBounds, Verdict};

#[derive(Debug, Error)]
pub enum KuriharaError {
    #[error("duplicate prime factors in n")]
    DuplicateFactors,
    #[error("eigensymbol is not p-normalized")]
    SymbolNotNormalized,
    #[error("root number unknown; run the symbol layer first")]
    EpsilonUnknown,
    #[error("requested work {estimate} exceeds the budget {budget} (raise --budget to proceed)")]
    BudgetExceeded { estimate: u64, budget: u64 },
    #[error("residue {0} is not a unit modulo {1}")]
    NotAUnit(u64, u64),
    #[error("target exponent {e} exceeds v_p(ℓ-1) = {v}")]
    ExponentTooLarge { e: u32, v: u32 },
    #[error("{0} is not a primitive root modulo {1}")]
    NotPrimitiveRoot(u64, u64),
    #[error("n overflows the supported range")]
    Overflow,
    #[error("curve layer: {0}")]
    Curve(#[from] crate::curves::CurveError),
}
