//! Exact modular symbols for Γ₀(N): Manin-symbol presentation of the plus
//! quotient, Hecke operators, eigensymbol extraction with p-integral
//! normalization, and fast evaluation of [a/n]. No floating point anywhere.

pub mod cache;
pub mod eigen;
pub mod eval;
pub mod hecke;
pub mod linalg;
pub mod p1;
pub mod space;

use thiserror::Error;

pub use eigen::{atkin_lehner_sign, normalize_p_integral, rational_eigensymbol, EigenSymbol};
pub use eval::{FastEval, NumSum};
pub use hecke::{fricke_matrix, hecke_matrix};
pub use p1::P1Table;
pub use space::{build_plus_space, ManinSymbolSpace};

#[derive(Debug, Error)]
pub enum ModSymError {
    #[error("space has level {space} but the curve has conductor {curve}")]
    LevelMismatch { space: u64, curve: u64 },
    #[error("no cusp forms at level {0}")]
    NoCuspforms(u64),
    #[error("probe prime {0} divides the level; use good primes")]
    BadProbe(u64),
    #[error("eigenvalue mismatch at probe {probe} on level {level}: curve is not attached to this space")]
    EigenvalueMismatch { level: u64, probe: u64 },
    #[error("eigenspace still {remaining_dim}-dimensional; supply more probe primes")]
    NeedMoreProbes { remaining_dim: usize },
    #[error("zero symbol cannot be normalized")]
    ZeroSymbol,
    #[error("curve layer: {0}")]
    Curve(crate::curves::CurveError),
    #[error("internal consistency: {0}")]
    Internal(String),
}
