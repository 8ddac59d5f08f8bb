//! Exact-arithmetic library for desk-scale verification of refined
//! nonvanishing conjectures attached to an elliptic curve over Q: modular
//! symbol delta quantities and their p-divisibility indices, conjecture
//! verdicts against the Tamagawa valuation, and the Heegner-side arithmetic
//! predictions.

pub mod arith;
pub mod curves;
pub mod heegner;
pub mod kurihara;
pub mod modsym;
pub mod numeric;
pub mod pipeline;
pub mod report;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
