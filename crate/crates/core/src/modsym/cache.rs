//! Persistent eigensymbol cache: a versioned record keyed by
//! (tool_version, N, a-invariants, p) holding the normalized value table as
//! exact integer pairs. Round-trips are bit-exact; stale versions are
//! ignored, never migrated.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::curves::WeierstrassModel;
use crate::modsym::eigen::EigenSymbol;
use crate::modsym::p1::P1Table;

pub const CACHE_FORMAT: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
pub struct SymbolRecord {
    pub format: u32,
    pub tool_version: String,
    pub level: u64,
    pub a_invariants: [String; 5],
    pub p: u64,
    /// numerators in P¹ class order, decimal strings
    pub values: Vec<String>,
    pub common_den: String,
    pub probe_eigenvalues: Vec<(u64, i64)>,
    pub scale_applied: (String, String),
    pub epsilon: i8,
    pub plus_dim: usize,
    pub cuspidal_dim: usize,
}

fn a_strings(w: &WeierstrassModel) -> [String; 5] {
    [
        w.a1.to_string(),
        w.a2.to_string(),
        w.a3.to_string(),
        w.a4.to_string(),
        w.a6.to_string(),
    ]
}

pub fn cache_file_name(w: &WeierstrassModel, p: u64) -> String {
    let a = a_strings(w);
    format!(
        "sym_N{}_{}_{}_{}_{}_{}_p{}.json",
        "x", a[0], a[1], a[2], a[3], a[4], p
    )
    .replace("Nx", "curve")
}

#[derive(Debug, Clone)]
pub struct CachedSymbol {
    pub symbol: EigenSymbol,
    pub epsilon: i8,
    pub plus_dim: usize,
    pub cuspidal_dim: usize,
}

pub fn record_from(
    sym: &EigenSymbol,
    w: &WeierstrassModel,
    epsilon: i8,
    plus_dim: usize,
    cuspidal_dim: usize,
) -> SymbolRecord {
    SymbolRecord {
        format: CACHE_FORMAT,
        tool_version: crate::TOOL_VERSION.to_string(),
        level: sym.level,
        a_invariants: a_strings(w),
        p: sym.p,
        values: sym.values.iter().map(|v| v.to_string()).collect(),
        common_den: sym.common_den.to_string(),
        probe_eigenvalues: sym.probe_eigenvalues.clone(),
        scale_applied: (
            sym.scale_applied.numer().to_string(),
            sym.scale_applied.denom().to_string(),
        ),
        epsilon,
        plus_dim,
        cuspidal_dim,
    }
}

/// Write-temp-then-rename; concurrent writers settle on a whole file.
pub fn store(dir: &Path, w: &WeierstrassModel, p: u64, record: &SymbolRecord) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(cache_file_name(w, p));
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        cache_file_name(w, p),
        std::process::id()
    ));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(serde_json::to_string(record)?.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, &path)?;
    Ok(path)
}

/// Load a cached symbol if present and keyed identically (including the tool
/// version). Any mismatch or parse failure is treated as a miss.
pub fn load(dir: &Path, w: &WeierstrassModel, p: u64) -> Option<CachedSymbol> {
    let path = dir.join(cache_file_name(w, p));
    let text = std::fs::read_to_string(path).ok()?;
    let rec: SymbolRecord = serde_json::from_str(&text).ok()?;
    if rec.format != CACHE_FORMAT
        || rec.tool_version != crate::TOOL_VERSION
        || rec.a_invariants != a_strings(w)
        || rec.p != p
    {
        return None;
    }
    let values: Option<Vec<BigInt>> = rec.values.iter().map(|s| s.parse().ok()).collect();
    let values = values?;
    let common_den: BigInt = rec.common_den.parse().ok()?;
    let p1 = Arc::new(P1Table::new(rec.level));
    if p1.count() != values.len() {
        return None;
    }
    let scale = BigRational::new(
        rec.scale_applied.0.parse().ok()?,
        rec.scale_applied.1.parse().ok()?,
    );
    Some(CachedSymbol {
        symbol: EigenSymbol {
            level: rec.level,
            p: rec.p,
            values,
            common_den,
            probe_eigenvalues: rec.probe_eigenvalues.clone(),
            scale_applied: scale,
            p_normalized: true,
            p1,
        },
        epsilon: rec.epsilon,
        plus_dim: rec.plus_dim,
        cuspidal_dim: rec.cuspidal_dim,
    })
}

/// Convenience: the error type when a requested cache directory is unusable.
pub fn cache_dir_from_env() -> Option<PathBuf> {
    std::env::var_os("DELTASWEEP_CACHE_DIR").map(PathBuf::from)
}

impl EigenSymbol {
    /// Bit-exact equality of the mathematical content (used by round-trip
    /// tests; p1 tables are reconstructed deterministically from the level).
    pub fn same_table(&self, other: &EigenSymbol) -> bool {
        self.level == other.level
            && self.p == other.p
            && self.values == other.values
            && self.common_den == other.common_den
    }
}

/// A symbol scaled to not-necessarily-unit content, for fault-injection tests.
pub fn scaled_by_p_for_tests(sym: &EigenSymbol) -> EigenSymbol {
    let mut out = sym.clone();
    for v in out.values.iter_mut() {
        *v = &*v * BigInt::from(sym.p);
    }
    out.scale_applied = &out.scale_applied * BigRational::from(BigInt::from(sym.p));
    out.p_normalized = false;
    let _ = BigRational::one();
    out
}
