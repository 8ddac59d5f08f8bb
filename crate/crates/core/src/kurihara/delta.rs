//! The quantities δ_n = Σ_{(a,n)=1} [a/n]·∏_{ℓ|n} log_ℓ(a) mod I_n and their
//! p-divisibility indices M(n).
//!
//! The sum is accumulated as an exact rational over the symbol's fixed
//! denominator (integer lifts of the log digits, machine integers with a
//! big-integer spill), and reduced once at the end through Z_(p) → Z/p^{e_n}.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{mod_inv, mod_mul, valuation_bigint, valuation_u64};
use crate::kurihara::dlog::dlog_table;
use crate::kurihara::primes::KolyvaginPrime;
use crate::kurihara::KuriharaError;
use crate::modsym::{EigenSymbol, FastEval, NumSum};

/// p-divisibility index of a residue class: M(n), ∞ encoded as Vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DivIndex {
    Finite(u32),
    Vanishes,
}

impl DivIndex {
    pub fn finite(&self) -> Option<u32> {
        match self {
            DivIndex::Finite(v) => Some(*v),
            DivIndex::Vanishes => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DeltaResidue {
    /// the class of δ_n in Z/p^{e_n}
    ModPe { value: u64, modulus_exp: u32 },
    /// n = 1: the exact rational δ_1 (I_1 = 0)
    Exact(BigRational),
}

#[derive(Debug, Clone)]
pub struct DeltaResult {
    pub n: u64,
    pub factors: Vec<u64>,
    /// e_n = min e_ℓ; None for n = 1
    pub e_n: Option<u32>,
    pub residue: DeltaResidue,
    pub m: DivIndex,
}

/// δ for a set of distinct Kolyvagin primes (empty set = δ_1 = [0/1]).
pub fn delta(
    sym: &EigenSymbol,
    factors: &[KolyvaginPrime],
) -> Result<DeltaResult, KuriharaError> {
    let tables: Vec<Vec<u32>> = factors
        .iter()
        .map(|k| dlog_table(k.ell, k.eta, sym.p, k.e))
        .collect();
    let refs: Vec<&[u32]> = tables.iter().map(|t| t.as_slice()).collect();
    delta_with_tables(sym, factors, &refs, &vec![0u64; factors.len()])
}

/// δ with caller-provided log tables and per-prime lift offsets (each offset
/// is added to every table entry; offsets that are multiples of ℓ-1 must not
/// change the residue, which the well-definedness tests exercise).
pub fn delta_with_tables(
    sym: &EigenSymbol,
    factors: &[KolyvaginPrime],
    tables: &[&[u32]],
    lift_offsets: &[u64],
) -> Result<DeltaResult, KuriharaError> {
    if !sym.p_normalized {
        return Err(KuriharaError::SymbolNotNormalized);
    }
    let p = sym.p;
    {
        let mut ells: Vec<u64> = factors.iter().map(|k| k.ell).collect();
        ells.sort_unstable();
        ells.dedup();
        if ells.len() != factors.len() {
            return Err(KuriharaError::DuplicateFactors);
        }
    }
    if factors.is_empty() {
        let exact = sym.evaluate(0, 1);
        let m = if exact.is_zero() {
            DivIndex::Vanishes
        } else {
            let vnum = valuation_bigint(exact.numer(), p) as i64;
            let vden = valuation_bigint(exact.denom(), p) as i64;
            debug_assert!(vden == 0, "normalized symbol has p-integral values");
            DivIndex::Finite((vnum - vden) as u32)
        };
        return Ok(DeltaResult {
            n: 1,
            factors: vec![],
            e_n: None,
            residue: DeltaResidue::Exact(exact),
            m,
        });
    }

    let mut n: u64 = 1;
    for k in factors {
        n = n.checked_mul(k.ell).ok_or(KuriharaError::Overflow)?;
    }
    let e_n = factors.iter().map(|k| k.e).min().unwrap();
    let pe = p.checked_pow(e_n).ok_or(KuriharaError::Overflow)?;

    let fast = FastEval::new(sym);
    let mut acc: i128 = 0;
    let mut acc_big = BigInt::zero();
    let ells: Vec<u64> = factors.iter().map(|k| k.ell).collect();
    for a in 1..n {
        let mut w: u128 = 1;
        let mut skip = false;
        for (i, &ell) in ells.iter().enumerate() {
            let r = a % ell;
            if r == 0 {
                skip = true;
                break;
            }
            let lift = tables[i][r as usize] as u128 + lift_offsets[i] as u128;
            w = w.checked_mul(lift).ok_or(KuriharaError::Overflow)?;
            // a lift of 0 kills the whole term
            if w == 0 {
                break;
            }
        }
        if skip || w == 0 {
            continue;
        }
        match fast.numerator_sum(a, n) {
            NumSum::Small(s) if w <= i64::MAX as u128 => {
                let term = s as i128 * w as i128;
                match acc.checked_add(term) {
                    Some(v) => acc = v,
                    None => {
                        acc_big += BigInt::from(acc);
                        acc = term;
                    }
                }
            }
            NumSum::Small(s) => {
                acc_big += BigInt::from(s) * BigInt::from(w);
            }
            NumSum::Big(b) => {
                acc_big += b * BigInt::from(w);
            }
        }
    }
    acc_big += BigInt::from(acc);

    // reduce the exact rational acc_big / common_den modulo p^{e_n}
    let pe_big = BigInt::from(pe);
    let num_mod = acc_big.mod_floor(&pe_big).to_u64().unwrap();
    let den_mod = sym.common_den.mod_floor(&pe_big).to_u64().unwrap();
    let den_inv = mod_inv(den_mod, pe).ok_or(KuriharaError::NotAUnit(den_mod, pe))?;
    let value = mod_mul(num_mod, den_inv, pe);
    let m = if value == 0 {
        DivIndex::Vanishes
    } else {
        DivIndex::Finite(valuation_u64(value, p))
    };
    Ok(DeltaResult {
        n,
        factors: ells,
        e_n: Some(e_n),
        residue: DeltaResidue::ModPe {
            value,
            modulus_exp: e_n,
        },
        m,
    })
}

/// Euler phi of the squarefree product, the per-n work unit of a sweep.
pub fn phi_of_product(factors: &[KolyvaginPrime]) -> u64 {
    factors.iter().map(|k| k.ell - 1).product::<u64>().max(1)
}

impl DeltaResult {
    /// Residue as a decimal string (numerator/denominator form for n = 1).
    pub fn residue_string(&self) -> String {
        match &self.residue {
            DeltaResidue::ModPe { value, .. } => value.to_string(),
            DeltaResidue::Exact(r) => {
                if r.denom().abs() == BigInt::from(1) {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{analyze_curve, WeierstrassModel};
    use crate::modsym::{build_plus_space, normalize_p_integral, rational_eigensymbol};

    fn symbol_11a(p: u64) -> (EigenSymbol, crate::curves::CurveArithmetic) {
        let w = WeierstrassModel::from_ai([0, -1, 1, -10, -20]).unwrap();
        let curve = analyze_curve(&w, p).unwrap();
        let space = build_plus_space(11).unwrap();
        let sym = rational_eigensymbol(&space, &curve, &[2, 3]).unwrap();
        (normalize_p_integral(&sym, p).unwrap(), curve)
    }

    #[test]
    fn delta_one_unit_at_7() {
        let (sym, _) = symbol_11a(7);
        let d = delta(&sym, &[]).unwrap();
        assert_eq!(d.n, 1);
        assert_eq!(d.m, DivIndex::Finite(0));
        assert_eq!(d.e_n, None);
    }

    #[test]
    fn duplicates_rejected() {
        let (sym, _) = symbol_11a(7);
        let k = KolyvaginPrime::new(29, 0, 7);
        // a_29 value irrelevant for the duplicate check
        if let Ok(k) = k {
            let err = delta(&sym, &[k.clone(), k]).unwrap_err();
            assert!(matches!(err, KuriharaError::DuplicateFactors));
        }
    }

    #[test]
    fn non_normalized_rejected() {
        let (sym, _) = symbol_11a(7);
        let raw = crate::modsym::cache::scaled_by_p_for_tests(&sym);
        assert!(matches!(
            delta(&raw, &[]).err(),
            Some(KuriharaError::SymbolNotNormalized)
        ));
    }

    #[test]
    fn single_prime_delta_runs() {
        let (sym, curve) = symbol_11a(7);
        let list =
            crate::kurihara::primes::enumerate_kolyvagin_primes(&curve, 1, 150).unwrap();
        assert!(!list.is_empty());
        let d = delta(&sym, &list[..1]).unwrap();
        assert_eq!(d.factors.len(), 1);
        // wrong parity for 11a (ε = +1, ν = 1): must vanish
        assert_eq!(d.m, DivIndex::Vanishes);
    }

    #[test]
    fn order_of_factors_irrelevant() {
        let (sym, curve) = symbol_11a(3);
        let list =
            crate::kurihara::primes::enumerate_kolyvagin_primes(&curve, 1, 120).unwrap();
        if list.len() >= 2 {
            let d1 = delta(&sym, &[list[0].clone(), list[1].clone()]).unwrap();
            let d2 = delta(&sym, &[list[1].clone(), list[0].clone()]).unwrap();
            assert_eq!(d1.residue, d2.residue);
            assert_eq!(d1.m, d2.m);
        }
    }
}
