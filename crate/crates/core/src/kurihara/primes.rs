//! The set 𝓛 of Kolyvagin primes for (E, p): ℓ ≡ 1 (mod p), ℓ ∤ Np,
//! a_ℓ ≡ ℓ + 1 (mod p), optionally filtered by the depth m (e_ℓ ≥ m).

use serde::Serialize;

use crate::arith::{is_primitive_root, primes_up_to, primitive_root, valuation_u64};
use crate::curves::{frobenius_trace, CurveArithmetic};
use crate::kurihara::KuriharaError;

#[derive(Debug, Clone, Serialize)]
pub struct KolyvaginPrime {
    pub ell: u64,
    pub a_ell: i64,
    /// e_ℓ = v_p(I_ℓ) = min(v_p(ℓ-1), v_p(a_ℓ - ℓ - 1))
    pub e: u32,
    /// chosen primitive root mod ℓ
    pub eta: u64,
}

impl KolyvaginPrime {
    pub fn new(ell: u64, a_ell: i64, p: u64) -> Result<Self, KuriharaError> {
        Self::with_eta(ell, a_ell, p, primitive_root(ell))
    }

    /// Same data with a caller-chosen primitive root (used by the
    /// well-definedness checks).
    pub fn with_eta(ell: u64, a_ell: i64, p: u64, eta: u64) -> Result<Self, KuriharaError> {
        if !is_primitive_root(eta, ell) {
            return Err(KuriharaError::NotPrimitiveRoot(eta, ell));
        }
        let e = e_exponent(ell, a_ell, p);
        Ok(KolyvaginPrime { ell, a_ell, e, eta })
    }
}

/// v_p of the ideal I_ℓ = (ℓ-1, a_ℓ-ℓ-1)·Z_p ∩ Z. Hasse keeps a_ℓ - ℓ - 1
/// nonzero, so the value is finite.
pub fn e_exponent(ell: u64, a_ell: i64, p: u64) -> u32 {
    let v1 = valuation_u64(ell - 1, p);
    let d = a_ell - ell as i64 - 1;
    debug_assert!(d != 0);
    let v2 = crate::arith::valuation_i128(d as i128, p);
    v1.min(v2)
}

/// All Kolyvagin primes ℓ ≤ ell_max with e_ℓ ≥ max(m, 1), ascending.
/// The empty list is a valid outcome.
pub fn enumerate_kolyvagin_primes(
    curve: &CurveArithmetic,
    m: u32,
    ell_max: u64,
) -> Result<Vec<KolyvaginPrime>, KuriharaError> {
    let p = curve.p;
    let m = m.max(1);
    let mut out = Vec::new();
    for ell in primes_up_to(ell_max) {
        if ell % p != 1 {
            continue;
        }
        if curve.conductor % ell == 0 || ell == p {
            continue;
        }
        let a_ell = frobenius_trace(&curve.minimal, ell)?;
        if (a_ell - ell as i64 - 1).rem_euclid(p as i64) != 0 {
            continue;
        }
        let kp = KolyvaginPrime::new(ell, a_ell, p)?;
        if kp.e >= m {
            out.push(kp);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{analyze_curve, WeierstrassModel};

    fn curve_11a(p: u64) -> CurveArithmetic {
        let w = WeierstrassModel::from_ai([0, -1, 1, -10, -20]).unwrap();
        analyze_curve(&w, p).unwrap()
    }

    #[test]
    fn membership_11a_p5() {
        let curve = curve_11a(5);
        let list = enumerate_kolyvagin_primes(&curve, 1, 50).unwrap();
        // ℓ = 31: 31 ≡ 1 (mod 5); in iff a_31 ≡ 32 ≡ 2 (mod 5)
        let a31 = frobenius_trace(&curve.minimal, 31).unwrap();
        let expect_31 = (a31 - 32).rem_euclid(5) == 0;
        assert_eq!(list.iter().any(|k| k.ell == 31), expect_31);
        for k in &list {
            assert_eq!(k.ell % 5, 1);
            assert!(k.e >= 1);
            assert_ne!(k.ell, 11, "bad primes excluded");
        }
    }

    #[test]
    fn filtration() {
        let curve = curve_11a(3);
        let l1 = enumerate_kolyvagin_primes(&curve, 1, 400).unwrap();
        let l2 = enumerate_kolyvagin_primes(&curve, 2, 400).unwrap();
        let ells1: Vec<u64> = l1.iter().map(|k| k.ell).collect();
        for k in &l2 {
            assert!(ells1.contains(&k.ell), "m=2 list must embed in m=1 list");
            assert!(k.e >= 2);
        }
    }

    #[test]
    fn bad_prime_never_appears() {
        let curve = curve_11a(5);
        let list = enumerate_kolyvagin_primes(&curve, 1, 600).unwrap();
        assert!(list.iter().all(|k| k.ell != 11));
    }
}
