//! Discrete logarithms in the p-Sylow quotient of F_ℓ^×, by Pohlig-Hellman
//! restricted to the p-part: project to the order-p^v subgroup and solve
//! digit by digit.

use crate::arith::{mod_inv, mod_mul, mod_pow, valuation_u64};
use crate::kurihara::KuriharaError;

/// The image in Z/p^e of log_{η}(a), where log is the full discrete log
/// modulo ℓ-1. Requires e ≤ v_p(ℓ-1) and gcd(a, ℓ) = 1.
pub fn discrete_log_p_part(
    ell: u64,
    eta: u64,
    a: u64,
    p: u64,
    e: u32,
) -> Result<u64, KuriharaError> {
    let a = a % ell;
    if a == 0 {
        return Err(KuriharaError::NotAUnit(0, ell));
    }
    let v = valuation_u64(ell - 1, p);
    if e > v {
        return Err(KuriharaError::ExponentTooLarge { e, v });
    }
    if e == 0 {
        return Ok(0);
    }
    let cofactor = (ell - 1) / p.pow(v);
    // project into the cyclic p-Sylow subgroup of order p^v
    let g = mod_pow(eta, cofactor, ell); // generator of order p^v
    let t = mod_pow(a, cofactor, ell);
    // gamma has order exactly p
    let gamma = mod_pow(g, p.pow(v - 1), ell);
    debug_assert_ne!(gamma, 1);
    let mut x = 0u64;
    let g_inv = mod_inv(g, ell).unwrap();
    let mut cur = t;
    for i in 0..v {
        // strip known digits: cur = t · g^{-x}, then raise to p^{v-1-i}
        let probe = mod_pow(cur, p.pow(v - 1 - i), ell);
        // probe = gamma^{digit}
        let mut digit = 0u64;
        let mut acc = 1u64;
        while acc != probe {
            acc = mod_mul(acc, gamma, ell);
            digit += 1;
            assert!(digit < p, "digit search failed: not in the cyclic subgroup");
        }
        x += digit * p.pow(i);
        cur = mod_mul(cur, mod_pow(g_inv, digit * p.pow(i), ell), ell);
    }
    Ok(x % p.pow(e))
}

/// Per-residue table of discrete_log_p_part(ℓ, η, ·, p, e) for a in 1..ℓ,
/// built by enumerating powers of η. `table[a]` is the log of a; entry 0 is
/// unused. Values are exact lifts in [0, p^e).
pub fn dlog_table(ell: u64, eta: u64, p: u64, e: u32) -> Vec<u32> {
    let pe = p.pow(e);
    let mut table = vec![0u32; ell as usize];
    let mut cur = 1u64;
    for k in 0..ell - 1 {
        table[cur as usize] = (k % pe) as u32;
        cur = mod_mul(cur, eta, ell);
    }
    debug_assert_eq!(cur, 1);
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_example() {
        // ℓ=11, η=2, a=8: 2³ = 8, so the full log is 3; mod 5 it is 3
        assert_eq!(discrete_log_p_part(11, 2, 8, 5, 1).unwrap(), 3);
        // identity always maps to 0
        for ell in [11u64, 31, 41] {
            let eta = crate::arith::primitive_root(ell);
            assert_eq!(discrete_log_p_part(ell, eta, 1, 5, 1).unwrap(), 0);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(discrete_log_p_part(11, 2, 0, 5, 1).is_err());
        assert!(discrete_log_p_part(11, 2, 3, 5, 2).is_err()); // v_5(10) = 1 < 2
    }

    #[test]
    fn matches_brute_force_table() {
        // full brute-force dlog table vs the Pohlig-Hellman path
        for (ell, p) in [(31u64, 5u64), (41, 5), (109, 3), (101, 5)] {
            let eta = crate::arith::primitive_root(ell);
            let v = crate::arith::valuation_u64(ell - 1, p);
            for e in 1..=v {
                let pe = p.pow(e);
                // brute table: log of eta^k is k
                let mut cur = 1u64;
                for k in 0..ell - 1 {
                    assert_eq!(
                        discrete_log_p_part(ell, eta, cur, p, e).unwrap(),
                        k % pe,
                        "ell={ell} e={e} k={k}"
                    );
                    cur = mod_mul(cur, eta, ell);
                }
                // and the batch table agrees with the op
                let table = dlog_table(ell, eta, p, e);
                let mut cur = 1u64;
                for k in 0..ell - 1 {
                    assert_eq!(table[cur as usize] as u64, k % pe);
                    cur = mod_mul(cur, eta, ell);
                }
            }
        }
    }

    #[test]
    fn homomorphism_property() {
        let (ell, p, e) = (101u64, 5u64, 2u32);
        let eta = crate::arith::primitive_root(ell);
        let pe = p.pow(e);
        for a in [3u64, 17, 55] {
            for b in [7u64, 91, 100] {
                let la = discrete_log_p_part(ell, eta, a, p, e).unwrap();
                let lb = discrete_log_p_part(ell, eta, b, p, e).unwrap();
                let lab = discrete_log_p_part(ell, eta, mod_mul(a, b, ell), p, e).unwrap();
                assert_eq!((la + lb) % pe, lab);
            }
        }
    }
}
