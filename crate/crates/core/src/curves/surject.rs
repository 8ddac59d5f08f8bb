//! Three-valued heuristic for surjectivity of the mod-p Galois representation.
//!
//! `Surjective` is returned only when sampled Frobenius (trace, determinant)
//! pairs certify the image is all of GL₂(F_p) by the classical maximal
//! subgroup classification; `NotSurjective` only on a rational p-isogeny
//! witness (a rational root of the p-division polynomial). Everything else is
//! `Inconclusive` — the verdict is never a guess.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{mod_inv, mod_mul, primes_up_to};
use crate::curves::count::{divides_disc, frobenius_trace};
use crate::curves::divpoly::division_polynomial;
use crate::curves::weierstrass::WeierstrassModel;
use crate::curves::CurveError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurjectivityVerdict {
    Surjective,
    NotSurjective,
    Inconclusive,
}

/// Search for an integer root of the p-division polynomial: the x-coordinate
/// of a p-isogeny kernel generator that is Galois-stable as a subgroup.
fn rational_isogeny_witness(w: &WeierstrassModel, p: u64) -> Result<bool, CurveError> {
    let f = division_polynomial(w, p as u32);
    let coeffs = &f.0;
    if coeffs.is_empty() {
        return Ok(false);
    }
    if coeffs[0].is_zero() {
        return Ok(true); // x = 0 is a root
    }
    // Cauchy bound: |root| ≤ 1 + max |a_i| / |lead|
    let lead = coeffs.last().unwrap().abs();
    let maxc = coeffs.iter().map(|c| c.abs()).max().unwrap();
    let bound: BigInt = &maxc / &lead + 2;
    let Some(bound) = bound.to_i64() else {
        return Ok(false); // out of witness-search range; stay inconclusive
    };
    if bound > 1_000_000_000 {
        return Ok(false);
    }
    // sieve candidates: an integer root reduces to a root mod q
    let q: u64 = 100_003;
    let qb = BigInt::from(q);
    let mut residues = Vec::new();
    for x in 0..q {
        if f.eval_mod(&BigInt::from(x), &qb).is_zero() {
            residues.push(x as i64);
        }
    }
    for r in residues {
        let mut x = r - ((r + bound) / q as i64) * q as i64;
        while x <= bound {
            if x >= -bound && f.eval(&BigInt::from(x)).is_zero() {
                return Ok(true);
            }
            x += q as i64;
        }
    }
    Ok(false)
}

/// Classify the image of ρ̄_p from sampled Frobenius data.
pub fn mod_p_surjectivity_heuristic(
    w: &WeierstrassModel,
    p: u64,
    sample_bound: u64,
) -> Result<SurjectivityVerdict, CurveError> {
    if rational_isogeny_witness(w, p)? {
        return Ok(SurjectivityVerdict::NotSurjective);
    }
    if p < 5 {
        // GL₂(F_3) is solvable; the subgroup criteria below do not apply
        return Ok(SurjectivityVerdict::Inconclusive);
    }
    // image not contained in: Borel / split Cartan normalizer (cond_b),
    // nonsplit Cartan normalizer (cond_a), exceptional S4/A4/A5 (cond_c)
    let mut cond_a = false;
    let mut cond_b = false;
    let mut cond_c = false;
    for ell in primes_up_to(sample_bound) {
        if ell == p || divides_disc(w, ell) {
            continue;
        }
        let t = (frobenius_trace(w, ell)?).rem_euclid(p as i64) as u64;
        let d = ell % p;
        let disc = (mod_mul(t, t, p) + 4 * p - 4 * d % p) % p;
        if t != 0 && disc != 0 {
            if crate::arith::kronecker(disc as i128, p as i128) == 1 {
                cond_a = true;
            } else {
                cond_b = true;
            }
        }
        if t != 0 {
            let u = mod_mul(mod_mul(t, t, p), mod_inv(d, p).unwrap(), p);
            if u != 1 && u != 2 && u != 4 {
                // u² - 3u + 1 ≠ 0 rules out projective order 5
                let s = (mod_mul(u, u, p) + 4 * p - 3 * u % p + 1) % p;
                if s != 0 {
                    cond_c = true;
                }
            }
        }
        if cond_a && cond_b && cond_c {
            return Ok(SurjectivityVerdict::Surjective);
        }
    }
    Ok(SurjectivityVerdict::Inconclusive)
}

/// Weak CM indicator: a large fraction of vanishing traces over sampled good
/// primes. Used only to annotate reports.
pub fn cm_suspect(w: &WeierstrassModel, sample_bound: u64) -> Result<bool, CurveError> {
    let mut total = 0u32;
    let mut zero = 0u32;
    for ell in primes_up_to(sample_bound).into_iter().skip(2) {
        if divides_disc(w, ell) {
            continue;
        }
        total += 1;
        if frobenius_trace(w, ell)? == 0 {
            zero += 1;
        }
    }
    Ok(total >= 20 && 3 * zero > total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: [i64; 5]) -> WeierstrassModel {
        WeierstrassModel::from_ai(a).unwrap()
    }

    #[test]
    fn rational_torsion_is_a_witness() {
        // 11a has rational 5-torsion
        let w = m([0, -1, 1, -10, -20]);
        assert_eq!(
            mod_p_surjectivity_heuristic(&w, 5, 100).unwrap(),
            SurjectivityVerdict::NotSurjective
        );
    }

    #[test]
    fn surjective_case() {
        // 37a mod 5 is surjective
        let w = m([0, 0, 1, -1, 0]);
        assert_eq!(
            mod_p_surjectivity_heuristic(&w, 5, 10_000).unwrap(),
            SurjectivityVerdict::Surjective
        );
    }

    #[test]
    fn cm_curve_never_certified_surjective() {
        // y² = x³ + 1 has CM; the heuristic must not return Surjective at 7
        let w = m([0, 0, 0, 0, 1]);
        let v = mod_p_surjectivity_heuristic(&w, 7, 5_000).unwrap();
        assert_ne!(v, SurjectivityVerdict::Surjective);
        assert!(cm_suspect(&w, 300).unwrap());
        assert!(!cm_suspect(&m([0, -1, 1, -10, -20]), 300).unwrap());
    }
}
