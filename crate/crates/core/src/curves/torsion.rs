//! Order of the p-primary local torsion E(Q_p)[p^∞] at a good odd prime.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::arith::{kronecker, valuation_bigint, valuation_u64};
use crate::curves::count::{count_points, divides_disc};
use crate::curves::divpoly::{division_polynomial, two_torsion_poly, zp_roots, ZpRoot};
use crate::curves::weierstrass::WeierstrassModel;
use crate::curves::CurveError;

/// Result of probing #E(Q_p)[p^∞] = p^t.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorsionOrder {
    Exact(u32),
    /// probing depth was exhausted before every branch was certified
    LowerBound(u32),
}

impl TorsionOrder {
    pub fn value(&self) -> u32 {
        match self {
            TorsionOrder::Exact(t) | TorsionOrder::LowerBound(t) => *t,
        }
    }
}

/// t with p^t = #E(Q_p)[p^∞], for an odd prime p of good reduction.
///
/// Torsion injects into Ẽ(F_p), whose p-part has order at most p by the Hasse
/// bound, so t ∈ {0, 1}: either p ∤ #Ẽ(F_p) (then t = 0 immediately), or the
/// p-division polynomial is searched for a Z_p root whose y-coordinate is
/// defined over Q_p. `depth` bounds the p-adic precision of the root search.
pub fn local_p_torsion_order(
    w: &WeierstrassModel,
    p: u64,
    depth: u32,
) -> Result<TorsionOrder, CurveError> {
    if p < 3 || !crate::arith::is_prime_u64(p) {
        return Err(CurveError::NotPrime(p));
    }
    if divides_disc(w, p) {
        return Err(CurveError::BadReduction(p));
    }
    let count = count_points(w, p)?;
    if count % p != 0 {
        return Ok(TorsionOrder::Exact(0));
    }
    debug_assert_eq!(valuation_u64(count, p), 1, "Hasse forces v_p(#Ẽ) ≤ 1 for p ≥ 3");
    let f = division_polynomial(w, p as u32);
    let b = two_torsion_poly(w);
    let mut target = 16u32;
    loop {
        let (roots, exhausted) = zp_roots(&f, p, depth, target);
        let mut unresolved = false;
        for root in roots.iter().filter(|r| r.certified) {
            match y_coordinate_solvable(p, root, &b)? {
                Some(true) => return Ok(TorsionOrder::Exact(1)),
                Some(false) => {}
                None => unresolved = true,
            }
        }
        if unresolved {
            // the valuation of the y-discriminant was not yet visible at this
            // precision; retry deeper
            target *= 2;
            if target > 4096 {
                return Err(CurveError::Internal(
                    "valuation of y-discriminant did not stabilize".into(),
                ));
            }
            continue;
        }
        if exhausted && roots.iter().any(|r| !r.certified) {
            // some branch could not be resolved within `depth`
            return Ok(TorsionOrder::LowerBound(0));
        }
        return Ok(TorsionOrder::Exact(0));
    }
}

/// Is there y ∈ Q_p with (x0, y) on the curve, for a certified ψ_p-root x0?
/// Equivalent to B(x0) = (2y + a1·x0 + a3)² being a square in Q_p; B(x0) ≠ 0
/// exactly (a point cannot have order both 2 and p), so the valuation is
/// finite and visible at some precision. Returns None when not yet visible.
fn y_coordinate_solvable(
    p: u64,
    root: &ZpRoot,
    b: &crate::curves::divpoly::ZPoly,
) -> Result<Option<bool>, CurveError> {
    let prec = root.known;
    let modulus = BigInt::from(p).pow(prec);
    let d = b.eval_mod(&root.approx, &modulus);
    if d.is_zero() {
        return Ok(None);
    }
    let v = valuation_bigint(&d, p);
    if v + 1 >= prec {
        return Ok(None);
    }
    if v % 2 != 0 {
        return Ok(Some(false));
    }
    let unit = (&d / BigInt::from(p).pow(v)).mod_floor(&BigInt::from(p));
    let unit_u = num_traits::ToPrimitive::to_u64(&unit).unwrap();
    Ok(Some(kronecker(unit_u as i128, p as i128) == 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: [i64; 5]) -> WeierstrassModel {
        WeierstrassModel::from_ai(a).unwrap()
    }

    #[test]
    fn torsion_injects() {
        // p ∤ #Ẽ(F_p) forces t = 0: 11a at 7 has a_7 = -2, #Ẽ = 10
        let w = m([0, -1, 1, -10, -20]);
        assert_eq!(local_p_torsion_order(&w, 7, 8).unwrap(), TorsionOrder::Exact(0));
    }

    #[test]
    fn rational_five_torsion_on_11a() {
        // (5, 5) has order 5 and #Ẽ(F_5) = 10, so t = 1
        let w = m([0, -1, 1, -10, -20]);
        assert_eq!(local_p_torsion_order(&w, 5, 8).unwrap(), TorsionOrder::Exact(1));
    }

    #[test]
    fn bad_reduction_rejected() {
        let w = m([0, -1, 1, -10, -20]);
        assert!(local_p_torsion_order(&w, 11, 8).is_err());
    }

    #[test]
    fn monotone_in_depth() {
        let w = m([0, -1, 1, -10, -20]);
        let mut last = 0;
        for depth in [2u32, 4, 8, 16] {
            let t = local_p_torsion_order(&w, 5, depth).unwrap().value();
            assert!(t >= last);
            last = t;
        }
        assert_eq!(last, 1);
    }
}
