//! Long Weierstrass models over Q with exact integer invariants, coordinate
//! transformations, and global minimal model reduction (Laska-Kraus-Connell).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{factor_u64, valuation_bigint};
use crate::curves::CurveError;

/// An integral long Weierstrass model y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6
/// with its derived quantities. Construction rejects singular equations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeierstrassModel {
    pub a1: BigInt,
    pub a2: BigInt,
    pub a3: BigInt,
    pub a4: BigInt,
    pub a6: BigInt,
    pub b2: BigInt,
    pub b4: BigInt,
    pub b6: BigInt,
    pub b8: BigInt,
    pub c4: BigInt,
    pub c6: BigInt,
    pub disc: BigInt,
}

impl WeierstrassModel {
    pub fn new(a: [BigInt; 5]) -> Result<Self, CurveError> {
        let [a1, a2, a3, a4, a6] = a;
        let b2 = &a1 * &a1 + 4 * &a2;
        let b4 = 2 * &a4 + &a1 * &a3;
        let b6 = &a3 * &a3 + 4 * &a6;
        let b8 = &a1 * &a1 * &a6 + 4 * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3
            - &a4 * &a4;
        let c4 = &b2 * &b2 - 24 * &b4;
        let c6 = -&b2 * &b2 * &b2 + 36 * &b2 * &b4 - 216 * &b6;
        let disc: BigInt = -&b2 * &b2 * &b8 - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6
            + 9 * &b2 * &b4 * &b6;
        if disc.is_zero() {
            return Err(CurveError::Singular);
        }
        debug_assert_eq!(BigInt::from(4) * &b8, &b2 * &b6 - &b4 * &b4);
        debug_assert_eq!(BigInt::from(1728) * &disc, &c4 * &c4 * &c4 - &c6 * &c6);
        Ok(WeierstrassModel {
            a1,
            a2,
            a3,
            a4,
            a6,
            b2,
            b4,
            b6,
            b8,
            c4,
            c6,
            disc,
        })
    }

    pub fn from_ai(a: [i64; 5]) -> Result<Self, CurveError> {
        Self::new(a.map(BigInt::from))
    }

    pub fn a_invariants(&self) -> [&BigInt; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
    }

    /// j-invariant as a reduced fraction (num, den).
    pub fn j_invariant(&self) -> (BigInt, BigInt) {
        let num = &self.c4 * &self.c4 * &self.c4;
        let den = self.disc.clone();
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / &g, den / g);
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        (n, d)
    }

    /// Apply the substitution x = u²x' + r, y = u³y' + u²s·x' + t.
    /// All divisions must be exact; u must be nonzero.
    pub fn transform(&self, u: &BigInt, r: &BigInt, s: &BigInt, t: &BigInt) -> Self {
        assert!(!u.is_zero());
        let a1 = &self.a1 + 2 * s;
        let a2 = &self.a2 - s * &self.a1 + 3 * r - s * s;
        let a3 = &self.a3 + r * &self.a1 + 2 * t;
        let a4 = &self.a4 - s * &self.a3 + 2 * r * &self.a2 - (t + r * s) * &self.a1
            + 3 * r * r
            - 2 * s * t;
        let a6 = &self.a6 + r * &self.a4 + r * r * &self.a2 + r * r * r
            - t * (&self.a3 + t + r * &self.a1);
        let u2 = u * u;
        let u3 = &u2 * u;
        let u4 = &u2 * &u2;
        let u6 = &u3 * &u3;
        for (num, den) in [(&a1, u), (&a2, &u2), (&a3, &u3), (&a4, &u4), (&a6, &u6)] {
            assert!(
                (num % den).is_zero(),
                "non-integral transformation (u={u}, r={r}, s={s}, t={t})"
            );
        }
        let m = Self::new([&a1 / u, &a2 / &u2, &a3 / &u3, &a4 / &u4, &a6 / &u6])
            .expect("transform preserves nonsingularity");
        debug_assert_eq!(&m.disc * u6.pow(2), self.disc);
        m
    }

    /// Translation-only normalization to the standard reduced form with
    /// a1, a3 ∈ {0, 1} and a2 ∈ {-1, 0, 1}.
    pub fn reduced(&self) -> Self {
        let one = BigInt::one();
        let a1_red = self.a1.mod_floor(&BigInt::from(2));
        let s: BigInt = -(&self.a1 - &a1_red) / 2;
        let m = self.transform(&one, &BigInt::zero(), &s, &BigInt::zero());
        // a2 + 3r ∈ {-1, 0, 1}
        let a2_red: BigInt = (&m.a2 + BigInt::one()).mod_floor(&BigInt::from(3)) - BigInt::one();
        let r: BigInt = -((&m.a2 - &a2_red) / BigInt::from(3));
        let m = m.transform(&one, &r, &BigInt::zero(), &BigInt::zero());
        let a3_red = m.a3.mod_floor(&BigInt::from(2));
        let t: BigInt = -(&m.a3 - &a3_red) / 2;
        m.transform(&one, &BigInt::zero(), &BigInt::zero(), &t)
    }
}

/// Try to build an integral model with invariants exactly (c4, c6).
///
/// Scans b2 over a full residue system mod 48; any existing integral model has
/// b2 in one of those classes, and every surviving candidate is verified
/// against (c4, c6) exactly.
fn model_from_c4c6(c4: &BigInt, c6: &BigInt) -> Option<WeierstrassModel> {
    for b2_i in -47i64..=48 {
        let b2 = BigInt::from(b2_i);
        let r4 = b2_i.rem_euclid(4);
        if r4 != 0 && r4 != 1 {
            continue;
        }
        let num_b4: BigInt = &b2 * &b2 - c4;
        if !(&num_b4 % BigInt::from(24)).is_zero() {
            continue;
        }
        let b4: BigInt = num_b4 / BigInt::from(24);
        let num_b6: BigInt = -c6 - &b2 * &b2 * &b2 + 36 * &b2 * &b4;
        if !(&num_b6 % BigInt::from(216)).is_zero() {
            continue;
        }
        let b6: BigInt = num_b6 / BigInt::from(216);
        let b6r = b6.mod_floor(&BigInt::from(4));
        if b6r > BigInt::one() {
            continue;
        }
        let a1 = b2.mod_floor(&BigInt::from(2));
        let a3 = b6.mod_floor(&BigInt::from(2));
        let num_a4: BigInt = &b4 - &a1 * &a3;
        if !(&num_a4 % BigInt::from(2)).is_zero() {
            continue;
        }
        let a2 = (&b2 - &a1) / 4;
        let a4 = num_a4 / 2;
        let a6 = (&b6 - &a3) / 4;
        if let Ok(m) = WeierstrassModel::new([a1, a2, a3, a4, a6]) {
            if &m.c4 == c4 && &m.c6 == c6 {
                return Some(m);
            }
        }
    }
    None
}

fn factor_bigint_abs(n: &BigInt) -> Result<Vec<(u64, u32)>, CurveError> {
    let n = n.abs();
    let Some(u) = n.to_u64() else {
        return Err(CurveError::TooLarge);
    };
    Ok(factor_u64(u))
}

/// Global minimal model in standard reduced form (Laska-Kraus-Connell).
///
/// The result has minimal |discriminant| among all integral models of the
/// curve, and is the unique reduced representative.
pub fn minimal_model(w: &WeierstrassModel) -> Result<WeierstrassModel, CurveError> {
    // largest u with u⁴ | c4 and u⁶ | c6 (prime by prime)
    let mut u0 = BigInt::one();
    let primes: Vec<u64> = if w.c4.is_zero() {
        factor_bigint_abs(&w.c6)?.into_iter().map(|(p, _)| p).collect()
    } else if w.c6.is_zero() {
        factor_bigint_abs(&w.c4)?.into_iter().map(|(p, _)| p).collect()
    } else {
        let g = w.c4.gcd(&w.c6);
        let mut ps: Vec<u64> = factor_bigint_abs(&g)?.into_iter().map(|(p, _)| p).collect();
        // a prime can divide u without dividing gcd(c4,c6) only via large powers
        for extra in factor_bigint_abs(&w.c4.gcd(&(&w.c6 * &w.c6)))? {
            if !ps.contains(&extra.0) {
                ps.push(extra.0);
            }
        }
        ps
    };
    for p in primes {
        let vc4 = if w.c4.is_zero() {
            u32::MAX
        } else {
            valuation_bigint(&w.c4, p)
        };
        let vc6 = if w.c6.is_zero() {
            u32::MAX
        } else {
            valuation_bigint(&w.c6, p)
        };
        let e = (vc4 / 4).min(vc6 / 6);
        if e > 0 {
            u0 *= BigInt::from(p).pow(e);
        }
    }
    // only 2 and 3 can obstruct; try u0, u0/2, u0/3, u0/6 in descending order
    let mut candidates = vec![u0.clone()];
    for d in [2u32, 3, 6] {
        let d = BigInt::from(d);
        if (&u0 % &d).is_zero() {
            candidates.push(&u0 / &d);
        }
    }
    candidates.sort();
    candidates.dedup();
    candidates.reverse();
    for u in candidates {
        let u4 = u.pow(4);
        let u6 = u.pow(6);
        let c4 = &w.c4 / &u4;
        let c6 = &w.c6 / &u6;
        if let Some(m) = model_from_c4c6(&c4, &c6) {
            let red = m.reduced();
            debug_assert_eq!(&red.disc * u.pow(12), w.disc);
            return Ok(red);
        }
    }
    Err(CurveError::Internal("minimal model reduction failed".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: [i64; 5]) -> WeierstrassModel {
        WeierstrassModel::from_ai(a).unwrap()
    }

    #[test]
    fn invariants_of_11a() {
        let w = m([0, -1, 1, -10, -20]);
        assert_eq!(w.disc, BigInt::from(-161051)); // -11^5
        assert_eq!(w.c4, BigInt::from(496));
        assert_eq!(w.c6, BigInt::from(20008));
    }

    #[test]
    fn rejects_singular() {
        assert!(WeierstrassModel::from_ai([0, 0, 0, 0, 0]).is_err());
        assert!(WeierstrassModel::from_ai([0, 0, 0, -3, 2]).is_err()); // disc = 0
    }

    #[test]
    fn transform_roundtrip() {
        let w = m([1, -2, 3, -4, 5]);
        let u = BigInt::from(1);
        let t = w.transform(&u, &BigInt::from(3), &BigInt::from(-2), &BigInt::from(7));
        assert_eq!(t.disc, w.disc);
        assert_eq!(t.c4, w.c4);
        // scaling up by u=2: x = (1/4) x'' means a_i'' = a_i * 2^i
        let big = m([2, -8, 24, -64, 320]);
        let back = big.transform(&BigInt::from(2), &BigInt::zero(), &BigInt::zero(), &BigInt::zero());
        assert_eq!(back, w);
    }

    #[test]
    fn minimal_model_fixed_points() {
        // already-minimal curves come back unchanged
        for a in [[0i64, -1, 1, -10, -20], [1, 0, 0, 0, 1], [0, 0, 1, -1, 0]] {
            let w = m(a);
            assert_eq!(minimal_model(&w).unwrap(), w, "{a:?}");
        }
    }

    #[test]
    fn minimal_model_scales_down() {
        // [0,0,0,0,64] = u=2 blowup of [0,0,0,0,1]
        let w = m([0, 0, 0, 0, 64]);
        assert_eq!(minimal_model(&w).unwrap(), m([0, 0, 0, 0, 1]));
        // a (u,r,s,t)-mangled 11a comes back to the reduced 11a
        let w = m([0, -1, 1, -10, -20]).transform(
            &BigInt::from(1),
            &BigInt::from(2),
            &BigInt::from(-1),
            &BigInt::from(5),
        );
        // inverse transform: scale up then minimalize
        let big = WeierstrassModel::new([
            &w.a1 * 2,
            &w.a2 * 4,
            &w.a3 * 8,
            &w.a4 * 16,
            &w.a6 * 64,
        ])
        .unwrap();
        assert_eq!(minimal_model(&big).unwrap(), m([0, -1, 1, -10, -20]));
    }

    #[test]
    fn minimal_model_preserves_j() {
        let w = m([0, 0, 0, 0, 64]);
        let mm = minimal_model(&w).unwrap();
        assert_eq!(w.j_invariant(), mm.j_invariant());
    }

    #[test]
    fn no_further_reduction_possible() {
        // oracle: on a minimal model, no prime q has q⁴|c4 and q⁶|c6 with a
        // reconstructible quotient
        for a in [[0i64, -1, 1, -10, -20], [1, 0, 0, 0, 1]] {
            let w = minimal_model(&m(a)).unwrap();
            for q in [2u32, 3, 5, 7, 11] {
                let q4 = BigInt::from(q).pow(4);
                let q6 = BigInt::from(q).pow(6);
                if (&w.c4 % &q4).is_zero() && (&w.c6 % &q6).is_zero() {
                    assert!(
                        model_from_c4c6(&(&w.c4 / &q4), &(&w.c6 / &q6)).is_none(),
                        "curve {a:?} admits reduction at {q}"
                    );
                }
            }
        }
    }
}
