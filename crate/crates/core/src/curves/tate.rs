//! Tate's algorithm: Kodaira type, conductor exponent and Tamagawa number of
//! a minimal Weierstrass model at a prime.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{kronecker, mod_inv, valuation_bigint};
use crate::curves::weierstrass::WeierstrassModel;
use crate::curves::CurveError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KodairaType {
    /// I0 is good reduction; In (n ≥ 1) multiplicative.
    I(u32),
    II,
    III,
    IV,
    /// In* (n ≥ 0).
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl std::fmt::Display for KodairaType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KodairaType::I(n) => write!(f, "I{n}"),
            KodairaType::II => write!(f, "II"),
            KodairaType::III => write!(f, "III"),
            KodairaType::IV => write!(f, "IV"),
            KodairaType::IStar(n) => write!(f, "I{n}*"),
            KodairaType::IVStar => write!(f, "IV*"),
            KodairaType::IIIStar => write!(f, "III*"),
            KodairaType::IIStar => write!(f, "II*"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    Good,
    SplitMult,
    NonsplitMult,
    Additive,
}

/// Local data of E at a prime ℓ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalData {
    pub ell: u64,
    pub f: u32,
    pub kodaira: KodairaType,
    pub c: u64,
    pub reduction: Reduction,
}

fn val(x: &BigInt, p: u64) -> Option<u32> {
    if x.is_zero() {
        None
    } else {
        Some(valuation_bigint(x, p))
    }
}

fn val_ge(x: &BigInt, p: u64, k: u32) -> bool {
    val(x, p).map_or(true, |v| v >= k)
}

fn val_lt(x: &BigInt, p: u64, k: u32) -> bool {
    !val_ge(x, p, k)
}

/// (x / p^k) mod p, asserting exact division.
fn quo_res(x: &BigInt, p: u64, k: u32) -> u64 {
    let pk = BigInt::from(p).pow(k);
    let (q, r) = x.div_rem(&pk);
    assert!(r.is_zero(), "inexact division by {p}^{k}");
    q.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

fn residue(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

/// Root structure of a quadratic a·X² + b·X + c over F_p (a ≠ 0 mod p).
enum QuadRoots {
    /// separable with the given F_p-rational roots (0 or 2 of them)
    Separable(Vec<u64>),
    Double(u64),
}

fn quad_roots(a: u64, b: u64, c: u64, p: u64) -> QuadRoots {
    assert!(a % p != 0);
    if p == 2 {
        let roots: Vec<u64> = (0..2).filter(|&x| (a * x * x + b * x + c) % 2 == 0).collect();
        return if b % 2 == 0 {
            // X² + c/a: inseparable, double root
            QuadRoots::Double(*roots.first().expect("double root exists over F_2"))
        } else {
            QuadRoots::Separable(roots)
        };
    }
    let disc = ((b as i128 * b as i128 - 4 * a as i128 * c as i128) % p as i128 + p as i128)
        as u64
        % p;
    if disc == 0 {
        let r = crate::arith::mod_mul(
            (p - b % p) % p,
            mod_inv(2 * a % p, p).unwrap(),
            p,
        );
        QuadRoots::Double(r)
    } else if kronecker(disc as i128, p as i128) == 1 {
        let s = crate::arith::sqrt_mod_p(disc, p).unwrap();
        let inv2a = mod_inv(2 * a % p, p).unwrap();
        let r1 = crate::arith::mod_mul((p - b % p + s) % p, inv2a, p);
        let r2 = crate::arith::mod_mul((2 * p - b % p - s) % p, inv2a, p);
        QuadRoots::Separable(vec![r1, r2])
    } else {
        QuadRoots::Separable(vec![])
    }
}

/// Roots with multiplicities of monic T³ + c2·T² + c1·T + c0 over F_p.
fn cubic_roots(c2: u64, c1: u64, c0: u64, p: u64) -> Vec<(u64, u32)> {
    let eval = |coeffs: &[u64], x: u64| -> u64 {
        coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| (crate::arith::mod_mul(acc, x, p) + c) % p)
    };
    let mut out = Vec::new();
    let mut poly = vec![c0 % p, c1 % p, c2 % p, 1]; // ascending
    let mut x = 0;
    while x < p && poly.len() > 1 {
        if eval(&poly, x) == 0 {
            // synthetic division to count multiplicity
            let mut mult = 0;
            while poly.len() > 1 && eval(&poly, x) == 0 {
                let mut q = vec![0u64; poly.len() - 1];
                let mut carry = 0u64;
                for i in (0..poly.len() - 1).rev() {
                    carry = (crate::arith::mod_mul(carry, x, p) + poly[i + 1]) % p;
                    q[i] = carry;
                }
                poly = q;
                mult += 1;
            }
            out.push((x, mult));
        }
        x += 1;
    }
    out
}

/// Kodaira type, conductor exponent f, and Tamagawa number c at prime p.
///
/// The model must be minimal at p. A non-minimal model is reported as an
/// error rather than silently reduced.
pub fn tate_local_data(w: &WeierstrassModel, p: u64) -> Result<LocalData, CurveError> {
    if !crate::arith::is_prime_u64(p) {
        return Err(CurveError::NotPrime(p));
    }
    let n = match val(&w.disc, p) {
        Some(v) => v,
        None => unreachable!("disc is nonzero"),
    };
    if n == 0 {
        return Ok(LocalData {
            ell: p,
            f: 0,
            kodaira: KodairaType::I(0),
            c: 1,
            reduction: Reduction::Good,
        });
    }
    if p > 50_000_000 {
        return Err(CurveError::TooLarge);
    }

    // multiplicative: p does not divide c4
    if val_lt(&w.c4, p, 1) {
        let split = if p == 2 {
            let w2 = shift_singular_to_origin(w, 2)?;
            // node tangents: T² + a1·T - a2 over F_2 with a1 odd; split iff
            // the quadratic has a root, i.e. a2 even
            debug_assert_eq!(residue(&w2.a1, 2), 1);
            residue(&w2.a2, 2) == 0
        } else {
            // split iff -c6 is a square mod p; c6 is a p-unit here
            let c6 = residue(&w.c6, p);
            debug_assert!(c6 != 0);
            kronecker((p - c6) as i128, p as i128) == 1
        };
        let (c, reduction) = if split {
            (n as u64, Reduction::SplitMult)
        } else {
            (if n % 2 == 0 { 2 } else { 1 }, Reduction::NonsplitMult)
        };
        return Ok(LocalData {
            ell: p,
            f: 1,
            kodaira: KodairaType::I(n),
            c,
            reduction,
        });
    }

    // additive reduction from here on
    let w = shift_singular_to_origin(w, p)?;
    let make = |kod: KodairaType, f: u32, c: u64| {
        Ok(LocalData {
            ell: p,
            f,
            kodaira: kod,
            c,
            reduction: Reduction::Additive,
        })
    };

    if val_lt(&w.a6, p, 2) {
        return make(KodairaType::II, n, 1);
    }
    if val_lt(&w.b8, p, 3) {
        return make(KodairaType::III, n - 1, 2);
    }
    if val_lt(&w.b6, p, 3) {
        // type IV: Y² + a_{3,1}·Y - a_{6,2}
        let c = match quad_roots(1, quo_res(&w.a3, p, 1), (p - quo_res(&w.a6, p, 2)) % p, p) {
            QuadRoots::Separable(roots) if roots.len() == 2 => 3,
            _ => 1,
        };
        return make(KodairaType::IV, n - 2, c);
    }

    // step 6 normalization: v(a1) ≥ 1, v(a2) ≥ 1, v(a3) ≥ 2, v(a4) ≥ 2, v(a6) ≥ 3
    let w = normalize_step6(&w, p)?;
    let p2 = quo_res(&w.a2, p, 1);
    let p1 = quo_res(&w.a4, p, 2);
    let p0 = quo_res(&w.a6, p, 3);
    let roots = cubic_roots(p2, p1, p0, p);
    let mult_total: u32 = roots.iter().map(|&(_, m)| m).sum();
    let max_mult = roots.iter().map(|&(_, m)| m).max().unwrap_or(1);

    if max_mult == 1 {
        // I0*: separable cubic; c = 1 + number of F_p-rational roots, and an
        // irrational double root cannot occur (conjugates would both repeat)
        let rational = roots.len() as u64;
        debug_assert!(mult_total <= 3);
        return make(KodairaType::IStar(0), n - 4, 1 + rational);
    }

    if max_mult == 2 {
        // I_m* chain; shift the double root to T = 0
        let theta = roots.iter().find(|&&(_, m)| m == 2).unwrap().0;
        let mut cur = w.transform(
            &BigInt::from(1),
            &(BigInt::from(theta) * p),
            &BigInt::zero(),
            &BigInt::zero(),
        );
        debug_assert!(val(&cur.a2, p) == Some(1));
        debug_assert!(val_ge(&cur.a3, p, 2) && val_ge(&cur.a4, p, 3) && val_ge(&cur.a6, p, 4));
        let mut m: u32 = 1;
        loop {
            if m > n {
                return Err(CurveError::Internal(format!("I_m* loop ran away at p={p}")));
            }
            if m % 2 == 1 {
                let k3 = (m + 3) / 2;
                let beta = quo_res(&cur.a3, p, k3);
                let gamma = (p - quo_res(&cur.a6, p, m + 3)) % p;
                match quad_roots(1, beta, gamma, p) {
                    QuadRoots::Separable(roots) => {
                        let c = if roots.len() == 2 { 4 } else { 2 };
                        return make(KodairaType::IStar(m), n - m - 4, c);
                    }
                    QuadRoots::Double(y1) => {
                        let t = BigInt::from(y1) * BigInt::from(p).pow(k3);
                        cur = cur.transform(&BigInt::from(1), &BigInt::zero(), &BigInt::zero(), &t);
                    }
                }
            } else {
                let k4 = (m + 4) / 2;
                let a = quo_res(&cur.a2, p, 1);
                let b = quo_res(&cur.a4, p, k4);
                let cc = quo_res(&cur.a6, p, m + 3);
                match quad_roots(a, b, cc, p) {
                    QuadRoots::Separable(roots) => {
                        let c = if roots.len() == 2 { 4 } else { 2 };
                        return make(KodairaType::IStar(m), n - m - 4, c);
                    }
                    QuadRoots::Double(x1) => {
                        let r = BigInt::from(x1) * BigInt::from(p).pow((m + 2) / 2);
                        cur = cur.transform(&BigInt::from(1), &r, &BigInt::zero(), &BigInt::zero());
                    }
                }
            }
            m += 1;
        }
    }

    // triple root: shift to T = 0
    let theta = roots[0].0;
    let w = w.transform(
        &BigInt::from(1),
        &(BigInt::from(theta) * p),
        &BigInt::zero(),
        &BigInt::zero(),
    );
    debug_assert!(val_ge(&w.a2, p, 2) && val_ge(&w.a4, p, 3) && val_ge(&w.a6, p, 4));

    // IV* test: Y² + a_{3,2}·Y - a_{6,4}
    let beta = quo_res(&w.a3, p, 2);
    let gamma = (p - quo_res(&w.a6, p, 4)) % p;
    let w = match quad_roots(1, beta, gamma, p) {
        QuadRoots::Separable(roots) => {
            let c = if roots.len() == 2 { 3 } else { 1 };
            return make(KodairaType::IVStar, n - 6, c);
        }
        QuadRoots::Double(y1) => {
            let t = BigInt::from(y1) * BigInt::from(p).pow(2);
            w.transform(&BigInt::from(1), &BigInt::zero(), &BigInt::zero(), &t)
        }
    };
    debug_assert!(val_ge(&w.a3, p, 3) && val_ge(&w.a6, p, 5));

    if val_lt(&w.a4, p, 4) {
        return make(KodairaType::IIIStar, n - 7, 2);
    }
    if val_lt(&w.a6, p, 6) {
        return make(KodairaType::IIStar, n - 8, 1);
    }
    Err(CurveError::NotMinimal(p))
}

/// Translate so the singular point of the reduction is at the origin,
/// i.e. p | a3, a4, a6 afterwards.
fn shift_singular_to_origin(w: &WeierstrassModel, p: u64) -> Result<WeierstrassModel, CurveError> {
    let [a1, a2, a3, a4, a6] = crate::curves::count::reduce_mod(w, p);
    let on_curve = |x: u64, y: u64| -> bool {
        let lhs = (crate::arith::mod_mul(y, y, p)
            + crate::arith::mod_mul(crate::arith::mod_mul(a1, x, p), y, p)
            + crate::arith::mod_mul(a3, y, p))
            % p;
        let x2 = crate::arith::mod_mul(x, x, p);
        let rhs = (crate::arith::mod_mul(x2, x, p)
            + crate::arith::mod_mul(a2, x2, p)
            + crate::arith::mod_mul(a4, x, p)
            + a6)
            % p;
        lhs == rhs
    };
    let fx_zero = |x: u64, y: u64| -> bool {
        // a1·y - 3x² - 2·a2·x - a4 ≡ 0
        let x2 = crate::arith::mod_mul(x, x, p);
        (crate::arith::mod_mul(a1, y, p) + 5 * p
            - 3 * x2 % p
            - 2 * crate::arith::mod_mul(a2, x, p) % p
            - a4)
            % p
            == 0
    };
    let fy_zero = |x: u64, y: u64| -> bool {
        (2 * y + crate::arith::mod_mul(a1, x, p) + a3) % p == 0
    };
    let found = if p == 2 {
        (0..2u64)
            .flat_map(|x| (0..2u64).map(move |y| (x, y)))
            .find(|&(x, y)| on_curve(x, y) && fx_zero(x, y) && fy_zero(x, y))
    } else {
        let inv2 = mod_inv(2, p).unwrap();
        (0..p)
            .map(|x| {
                let y = crate::arith::mod_mul(
                    (2 * p - crate::arith::mod_mul(a1, x, p) - a3) % p,
                    inv2,
                    p,
                );
                (x, y)
            })
            .find(|&(x, y)| on_curve(x, y) && fx_zero(x, y))
    };
    let (x0, y0) = found.ok_or(CurveError::Internal(format!(
        "no singular point mod {p} on a bad-reduction curve"
    )))?;
    let shifted = w.transform(
        &BigInt::from(1),
        &BigInt::from(x0),
        &BigInt::zero(),
        &BigInt::from(y0),
    );
    debug_assert!(val_ge(&shifted.a3, p, 1) && val_ge(&shifted.a4, p, 1) && val_ge(&shifted.a6, p, 1));
    Ok(shifted)
}

/// Arrange v(a1) ≥ 1, v(a2) ≥ 1, v(a3) ≥ 2, v(a4) ≥ 2, v(a6) ≥ 3 by an
/// (s, t)-translation; entered only with the singular point at the origin and
/// v(b6) ≥ 3, which guarantees existence.
fn normalize_step6(w: &WeierstrassModel, p: u64) -> Result<WeierstrassModel, CurveError> {
    let ok = |m: &WeierstrassModel| {
        val_ge(&m.a1, p, 1)
            && val_ge(&m.a2, p, 1)
            && val_ge(&m.a3, p, 2)
            && val_ge(&m.a4, p, 2)
            && val_ge(&m.a6, p, 3)
    };
    if p == 2 {
        for s in 0..2u64 {
            for t in 0..4u64 {
                let m = w.transform(
                    &BigInt::from(1),
                    &BigInt::zero(),
                    &BigInt::from(s),
                    &BigInt::from(t),
                );
                if ok(&m) {
                    return Ok(m);
                }
            }
        }
        return Err(CurveError::Internal("step-6 normalization failed at p=2".into()));
    }
    let inv2 = mod_inv(2, p).unwrap();
    let s = crate::arith::mod_mul((p - residue(&w.a1, p)) % p, inv2, p);
    let m = w.transform(&BigInt::from(1), &BigInt::zero(), &BigInt::from(s), &BigInt::zero());
    let p2 = p as u128 * p as u128;
    let a3_res = num_integer::Integer::mod_floor(&m.a3, &BigInt::from(p2)).to_u128().unwrap();
    let inv2_p2 = {
        // inverse of 2 mod p²
        let (mut old_r, mut r) = (2i128, p2 as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        old_s.rem_euclid(p2 as i128) as u128
    };
    let t = ((p2 - a3_res) % p2 * inv2_p2 % p2) as u64;
    let m = m.transform(&BigInt::from(1), &BigInt::zero(), &BigInt::zero(), &BigInt::from(t));
    if ok(&m) {
        Ok(m)
    } else {
        Err(CurveError::Internal(format!("step-6 normalization failed at p={p}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: [i64; 5]) -> WeierstrassModel {
        WeierstrassModel::from_ai(a).unwrap()
    }

    #[test]
    fn good_prime() {
        let w = m([0, -1, 1, -10, -20]);
        let d = tate_local_data(&w, 7).unwrap();
        assert_eq!(d.reduction, Reduction::Good);
        assert_eq!((d.f, d.c), (0, 1));
    }

    #[test]
    fn eleven_a_at_eleven() {
        // split multiplicative I5 with c = v(disc) = 5
        let w = m([0, -1, 1, -10, -20]);
        let d = tate_local_data(&w, 11).unwrap();
        assert_eq!(d.kodaira, KodairaType::I(5));
        assert_eq!(d.reduction, Reduction::SplitMult);
        assert_eq!(d.c, 5);
        assert_eq!(d.f, 1);
    }

    #[test]
    fn thirtyseven_a_at_37() {
        // disc = 37: I1, c = 1
        let w = m([0, 0, 1, -1, 0]);
        let d = tate_local_data(&w, 37).unwrap();
        assert_eq!(d.kodaira, KodairaType::I(1));
        assert_eq!(d.f, 1);
        assert_eq!(d.c, 1);
    }

    #[test]
    fn additive_small() {
        // y² = x³ + 1 at 3: additive with c in {1,..,4}
        let w = m([0, 0, 0, 0, 1]);
        let d = tate_local_data(&w, 3).unwrap();
        assert_eq!(d.reduction, Reduction::Additive);
        assert!((1..=4).contains(&d.c), "c = {}", d.c);
        // and at 2
        let d = tate_local_data(&w, 2).unwrap();
        assert_eq!(d.reduction, Reduction::Additive);
    }

    #[test]
    fn conductor_exponent_tame_bound() {
        // for p ≥ 5 additive f = 2 always
        let w = m([0, 0, 0, 0, 25]); // disc = -2^4·3^3·5^4... has additive 5
        let d = tate_local_data(&w, 5).unwrap();
        assert_eq!(d.reduction, Reduction::Additive);
        assert_eq!(d.f, 2);
    }
}
