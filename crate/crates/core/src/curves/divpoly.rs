//! Division polynomials of a long Weierstrass model, as dense polynomials
//! over Z, and p-adic root counting used for local torsion.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::curves::weierstrass::WeierstrassModel;

/// Dense polynomial over Z, ascending coefficients, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZPoly(pub Vec<BigInt>);

impl ZPoly {
    pub fn zero() -> Self {
        ZPoly(vec![])
    }

    pub fn constant(c: i64) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            ZPoly(vec![BigInt::from(c)])
        }
    }

    pub fn from_coeffs(mut v: Vec<BigInt>) -> Self {
        while v.last().map_or(false, |c| c.is_zero()) {
            v.pop();
        }
        ZPoly(v)
    }

    pub fn degree(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let mut v = vec![BigInt::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            v[i] += c;
        }
        for (i, c) in other.0.iter().enumerate() {
            v[i] += c;
        }
        Self::from_coeffs(v)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let mut v = vec![BigInt::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            v[i] += c;
        }
        for (i, c) in other.0.iter().enumerate() {
            v[i] -= c;
        }
        Self::from_coeffs(v)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut v = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self::from_coeffs(v)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = ZPoly(vec![BigInt::one()]);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let v: Vec<BigInt> = self
            .0
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect();
        Self::from_coeffs(v)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_mod(&self, x: &BigInt, m: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.0.iter().rev() {
            acc = (acc * x + c).mod_floor(m);
        }
        acc
    }
}

/// The squared 2-division polynomial B(x) = 4x³ + b2·x² + 2·b4·x + b6.
pub fn two_torsion_poly(w: &WeierstrassModel) -> ZPoly {
    ZPoly::from_coeffs(vec![
        w.b6.clone(),
        2 * &w.b4,
        w.b2.clone(),
        BigInt::from(4),
    ])
}

/// ψ_n for odd n as a polynomial in x (the full division polynomial; its
/// roots are the x-coordinates of the nontrivial n-torsion).
///
/// Internally computes the reduced polynomials P[n] with ψ_n = P[n] for odd n
/// and ψ_n = ψ₂·P[n] for even n, using ψ₂² = B(x).
pub fn division_polynomial(w: &WeierstrassModel, n: u32) -> ZPoly {
    assert!(n % 2 == 1, "odd division polynomials only");
    let b = two_torsion_poly(w);
    let b2sq = b.mul(&b);
    let psi3 = ZPoly::from_coeffs(vec![
        w.b8.clone(),
        3 * &w.b6,
        3 * &w.b4,
        w.b2.clone(),
        BigInt::from(3),
    ]);
    let psi4_half = ZPoly::from_coeffs(vec![
        &w.b4 * &w.b8 - &w.b6 * &w.b6,
        &w.b2 * &w.b8 - &w.b4 * &w.b6,
        10 * &w.b8,
        10 * &w.b6,
        5 * &w.b4,
        w.b2.clone(),
        BigInt::from(2),
    ]);
    let mut table: Vec<ZPoly> = vec![
        ZPoly::zero(),
        ZPoly::constant(1),
        ZPoly::constant(1),
        psi3,
        psi4_half,
    ];
    for m in 5..=n as usize {
        let k = m / 2;
        let poly = if m % 2 == 1 {
            // ψ_{2k+1} = ψ_{k+2}·ψ_k³ - ψ_{k-1}·ψ_{k+1}³
            let lhs = table[k + 2].mul(&table[k].pow(3));
            let rhs = table[k - 1].mul(&table[k + 1].pow(3));
            if k % 2 == 0 {
                lhs.mul(&b2sq).sub(&rhs)
            } else {
                lhs.sub(&rhs.mul(&b2sq))
            }
        } else {
            // ψ_{2k}/ψ₂ = P[k]·(P[k+2]·P[k-1]² - P[k-2]·P[k+1]²)
            let inner = table[k + 2]
                .mul(&table[k - 1].pow(2))
                .sub(&table[k - 2].mul(&table[k + 1].pow(2)));
            table[k].mul(&inner)
        };
        table.push(poly);
    }
    table[n as usize].clone()
}

/// A p-adic root branch found by recursive lifting.
#[derive(Debug, Clone)]
pub struct ZpRoot {
    /// approximation modulo p^known
    pub approx: BigInt,
    pub known: u32,
    /// true when Hensel's lemma certifies a unique Z_p root over this branch
    pub certified: bool,
}

/// Roots of f in Z_p by recursive lifting with Hensel certification.
///
/// Certified roots are refined to precision at least `target`. The second
/// return value tells whether the recursion exhausted `depth`; when it did,
/// uncertified branches may or may not be genuine roots.
pub fn zp_roots(f: &ZPoly, p: u64, depth: u32, target: u32) -> (Vec<ZpRoot>, bool) {
    let mut out = Vec::new();
    let mut exhausted = false;
    lift_roots(f, p, depth, target, &BigInt::zero(), 0, &mut out, &mut exhausted);
    (out, exhausted)
}

#[allow(clippy::too_many_arguments)]
fn lift_roots(
    f: &ZPoly,
    p: u64,
    depth: u32,
    target: u32,
    base: &BigInt,
    level: u32,
    out: &mut Vec<ZpRoot>,
    exhausted: &mut bool,
) {
    if f.is_zero() {
        // identically zero branch: cannot happen for separable inputs;
        // flagged as an uncertified catch-all
        out.push(ZpRoot {
            approx: base.clone(),
            known: level,
            certified: false,
        });
        return;
    }
    let pb = BigInt::from(p);
    let fp = f.derivative();
    for r in 0..p {
        let rb = BigInt::from(r);
        if !f.eval_mod(&rb, &pb).is_zero() {
            continue;
        }
        if !fp.eval_mod(&rb, &pb).is_zero() {
            // simple root mod p of this branch polynomial: refine in-branch,
            // then map back through x = base + p^level · y
            let y = newton_refine(f, &fp, p, &rb, target);
            out.push(ZpRoot {
                approx: base + &y * pb.pow(level),
                known: level + target,
                certified: true,
            });
            continue;
        }
        let x0 = base + &rb * pb.pow(level);
        if level + 1 >= depth {
            *exhausted = true;
            out.push(ZpRoot {
                approx: x0,
                known: level + 1,
                certified: false,
            });
            continue;
        }
        // substitute x = r + p·y and strip the content power of p
        let sub = substitute_shift_scale(f, &rb, p);
        lift_roots(&sub, p, depth, target, &x0, level + 1, out, exhausted);
    }
}

/// Newton-lift a Hensel-simple root r of f from precision 1 to p^k.
fn newton_refine(f: &ZPoly, fp: &ZPoly, p: u64, r: &BigInt, k: u32) -> BigInt {
    let mut x = r.clone();
    let mut prec = 1u32;
    while prec < k {
        let next = (prec * 2).min(k);
        let modulus = BigInt::from(p).pow(next);
        let fx = f.eval_mod(&x, &modulus);
        let dfx = fp.eval_mod(&x, &modulus);
        let inv = modinv_bigint(&dfx, &modulus);
        x = (&x - fx * inv).mod_floor(&modulus);
        prec = next;
    }
    x.mod_floor(&BigInt::from(p).pow(k))
}

/// g(y) = f(r + p·y) / p^e with e the content valuation, so g is primitive.
fn substitute_shift_scale(f: &ZPoly, r: &BigInt, p: u64) -> ZPoly {
    // f(r + z) via Taylor shift, then z = p·y
    let n = f.0.len();
    let mut shifted = f.0.clone();
    // repeated synthetic division by (z - 0) after x -> x + r: classic
    // in-place Taylor shift
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let (head, tail) = shifted.split_at_mut(j + 1);
            head[j] = &head[j] + r * &tail[0];
        }
    }
    let pb = BigInt::from(p);
    let mut coeffs: Vec<BigInt> = shifted
        .into_iter()
        .enumerate()
        .map(|(i, c)| c * pb.pow(i as u32))
        .collect();
    // strip content power of p
    let mut minv: Option<u32> = None;
    for c in coeffs.iter().filter(|c| !c.is_zero()) {
        let v = crate::arith::valuation_bigint(c, p);
        minv = Some(minv.map_or(v, |m: u32| m.min(v)));
    }
    if let Some(m) = minv {
        if m > 0 {
            let d = pb.pow(m);
            coeffs = coeffs.iter().map(|c| c / &d).collect();
        }
    }
    ZPoly::from_coeffs(coeffs)
}

/// Inverse mod m for m a prime power and x a unit.
pub fn modinv_bigint(x: &BigInt, m: &BigInt) -> BigInt {
    let (mut old_r, mut r) = (x.mod_floor(m), m.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    while !r.is_zero() {
        let q = &old_r / &r;
        let t = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, t);
        let t = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, t);
    }
    assert!(old_r.abs().is_one(), "not invertible");
    if old_r.is_negative() {
        old_s = -old_s;
    }
    old_s.mod_floor(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: [i64; 5]) -> WeierstrassModel {
        WeierstrassModel::from_ai(a).unwrap()
    }

    #[test]
    fn psi3_degree_and_roots() {
        // 3-division polynomial has degree 4
        let w = m([0, 0, 0, -1, 0]); // y² = x³ - x
        let f = division_polynomial(&w, 3);
        assert_eq!(f.degree(), Some(4));
        // and ψ5 degree 12
        let f5 = division_polynomial(&w, 5);
        assert_eq!(f5.degree(), Some(12));
    }

    #[test]
    fn psi5_of_11a_has_rational_root() {
        // 11a has a rational 5-torsion point (5, 5): x = 5 is a root of ψ5
        let w = m([0, -1, 1, -10, -20]);
        let f = division_polynomial(&w, 5);
        assert!(f.eval(&BigInt::from(5)).is_zero());
        assert!(f.eval(&BigInt::from(16)).is_zero()); // x(2P) = 16
    }

    #[test]
    fn torsion_points_satisfy_curve() {
        // (5, 5) on 11a: y² + y = x³ - x² - 10x - 20
        let (x, y) = (5i64, 5i64);
        assert_eq!(y * y + y, x * x * x - x * x - 10 * x - 20);
    }

    #[test]
    fn zp_root_counting_simple() {
        // f = x² - 2 over Z_7: 2 is a QR mod 7 (3² = 2), two simple roots
        let f = ZPoly::from_coeffs(vec![BigInt::from(-2), BigInt::zero(), BigInt::from(1)]);
        let (roots, exhausted) = zp_roots(&f, 7, 10, 8);
        assert!(!exhausted);
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| r.certified));
        let r = roots[0].approx.clone();
        let m = BigInt::from(7u64).pow(8);
        assert!(((&r * &r - BigInt::from(2)) % m).is_zero());
    }

    #[test]
    fn zp_root_counting_ramified() {
        // f = x² - 7 over Z_7: no roots (odd valuation)
        let f = ZPoly::from_coeffs(vec![BigInt::from(-7), BigInt::zero(), BigInt::from(1)]);
        let (roots, exhausted) = zp_roots(&f, 7, 24, 8);
        assert!(!exhausted);
        assert!(roots.is_empty());
    }

    #[test]
    fn zp_root_double_then_split() {
        // f = (x-1)(x-8) = x² - 9x + 8 over Z_7: both roots ≡ 1 mod 7,
        // recursion must separate them
        let f = ZPoly::from_coeffs(vec![BigInt::from(8), BigInt::from(-9), BigInt::from(1)]);
        let (roots, _) = zp_roots(&f, 7, 10, 12);
        assert_eq!(roots.iter().filter(|r| r.certified).count(), 2);
    }
}
