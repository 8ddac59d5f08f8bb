//! Extraction of the rational eigensymbol attached to a curve and its
//! p-integral normalization; Atkin-Lehner (Fricke) sign.
//!
//! The eigensymbol is the linear functional on the plus quotient that pairs
//! paths against the newform of E; it is pinned down (up to scale) as the
//! common eigenvector of the transposed Hecke matrices with eigenvalues a_q.
//! Eisenstein components are excluded automatically because a_q = q + 1
//! violates the Hasse bound.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::valuation_bigint;
use crate::curves::CurveArithmetic;
use crate::modsym::hecke::hecke_matrix;
use crate::modsym::linalg::{QMat, QQ};
use crate::modsym::p1::P1Table;
use crate::modsym::space::ManinSymbolSpace;
use crate::modsym::ModSymError;

/// The p-integrally normalized rational eigensymbol: one exact rational value
/// per P¹ class, stored as integer numerators over a common denominator.
#[derive(Debug, Clone)]
pub struct EigenSymbol {
    pub level: u64,
    pub p: u64,
    pub values: Vec<BigInt>,
    /// positive; coprime to p once normalized
    pub common_den: BigInt,
    pub probe_eigenvalues: Vec<(u64, i64)>,
    /// total scaling applied relative to the raw primitive eigenvector
    pub scale_applied: BigRational,
    pub p_normalized: bool,
    pub p1: Arc<P1Table>,
}

impl EigenSymbol {
    /// Value on the P¹ class with the given index.
    pub fn value(&self, idx: usize) -> BigRational {
        BigRational::new(self.values[idx].clone(), self.common_den.clone())
    }

    /// v_p of the value table entry (None for zero).
    fn value_vp(&self, idx: usize) -> Option<i64> {
        if self.values[idx].is_zero() {
            return None;
        }
        let num = valuation_bigint(&self.values[idx], self.p) as i64;
        let den = valuation_bigint(&self.common_den, self.p) as i64;
        Some(num - den)
    }
}

/// Construct the rational eigensymbol of `curve` on `space`.
///
/// Probes must be good primes for the curve; the intersection of the
/// (transposed) eigenspaces must come down to a line, otherwise an explicit
/// error asks for more probes. The generator is scaled to the primitive
/// integer vector with positive first nonzero entry.
pub fn rational_eigensymbol(
    space: &ManinSymbolSpace,
    curve: &CurveArithmetic,
    probes: &[u64],
) -> Result<EigenSymbol, ModSymError> {
    if curve.conductor != space.level {
        return Err(ModSymError::LevelMismatch {
            space: space.level,
            curve: curve.conductor,
        });
    }
    if space.cuspidal_dim() == 0 {
        return Err(ModSymError::NoCuspforms(space.level));
    }
    let mut basis = QMat::identity(space.dim);
    let mut probe_eigenvalues = Vec::new();
    for &q in probes {
        if curve.conductor % q == 0 {
            return Err(ModSymError::BadProbe(q));
        }
        let a_q = crate::curves::frobenius_trace(&curve.minimal, q)
            .map_err(ModSymError::Curve)?;
        probe_eigenvalues.push((q, a_q));
        let tq = hecke_matrix(space, q).transpose();
        // kernel of (T_qᵀ - a_q) restricted to the running subspace
        let mut constrained = tq.mul(&basis);
        for i in 0..space.dim {
            for j in 0..basis.cols {
                let adj = &basis[(i, j)] * &QQ::from(BigInt::from(a_q));
                constrained[(i, j)] -= adj;
            }
        }
        let kernel = constrained.kernel_basis();
        if kernel.is_empty() {
            return Err(ModSymError::EigenvalueMismatch {
                level: space.level,
                probe: q,
            });
        }
        basis = basis.mul(&QMat::from_columns(
            &kernel.into_iter().collect::<Vec<_>>(),
        ));
        if basis.cols == 1 {
            break;
        }
    }
    if basis.cols != 1 {
        return Err(ModSymError::NeedMoreProbes {
            remaining_dim: basis.cols,
        });
    }
    let phi = basis.column(0);

    // values on all P¹ classes
    let values_q: Vec<QQ> = space
        .expansions
        .iter()
        .map(|row| {
            let mut acc = QQ::zero();
            for (j, coef) in row {
                if !phi[*j as usize].is_zero() {
                    acc += coef * &phi[*j as usize];
                }
            }
            acc
        })
        .collect();

    // primitive integer scaling with positive first nonzero entry
    let mut den_lcm = BigInt::one();
    for v in &values_q {
        den_lcm = den_lcm.lcm(v.denom());
    }
    let mut nums: Vec<BigInt> = values_q
        .iter()
        .map(|v| v.numer() * (&den_lcm / v.denom()))
        .collect();
    let mut content = BigInt::zero();
    for n in &nums {
        content = content.gcd(n);
    }
    if content.is_zero() {
        return Err(ModSymError::ZeroSymbol);
    }
    let first_sign_neg = nums
        .iter()
        .find(|n| !n.is_zero())
        .map(|n| n.is_negative())
        .unwrap_or(false);
    if first_sign_neg {
        content = -content;
    }
    for n in nums.iter_mut() {
        *n = &*n / &content;
    }

    Ok(EigenSymbol {
        level: space.level,
        p: curve.p,
        values: nums,
        common_den: BigInt::one(),
        probe_eigenvalues,
        scale_applied: BigRational::one(),
        p_normalized: false,
        p1: Arc::clone(&space.p1),
    })
}

/// Scale the symbol so every value is p-integral and at least one value is a
/// p-unit (unit content at p), recording the applied scale.
pub fn normalize_p_integral(sym: &EigenSymbol, p: u64) -> Result<EigenSymbol, ModSymError> {
    if sym.values.iter().all(|v| v.is_zero()) {
        return Err(ModSymError::ZeroSymbol);
    }
    let min_vp = (0..sym.values.len())
        .filter_map(|i| sym.value_vp(i))
        .min()
        .unwrap();
    let mut out = sym.clone();
    out.p = p;
    match min_vp.cmp(&0) {
        std::cmp::Ordering::Equal => {}
        std::cmp::Ordering::Greater => {
            // divide all values by p^min
            let f = BigInt::from(p).pow(min_vp as u32);
            for v in out.values.iter_mut() {
                *v = &*v / &f;
            }
            out.scale_applied = &sym.scale_applied
                / BigRational::from(f);
        }
        std::cmp::Ordering::Less => {
            // multiply through by p^{-min}
            let f = BigInt::from(p).pow((-min_vp) as u32);
            out.common_den = &sym.common_den * &f;
            out.scale_applied = &sym.scale_applied * BigRational::from(f);
            // keep the fraction reduced
            let g = {
                let mut g = out.common_den.clone();
                for v in &out.values {
                    g = g.gcd(v);
                    if g.is_one() {
                        break;
                    }
                }
                g
            };
            if !g.is_one() {
                for v in out.values.iter_mut() {
                    *v = &*v / &g;
                }
                out.common_den = &out.common_den / &g;
            }
        }
    }
    debug_assert_eq!(
        (0..out.values.len()).filter_map(|i| out.value_vp(i)).min(),
        Some(0)
    );
    out.p_normalized = true;
    Ok(out)
}

/// The root number ε = -(Fricke eigenvalue of the symbol).
pub fn atkin_lehner_sign(
    space: &ManinSymbolSpace,
    sym: &EigenSymbol,
) -> Result<i8, ModSymError> {
    let w = crate::modsym::hecke::fricke_matrix(space);
    if !w.mul(&w).is_identity() {
        return Err(ModSymError::Internal("W_N² is not the identity".into()));
    }
    // functional on free generators
    let phi: Vec<QQ> = space
        .free_gens
        .iter()
        .map(|&g| sym.value(g))
        .collect();
    let img = w.transpose().mul_vec(&phi);
    if img == phi {
        return Ok(-1);
    }
    let neg: Vec<QQ> = phi.iter().map(|v| -v.clone()).collect();
    if img == neg {
        return Ok(1);
    }
    Err(ModSymError::Internal(
        "eigensymbol is not a Fricke eigenvector".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{analyze_curve, WeierstrassModel};
    use crate::modsym::space::build_plus_space;

    fn curve_11a(p: u64) -> CurveArithmetic {
        let w = WeierstrassModel::from_ai([0, -1, 1, -10, -20]).unwrap();
        analyze_curve(&w, p).unwrap()
    }

    #[test]
    fn eigensymbol_11a() {
        let space = build_plus_space(11).unwrap();
        let curve = curve_11a(7);
        let sym = rational_eigensymbol(&space, &curve, &[2, 3]).unwrap();
        let sym = normalize_p_integral(&sym, 7).unwrap();
        assert!(sym.p_normalized);
        // eigen property on held-out primes
        for q in [5u64, 7, 13, 17, 19] {
            let a_q = crate::curves::frobenius_trace(&curve.minimal, q).unwrap();
            let tq = hecke_matrix(&space, q).transpose();
            let phi: Vec<QQ> = space.free_gens.iter().map(|&g| sym.value(g)).collect();
            let img = tq.mul_vec(&phi);
            for (u, v) in img.iter().zip(&phi) {
                assert_eq!(*u, v * QQ::from(BigInt::from(a_q)), "T_{q}");
            }
        }
    }

    #[test]
    fn wrong_level_rejected() {
        let space = build_plus_space(11).unwrap();
        let w = WeierstrassModel::from_ai([0, 0, 1, -1, 0]).unwrap();
        let curve = analyze_curve(&w, 5).unwrap();
        assert!(matches!(
            rational_eigensymbol(&space, &curve, &[2, 3]),
            Err(ModSymError::LevelMismatch { .. })
        ));
    }

    #[test]
    fn level_37_separates_two_newforms() {
        let space = build_plus_space(37).unwrap();
        assert_eq!(space.cuspidal_dim(), 2);
        let w = WeierstrassModel::from_ai([0, 0, 1, -1, 0]).unwrap();
        let curve = analyze_curve(&w, 5).unwrap();
        // a_2(37a) = -2 separates it from 37b (a_2 = 0)
        let sym = rational_eigensymbol(&space, &curve, &[2, 3, 5]).unwrap();
        assert_eq!(sym.probe_eigenvalues[0], (2, -2));
    }

    #[test]
    fn fricke_signs() {
        let space = build_plus_space(11).unwrap();
        let curve = curve_11a(7);
        let sym = rational_eigensymbol(&space, &curve, &[2, 3]).unwrap();
        assert_eq!(atkin_lehner_sign(&space, &sym).unwrap(), 1);

        let space = build_plus_space(37).unwrap();
        let w = WeierstrassModel::from_ai([0, 0, 1, -1, 0]).unwrap();
        let curve = analyze_curve(&w, 5).unwrap();
        let sym = rational_eigensymbol(&space, &curve, &[2, 3, 5]).unwrap();
        assert_eq!(atkin_lehner_sign(&space, &sym).unwrap(), -1);
    }

    #[test]
    fn normalization_idempotent_and_scaling() {
        let space = build_plus_space(11).unwrap();
        let curve = curve_11a(7);
        let sym = rational_eigensymbol(&space, &curve, &[2, 3]).unwrap();
        let n1 = normalize_p_integral(&sym, 7).unwrap();
        let n2 = normalize_p_integral(&n1, 7).unwrap();
        assert_eq!(n1.values, n2.values);
        assert_eq!(n1.common_den, n2.common_den);
        // scaling by p then normalizing recovers the same table
        let mut scaled = n1.clone();
        for v in scaled.values.iter_mut() {
            *v = &*v * BigInt::from(7);
        }
        scaled.p_normalized = false;
        let back = normalize_p_integral(&scaled, 7).unwrap();
        assert_eq!(back.values, n1.values);
    }
}
