//! Evaluation of modular symbols [a/n] from the cached value table, via the
//! unimodular-path expansion. A fixed-point fast path backs the delta sweep
//! inner loop.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::modsym::eigen::EigenSymbol;
use crate::modsym::hecke::for_each_path_class;

impl EigenSymbol {
    /// The modular symbol [a/n] as an exact rational. Depends only on
    /// a mod n; O(log n) table lookups.
    pub fn evaluate(&self, a: i128, n: u64) -> BigRational {
        assert!(n >= 1);
        let mut acc = BigInt::zero();
        for_each_path_class(&self.p1, a, n as i128, |idx| {
            acc += &self.values[idx];
        });
        BigRational::new(acc, self.common_den.clone())
    }
}

/// Evaluation state with machine-integer numerators when the table fits.
pub struct FastEval<'a> {
    sym: &'a EigenSymbol,
    nums_i64: Option<Vec<i64>>,
}

pub enum NumSum {
    Small(i64),
    Big(BigInt),
}

impl<'a> FastEval<'a> {
    pub fn new(sym: &'a EigenSymbol) -> Self {
        let nums_i64 = sym
            .values
            .iter()
            .map(|v| v.to_i64())
            .collect::<Option<Vec<i64>>>()
            .filter(|v| {
                // headroom: path length ≤ ~128 terms, keep sums within i64
                v.iter().all(|x| x.abs() < i64::MAX / 256)
            });
        FastEval { sym, nums_i64 }
    }

    /// Numerator sum of [a/n] over the common denominator.
    #[inline]
    pub fn numerator_sum(&self, a: u64, n: u64) -> NumSum {
        match &self.nums_i64 {
            Some(nums) => {
                let mut acc = 0i64;
                for_each_path_class(&self.sym.p1, a as i128, n as i128, |idx| {
                    acc += nums[idx];
                });
                NumSum::Small(acc)
            }
            None => {
                let mut acc = BigInt::zero();
                for_each_path_class(&self.sym.p1, a as i128, n as i128, |idx| {
                    acc += &self.sym.values[idx];
                });
                NumSum::Big(acc)
            }
        }
    }

    pub fn common_den(&self) -> &BigInt {
        &self.sym.common_den
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{analyze_curve, WeierstrassModel};
    use crate::modsym::eigen::{normalize_p_integral, rational_eigensymbol};
    use crate::modsym::space::build_plus_space;

    fn symbol_11a() -> EigenSymbol {
        let space = build_plus_space(11).unwrap();
        let w = WeierstrassModel::from_ai([0, -1, 1, -10, -20]).unwrap();
        let curve = analyze_curve(&w, 7).unwrap();
        let sym = rational_eigensymbol(&space, &curve, &[2, 3]).unwrap();
        normalize_p_integral(&sym, 7).unwrap()
    }

    #[test]
    fn periodicity_and_plus_symmetry() {
        let sym = symbol_11a();
        for n in [1u64, 2, 3, 5, 12, 49, 101] {
            for a in 0..n.min(30) {
                let v = sym.evaluate(a as i128, n);
                assert_eq!(v, sym.evaluate(a as i128 + n as i128, n), "periodicity {a}/{n}");
                assert_eq!(v, sym.evaluate(n as i128 - a as i128, n), "plus symmetry {a}/{n}");
            }
        }
    }

    #[test]
    fn delta_one_is_seven_unit() {
        // [0/1] = L/Ω = 1/5 up to sign and 7-unit, so v_7 = 0
        let sym = symbol_11a();
        let v = sym.evaluate(0, 1);
        assert!(!v.is_zero());
        assert_eq!(crate::arith::valuation_bigint(v.numer(), 7), 0);
        assert_eq!(crate::arith::valuation_bigint(v.denom(), 7), 0);
    }

    #[test]
    fn fast_eval_matches_exact() {
        let sym = symbol_11a();
        let fast = FastEval::new(&sym);
        for n in [5u64, 7, 30, 97] {
            for a in 0..n {
                if crate::arith::gcd_u64(a, n) != 1 {
                    continue;
                }
                let exact = sym.evaluate(a as i128, n);
                match fast.numerator_sum(a, n) {
                    NumSum::Small(s) => {
                        assert_eq!(
                            BigRational::new(BigInt::from(s), sym.common_den.clone()),
                            exact
                        );
                    }
                    NumSum::Big(b) => {
                        assert_eq!(BigRational::new(b, sym.common_den.clone()), exact);
                    }
                }
            }
        }
    }
}
