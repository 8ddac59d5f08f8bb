//! Floating-point cross-check oracle: the real Néron period by AGM, L(E,1)
//! by the exponentially convergent series, and the δ_1 normalization check.
//!
//! Floats never flow back into the exact modules: the crosscheck returns only
//! a recognized rational and a boolean.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::curves::{CurveArithmetic, Reduction, WeierstrassModel};
use crate::modsym::EigenSymbol;

#[derive(Debug, Error)]
pub enum NumericError {
    #[error("series needs more terms: got {terms}, need ≥ {needed} for the target precision")]
    InsufficientTerms { terms: usize, needed: usize },
    #[error("could not resolve the functional-equation sign numerically")]
    SignUnresolved,
    #[error("curve layer: {0}")]
    Curve(#[from] crate::curves::CurveError),
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyticData {
    pub omega_plus: f64,
    pub l_value: f64,
    pub epsilon_numeric: i8,
    /// bound on the absolute error of l_value
    pub error_bound: f64,
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..60 {
        let (a1, b1) = ((a + b) / 2.0, (a * b).sqrt());
        if (a1 - b1).abs() <= 1e-16 * a1.abs() {
            return a1;
        }
        a = a1;
        b = b1;
    }
    (a + b) / 2.0
}

/// Real roots of the monic cubic x³ + c2·x² + c1·x + c0, descending.
fn cubic_real_roots(c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    // depressed cubic t³ + pt + q, x = t - c2/3
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2.powi(3) / 27.0 - c2 * c1 / 3.0 + c0;
    let shift = -c2 / 3.0;
    let disc = -4.0 * p * p * p - 27.0 * q * q;
    let newton = |mut x: f64| -> f64 {
        for _ in 0..100 {
            let f = ((x + c2) * x + c1) * x + c0;
            let df = (3.0 * x + 2.0 * c2) * x + c1;
            let step = f / df;
            x -= step;
            if step.abs() < 1e-14 * (1.0 + x.abs()) {
                break;
            }
        }
        x
    };
    if disc > 0.0 {
        // three real roots by trigonometric method
        let m = 2.0 * (-p / 3.0).sqrt();
        let theta = (3.0 * q / (p * m)).clamp(-1.0, 1.0).acos() / 3.0;
        let mut roots: Vec<f64> = (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift)
            .map(newton)
            .collect();
        roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
        roots
    } else {
        // single real root via Cardano with a Newton polish
        let d = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        let u = (-q / 2.0 + d).cbrt();
        let v = (-q / 2.0 - d).cbrt();
        vec![newton(u + v + shift)]
    }
}

/// Ω_E^+ for a minimal model, to relative accuracy ~1e-13.
///
/// With B(x) = 4x³ + b2·x² + 2·b4·x + b6 = 4·h(x) and e_i the roots of h:
/// two components (Δ > 0) give 2π/AGM(√(e1-e3), √(e1-e2)); one component
/// (Δ < 0) gives π/AGM(√c, √((c+β)/2)) with β = e1 - Re(e2), c = |e1 - e2|.
pub fn real_period(w: &WeierstrassModel) -> f64 {
    let b2 = bigint_f64(&w.b2);
    let b4 = bigint_f64(&w.b4);
    let b6 = bigint_f64(&w.b6);
    // h = x³ + (b2/4)x² + (b4/2)x + b6/4
    let roots = cubic_real_roots(b2 / 4.0, b4 / 2.0, b6 / 4.0);
    if w.disc.is_positive() {
        let (e1, e2, e3) = (roots[0], roots[1], roots[2]);
        2.0 * std::f64::consts::PI / agm((e1 - e3).sqrt(), (e1 - e2).sqrt())
    } else {
        let e1 = roots[0];
        // complex pair from the quadratic h/(x - e1) = x² + sx + t
        let s = b2 / 4.0 + e1;
        let t = -bigint_f64(&w.b6) / 4.0 / e1.max(f64::MIN_POSITIVE).copysign(e1);
        // more stable: coefficients by synthetic division
        let c2 = b2 / 4.0;
        let c1 = b4 / 2.0;
        let _ = (s, t, c1);
        let q1 = c2 + e1; // x² + q1·x + q0
        let q0 = c1 + e1 * q1;
        let u = -q1 / 2.0;
        let v2 = q0 - u * u;
        debug_assert!(v2 > 0.0);
        let beta = e1 - u;
        let c = (beta * beta + v2).sqrt();
        std::f64::consts::PI / agm(c.sqrt(), ((c + beta) / 2.0).sqrt())
    }
}

fn bigint_f64(b: &BigInt) -> f64 {
    b.to_f64().expect("coefficient in f64 range")
}

/// Coefficients a_n for n ≤ terms by the Hecke recursions, bad primes from
/// the reduction types.
pub fn an_table(curve: &CurveArithmetic, terms: usize) -> Result<Vec<f64>, NumericError> {
    let mut a = vec![0.0f64; terms + 1];
    if terms >= 1 {
        a[1] = 1.0;
    }
    // smallest prime factor sieve
    let mut spf = vec![0u32; terms + 1];
    for i in 2..=terms {
        if spf[i] == 0 {
            let mut j = i;
            while j <= terms {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    for n in 2..=terms {
        let p = spf[n] as usize;
        let mut pk = p;
        let mut k = 1;
        while n % (pk * p) == 0 {
            pk *= p;
            k += 1;
        }
        let m = n / pk;
        if m > 1 {
            a[n] = a[m] * a[pk];
            continue;
        }
        // n = p^k
        let ap = prime_coeff(curve, p as u64)?;
        if k == 1 {
            a[n] = ap;
        } else if curve.conductor % (p as u64) == 0 {
            a[n] = a[n / p] * ap;
        } else {
            a[n] = ap * a[n / p] - (p as f64) * a[n / (p * p)];
        }
    }
    Ok(a)
}

fn prime_coeff(curve: &CurveArithmetic, p: u64) -> Result<f64, NumericError> {
    if curve.conductor % p == 0 {
        let local = curve
            .local
            .iter()
            .find(|l| l.ell == p)
            .expect("local data covers bad primes");
        Ok(match local.reduction {
            Reduction::SplitMult => 1.0,
            Reduction::NonsplitMult => -1.0,
            Reduction::Additive => 0.0,
            Reduction::Good => unreachable!(),
        })
    } else {
        Ok(crate::curves::frobenius_trace(&curve.minimal, p)? as f64)
    }
}

fn g_series(a: &[f64], n_cond: u64, t: f64) -> f64 {
    let x = (-2.0 * std::f64::consts::PI * t / (n_cond as f64).sqrt()).exp();
    let mut sum = 0.0;
    let mut xn = 1.0;
    for n in 1..a.len() {
        xn *= x;
        if a[n] != 0.0 {
            sum += a[n] / n as f64 * xn;
        }
        if xn < 1e-30 {
            break;
        }
    }
    sum
}

fn tail_bound(n_cond: u64, t: f64, terms: usize) -> f64 {
    // |a_n| ≤ d(n)√n ≤ 2n, so the tail is ≤ 2·x^{M+1}/(1-x)
    let x = (-2.0 * std::f64::consts::PI * t / (n_cond as f64).sqrt()).exp();
    2.0 * x.powi(terms as i32 + 1) / (1.0 - x)
}

/// L(E,1) ≈ (1+ε)·Σ a_n/n·e^{-2πn/√N}, with ε resolved numerically from the
/// functional equation by evaluating the split-point series at two points.
pub fn l_value_approx(curve: &CurveArithmetic, terms: usize) -> Result<AnalyticData, NumericError> {
    let n_cond = curve.conductor;
    let needed = ((n_cond as f64).sqrt() * 12.0) as usize + 50;
    if terms < needed {
        return Err(NumericError::InsufficientTerms { terms, needed });
    }
    let a = an_table(curve, terms)?;
    let g1 = g_series(&a, n_cond, 1.0);
    let tb = tail_bound(n_cond, 1.0, terms);
    // ε from L = G(s) + ε·G(1/s) independent of s
    let mut epsilon: Option<i8> = None;
    for s in [1.25f64, 1.5, 1.75, 2.0] {
        let gs = g_series(&a, n_cond, s);
        let gis = g_series(&a, n_cond, 1.0 / s);
        let denom = g1 - gis;
        if denom.abs() > 1e-6 {
            let e = (gs - g1) / denom;
            if (e - 1.0).abs() < 0.01 {
                epsilon = Some(1);
                break;
            }
            if (e + 1.0).abs() < 0.01 {
                epsilon = Some(-1);
                break;
            }
        }
    }
    let epsilon = epsilon.ok_or(NumericError::SignUnresolved)?;
    let l_value = (1.0 + epsilon as f64) * g1;
    Ok(AnalyticData {
        omega_plus: real_period(&curve.minimal),
        l_value,
        epsilon_numeric: epsilon,
        error_bound: 2.0 * tb + 1e-12,
    })
}

/// Recognize a float as a rational with bounded denominator by continued
/// fractions; None if no convergent within tol.
pub fn recognize_rational(x: f64, max_den: u64, tol: f64) -> Option<BigRational> {
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, 0i64, 1i64);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i64;
        let (p2, q2) = (ai * p0 + p1, ai * q0 + q1);
        if q2 == 0 || q2.unsigned_abs() > max_den {
            break;
        }
        (p1, q1, p0, q0) = (p0, q0, p2, q2);
        let approx = p0 as f64 / q0 as f64;
        if (approx - x).abs() <= tol * x.abs().max(1.0) {
            return Some(BigRational::new(BigInt::from(p0), BigInt::from(q0)));
        }
        let frac = v - a;
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    None
}

#[derive(Debug, Clone, Serialize)]
pub struct CrosscheckResult {
    /// δ_1 ÷ (L/Ω⁺) as a recognized small rational, when recognizable
    pub ratio: Option<(String, String)>,
    pub ok: bool,
    pub skipped: Option<String>,
}

/// Compare the exact δ_1 = [0/1] against the numeric L(E,1)/Ω⁺: ok iff their
/// ratio is a p-adic unit, consistent with the unit-content normalization.
pub fn delta_one_crosscheck(
    sym: &EigenSymbol,
    curve: &CurveArithmetic,
    tol: f64,
) -> Result<CrosscheckResult, NumericError> {
    let analytic = l_value_approx(curve, 4000.max(curve.conductor as usize * 20))?;
    let l_over_omega = analytic.l_value / analytic.omega_plus;
    if analytic.l_value.abs() < 100.0 * analytic.error_bound.max(1e-10) {
        return Ok(CrosscheckResult {
            ratio: None,
            ok: false,
            skipped: Some("L(E,1) is numerically indistinguishable from 0".into()),
        });
    }
    let exact = sym.evaluate(0, 1);
    let exact_f = bigint_f64(exact.numer()) / bigint_f64(exact.denom());
    let x = exact_f / l_over_omega;
    let Some(ratio) = recognize_rational(x, 10_000, tol.max(1e-6)) else {
        return Ok(CrosscheckResult {
            ratio: None,
            ok: false,
            skipped: Some("ratio not recognizable as a small rational".into()),
        });
    };
    let p = sym.p;
    let unit = !ratio.is_zero()
        && crate::arith::valuation_bigint(ratio.numer(), p) == 0
        && crate::arith::valuation_bigint(ratio.denom(), p) == 0;
    Ok(CrosscheckResult {
        ratio: Some((ratio.numer().to_string(), ratio.denom().to_string())),
        ok: unit,
        skipped: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{analyze_curve, WeierstrassModel};

    #[test]
    fn period_of_11a() {
        let w = WeierstrassModel::from_ai([0, -1, 1, -10, -20]).unwrap();
        let omega = real_period(&w);
        assert!((omega - 1.2692093042795537).abs() < 1e-9, "got {omega}");
    }

    #[test]
    fn lemniscate_period() {
        // y² = x³ - x: Ω⁺ = 2ϖ where ϖ is the lemniscate constant
        let w = WeierstrassModel::from_ai([0, 0, 0, -1, 0]).unwrap();
        let omega = real_period(&w);
        assert!((omega - 5.244115108584239).abs() < 1e-9, "got {omega}");
    }

    #[test]
    fn period_scaling() {
        // scaling the model by u divides the period by u
        let w1 = WeierstrassModel::from_ai([0, 0, 0, 0, 1]).unwrap();
        let w2 = WeierstrassModel::from_ai([0, 0, 0, 0, 64]).unwrap();
        assert!((real_period(&w2) - real_period(&w1) / 2.0).abs() < 1e-10);
    }

    #[test]
    fn l_values() {
        let w = WeierstrassModel::from_ai([0, -1, 1, -10, -20]).unwrap();
        let curve = analyze_curve(&w, 7).unwrap();
        let d = l_value_approx(&curve, 4000).unwrap();
        assert_eq!(d.epsilon_numeric, 1);
        let ratio = d.l_value / d.omega_plus;
        assert!((ratio - 0.2).abs() < 1e-6, "L/Ω = {ratio}");

        let w = WeierstrassModel::from_ai([0, 0, 1, -1, 0]).unwrap();
        let curve = analyze_curve(&w, 5).unwrap();
        let d = l_value_approx(&curve, 4000).unwrap();
        assert_eq!(d.epsilon_numeric, -1);
        assert!(d.l_value.abs() < 1e-8, "L(37a,1) = {}", d.l_value);
    }

    #[test]
    fn series_tail_contract() {
        let w = WeierstrassModel::from_ai([0, -1, 1, -10, -20]).unwrap();
        let curve = analyze_curve(&w, 7).unwrap();
        let d1 = l_value_approx(&curve, 2000).unwrap();
        let d2 = l_value_approx(&curve, 4000).unwrap();
        assert!((d1.l_value - d2.l_value).abs() <= d1.error_bound);
    }

    #[test]
    fn rational_recognition() {
        let r = recognize_rational(0.2, 100, 1e-9).unwrap();
        assert_eq!(r, BigRational::new(BigInt::from(1), BigInt::from(5)));
        let r = recognize_rational(-1.25, 100, 1e-9).unwrap();
        assert_eq!(r, BigRational::new(BigInt::from(-5), BigInt::from(4)));
        assert!(recognize_rational(std::f64::consts::PI, 10, 1e-12).is_none());
    }
}
