//! Exact elliptic-curve arithmetic over Q and finite fields: minimal models,
//! Tate's algorithm, Frobenius traces, local p-torsion and hypothesis
//! heuristics.

pub mod count;
pub mod divpoly;
pub mod surject;
pub mod tate;
pub mod torsion;
pub mod weierstrass;

use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

pub use count::{count_points, frobenius_trace};
pub use surject::{mod_p_surjectivity_heuristic, SurjectivityVerdict};
pub use tate::{tate_local_data, KodairaType, LocalData, Reduction};
pub use torsion::{local_p_torsion_order, TorsionOrder};
pub use weierstrass::{minimal_model, WeierstrassModel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("singular Weierstrass equation (discriminant is zero)")]
    Singular,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("bad reduction at {0}; operation requires good reduction")]
    BadReduction(u64),
    #[error("model is not minimal at {0}")]
    NotMinimal(u64),
    #[error("coefficients too large for exact factorization at desk scale")]
    TooLarge,
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionAtP {
    GoodOrdinary,
    GoodSupersingular,
    Multiplicative,
    Additive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict3 {
    Yes,
    No,
    Inconclusive,
}

/// Hypothesis bookkeeping carried into verdicts downstream.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HypothesisFlags {
    /// mod-p Galois image surjectivity (three-valued heuristic)
    pub sur: Verdict3,
    /// Manin-constant condition; `Yes` when p² does not divide N
    pub manin_ok: Verdict3,
    /// many vanishing traces sampled; curve may have CM
    pub cm_suspect: bool,
}

/// Everything the rest of the pipeline needs to know about (E, p).
#[derive(Debug, Clone)]
pub struct CurveArithmetic {
    pub minimal: WeierstrassModel,
    pub conductor: u64,
    pub local: Vec<LocalData>,
    pub tam: u64,
    pub p: u64,
    pub reduction_at_p: ReductionAtP,
    /// exponent t with p^t = #E(Q_p)[p^∞]; None at bad reduction
    pub t: Option<u32>,
    /// root number, filled once the eigensymbol is known
    pub epsilon: Option<i8>,
    pub flags: HypothesisFlags,
}

impl CurveArithmetic {
    pub fn ord_p_tam(&self) -> u32 {
        crate::arith::valuation_u64_or_zero(self.tam, self.p)
    }
}

/// #Ẽ_ns(F_ℓ), the number of nonsingular points of the reduction.
pub fn nonsingular_count(w: &WeierstrassModel, ell: u64) -> Result<u64, CurveError> {
    let data = tate_local_data(w, ell)?;
    Ok(match data.reduction {
        Reduction::Good => count_points(w, ell)?,
        Reduction::SplitMult => ell - 1,
        Reduction::NonsplitMult => ell + 1,
        Reduction::Additive => ell,
    })
}

/// Reduction type of E at p, refined by ordinarity for good p.
pub fn reduction_type_at_p(w: &WeierstrassModel, p: u64) -> Result<ReductionAtP, CurveError> {
    let data = tate_local_data(w, p)?;
    Ok(match data.reduction {
        Reduction::Good => {
            let a_p = frobenius_trace(w, p)?;
            if a_p.rem_euclid(p as i64) == 0 {
                ReductionAtP::GoodSupersingular
            } else {
                ReductionAtP::GoodOrdinary
            }
        }
        Reduction::SplitMult | Reduction::NonsplitMult => ReductionAtP::Multiplicative,
        Reduction::Additive => ReductionAtP::Additive,
    })
}

/// Assemble the full curve record at an odd prime p: minimal model, conductor,
/// local data, Tamagawa product, reduction type, local torsion exponent and
/// hypothesis flags.
pub fn analyze_curve(w: &WeierstrassModel, p: u64) -> Result<CurveArithmetic, CurveError> {
    if p < 3 || !crate::arith::is_prime_u64(p) {
        return Err(CurveError::NotPrime(p));
    }
    let minimal = minimal_model(w)?;
    let disc = minimal
        .disc
        .to_i128()
        .ok_or(CurveError::TooLarge)?
        .unsigned_abs();
    let disc_u64: u64 = disc.try_into().map_err(|_| CurveError::TooLarge)?;
    let mut local = Vec::new();
    let mut conductor: u64 = 1;
    let mut tam: u64 = 1;
    for (ell, _) in crate::arith::factor_u64(disc_u64) {
        let data = tate_local_data(&minimal, ell)?;
        if data.reduction == Reduction::Good {
            continue;
        }
        conductor = conductor
            .checked_mul(ell.pow(data.f))
            .ok_or(CurveError::TooLarge)?;
        tam = tam.checked_mul(data.c).ok_or(CurveError::TooLarge)?;
        local.push(data);
    }
    let reduction_at_p = reduction_type_at_p(&minimal, p)?;
    let t = match reduction_at_p {
        ReductionAtP::GoodOrdinary | ReductionAtP::GoodSupersingular => {
            match local_p_torsion_order(&minimal, p, 16)? {
                TorsionOrder::Exact(t) => Some(t),
                TorsionOrder::LowerBound(t) => Some(t),
            }
        }
        _ => None,
    };
    let sur = match mod_p_surjectivity_heuristic(&minimal, p, 1000)? {
        SurjectivityVerdict::Surjective => Verdict3::Yes,
        SurjectivityVerdict::NotSurjective => Verdict3::No,
        SurjectivityVerdict::Inconclusive => Verdict3::Inconclusive,
    };
    let manin_ok = if conductor % (p * p) != 0 {
        Verdict3::Yes
    } else {
        Verdict3::Inconclusive
    };
    let cm_suspect = surject::cm_suspect(&minimal, 300)?;
    Ok(CurveArithmetic {
        minimal,
        conductor,
        local,
        tam,
        p,
        reduction_at_p,
        t,
        epsilon: None,
        flags: HypothesisFlags {
            sur,
            manin_ok,
            cm_suspect,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analyze_11a() {
        let w = WeierstrassModel::from_ai([0, -1, 1, -10, -20]).unwrap();
        let c = analyze_curve(&w, 7).unwrap();
        assert_eq!(c.conductor, 11);
        assert_eq!(c.tam, 5);
        assert_eq!(c.reduction_at_p, ReductionAtP::GoodOrdinary);
        assert_eq!(c.t, Some(0));
        assert_eq!(c.flags.manin_ok, Verdict3::Yes);
    }

    #[test]
    fn analyze_37a() {
        let w = WeierstrassModel::from_ai([0, 0, 1, -1, 0]).unwrap();
        let c = analyze_curve(&w, 5).unwrap();
        assert_eq!(c.conductor, 37);
        assert_eq!(c.tam, 1);
    }

    #[test]
    fn nonsingular_counts() {
        let w = WeierstrassModel::from_ai([0, -1, 1, -10, -20]).unwrap();
        // split multiplicative at 11
        assert_eq!(nonsingular_count(&w, 11).unwrap(), 10);
        // good at 7: ℓ+1-a_ℓ
        let a7 = frobenius_trace(&w, 7).unwrap();
        assert_eq!(nonsingular_count(&w, 7).unwrap(), (8 - a7) as u64);
    }

    #[test]
    fn reduction_types() {
        let w = WeierstrassModel::from_ai([0, 0, 0, 0, 1]).unwrap();
        assert_eq!(
            reduction_type_at_p(&w, 5).unwrap(),
            ReductionAtP::GoodSupersingular
        );
        let w = WeierstrassModel::from_ai([0, -1, 1, -10, -20]).unwrap();
        assert_eq!(reduction_type_at_p(&w, 7).unwrap(), ReductionAtP::GoodOrdinary);
        assert_eq!(
            reduction_type_at_p(&w, 11).unwrap(),
            ReductionAtP::Multiplicative
        );
    }
}
