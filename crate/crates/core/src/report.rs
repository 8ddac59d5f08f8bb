//! JSON report fragments. Everything is routed through `serde_json::Value`,
//! whose map is a BTreeMap, so keys serialize sorted and reports are
//! byte-stable for fixed inputs and tool version. Large residues are decimal
//! strings.

use serde_json::{json, Value};

use crate::curves::CurveArithmetic;
use crate::heegner::{HeegnerPrime, HeegnerSetup, IndexPredictions, UnitRoot};
use crate::kurihara::{DeltaResult, DivIndex, SearchReport};
use crate::numeric::{AnalyticData, CrosscheckResult};
use crate::pipeline::SymbolInfo;

pub fn curve_json(c: &CurveArithmetic) -> Value {
    let a = c.minimal.a_invariants();
    json!({
        "a_invariants": a.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "conductor": c.conductor,
        "discriminant": c.minimal.disc.to_string(),
        "local": c.local.iter().map(|l| json!({
            "ell": l.ell,
            "f": l.f,
            "kodaira": l.kodaira.to_string(),
            "c": l.c,
            "reduction": l.reduction,
        })).collect::<Vec<_>>(),
        "tam_e": c.tam,
        "ord_p_tam": c.ord_p_tam(),
        "p": c.p,
        "reduction_at_p": c.reduction_at_p,
        "t": c.t,
        "flags": {
            "sur": c.flags.sur,
            "manin_ok": c.flags.manin_ok,
            "cm_suspect": c.flags.cm_suspect,
        },
    })
}

pub fn symbol_json(info: &SymbolInfo) -> Value {
    json!({
        "plus_dim": info.plus_dim,
        "cuspidal_dim": info.cuspidal_dim,
        "probes": info.symbol.probe_eigenvalues,
        "epsilon": info.epsilon,
        "from_cache": info.from_cache,
        "normalization_scale": [
            info.symbol.scale_applied.numer().to_string(),
            info.symbol.scale_applied.denom().to_string(),
        ],
    })
}

pub fn delta_json(d: &DeltaResult) -> Value {
    json!({
        "n": d.n,
        "factors": d.factors,
        "e_n": d.e_n,
        "residue": d.residue_string(),
        "m": match d.m {
            DivIndex::Finite(v) => json!(v),
            DivIndex::Vanishes => json!("VANISHES"),
        },
    })
}

pub fn sweep_json(r: &SearchReport) -> Value {
    json!({
        "bounds": {
            "ell_max": r.bounds.ell_max,
            "r_max": r.bounds.r_max,
            "m": r.bounds.m,
            "diagnostic_parity": r.bounds.diagnostic_parity,
            "work_budget": r.bounds.work_budget,
        },
        "epsilon": r.epsilon,
        "kolyvagin_primes": r.primes.iter().map(|k| json!({
            "ell": k.ell, "a_ell": k.a_ell, "e": k.e, "eta": k.eta,
        })).collect::<Vec<_>>(),
        "deltas": r.deltas.iter().map(delta_json).collect::<Vec<_>>(),
        "diagnostic_deltas": r.diagnostic_deltas.iter().map(delta_json).collect::<Vec<_>>(),
        "m_table": r.m_table.iter().map(|(r, m)| json!({
            "r": r,
            "m_r": m.map_or(json!("INF"), |v| json!(v)),
        })).collect::<Vec<_>>(),
        "rho": r.rho,
        "m_inf_upper": r.m_infinity_upper,
        "ord_p_tam": r.tam_ord_p,
        "verdict": r.verdict,
        "sha_prediction": r.sha_prediction,
        "caveats": r.caveats,
    })
}

pub fn heegner_json(
    setup: &HeegnerSetup,
    primes: &[HeegnerPrime],
    alpha: Option<&UnitRoot>,
    pred: Option<&IndexPredictions>,
) -> Value {
    json!({
        "d_k": setup.d_k,
        "flags": setup.flags,
        "primes": primes,
        "alpha_p": alpha.map(|r| json!({
            "p": r.p,
            "a_p": r.a_p,
            "precision": r.precision,
            "alpha": r.alpha.to_string(),
            "beta": r.beta.to_string(),
        })),
        "predictions": pred.map(|p| json!({
            "heeg": p.m_inf_heeg_predicted,
            "lambda": p.m_inf_lambda_predicted,
            "local_sum": p.local_sum,
        })),
        "caveats": pred.map(|p| p.caveats.clone()).unwrap_or_default(),
    })
}

pub fn numeric_json(a: Option<&AnalyticData>, cross: Option<&CrosscheckResult>) -> Value {
    json!({
        "analytic": a.map(|a| json!({
            "omega_plus": a.omega_plus,
            "l_value": a.l_value,
            "epsilon_numeric": a.epsilon_numeric,
            "error_bound": a.error_bound,
        })),
        "delta_one_crosscheck": cross,
    })
}

/// Assemble the full document. `timings` is the only section excluded from
/// byte-stability guarantees.
pub fn full_report(
    config: Value,
    curve: Value,
    symbol: Option<Value>,
    sweep: Option<Value>,
    heegner: Option<Value>,
    numeric: Option<Value>,
    timings: Value,
) -> Value {
    json!({
        "tool_version": crate::TOOL_VERSION,
        "config": config,
        "curve": curve,
        "symbol": symbol,
        "sweep": sweep,
        "heegner": heegner,
        "numeric": numeric,
        "timings": timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_sorted() {
        let v = json!({"zeta": 1, "alpha": 2, "mid": 3});
        let s = serde_json::to_string(&v).unwrap();
        let za = s.find("zeta").unwrap();
        let al = s.find("alpha").unwrap();
        assert!(al < za, "serde_json map must sort keys: {s}");
    }
}
