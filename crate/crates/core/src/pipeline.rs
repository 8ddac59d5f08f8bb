//! Orchestration shared by the CLI and the Python bindings: curve analysis,
//! eigensymbol construction with the persistent cache, and report assembly.

use std::path::Path;

use thiserror::Error;

use crate::curves::{analyze_curve, CurveArithmetic, CurveError, WeierstrassModel};
use crate::modsym::{
    atkin_lehner_sign, build_plus_space, cache, normalize_p_integral, rational_eigensymbol,
    EigenSymbol, ModSymError,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("curve spec: {0}")]
    Parse(String),
    #[error("curve: {0}")]
    Curve(#[from] CurveError),
    #[error("modular symbols: {0}")]
    ModSym(#[from] ModSymError),
    #[error("kurihara: {0}")]
    Kurihara(#[from] crate::kurihara::KuriharaError),
    #[error("heegner: {0}")]
    Heegner(#[from] crate::heegner::HeegnerError),
    #[error("numeric: {0}")]
    Numeric(#[from] crate::numeric::NumericError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl PipelineError {
    /// Distinct machine-readable code per failure family.
    pub fn code(&self) -> &'static str {
        match self {
            PipelineError::Parse(_) => "E_PARSE",
            PipelineError::Curve(CurveError::Singular) => "E_SINGULAR",
            PipelineError::Curve(_) => "E_CURVE",
            PipelineError::ModSym(_) => "E_MODSYM",
            PipelineError::Kurihara(crate::kurihara::KuriharaError::BudgetExceeded {
                ..
            }) => "E_BUDGET",
            PipelineError::Kurihara(_) => "E_KURIHARA",
            PipelineError::Heegner(_) => "E_HEEGNER",
            PipelineError::Numeric(_) => "E_NUMERIC",
            PipelineError::Io(_) => "E_IO",
        }
    }
}

/// Parse the curve grammar: `a1,a2,a3,a4,a6` as decimal integers, or
/// `@file:line` pointing at a table of the same grammar (1-based line).
pub fn parse_curve_spec(text: &str) -> Result<WeierstrassModel, PipelineError> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix('@') {
        let (path, line) = rest
            .rsplit_once(':')
            .ok_or_else(|| PipelineError::Parse("expected @file:line".into()))?;
        let lineno: usize = line
            .parse()
            .map_err(|_| PipelineError::Parse(format!("bad line number {line:?}")))?;
        if lineno == 0 {
            return Err(PipelineError::Parse("line numbers are 1-based".into()));
        }
        let content = std::fs::read_to_string(path)?;
        let line = content
            .lines()
            .nth(lineno - 1)
            .ok_or_else(|| PipelineError::Parse(format!("{path} has no line {lineno}")))?;
        return parse_curve_spec(line);
    }
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(PipelineError::Parse(format!(
            "expected 5 comma-separated integers, got {}",
            parts.len()
        )));
    }
    let mut a = [0i64; 5];
    for (slot, part) in a.iter_mut().zip(&parts) {
        *slot = part
            .parse()
            .map_err(|_| PipelineError::Parse(format!("bad integer {part:?}")))?;
    }
    Ok(WeierstrassModel::from_ai(a)?)
}

/// The symbol layer's output for reports.
#[derive(Debug, Clone)]
pub struct SymbolInfo {
    pub symbol: EigenSymbol,
    pub epsilon: i8,
    pub plus_dim: usize,
    pub cuspidal_dim: usize,
    pub from_cache: bool,
}

/// Default probe primes: good primes in ascending order.
pub fn default_probes(conductor: u64, count: usize) -> Vec<u64> {
    crate::arith::primes_up_to(200)
        .into_iter()
        .filter(|q| conductor % q != 0)
        .take(count)
        .collect()
}

/// Build (or load from cache) the normalized eigensymbol for the curve.
pub fn obtain_symbol(
    curve: &mut CurveArithmetic,
    cache_dir: Option<&Path>,
) -> Result<SymbolInfo, PipelineError> {
    if let Some(dir) = cache_dir {
        if let Some(hit) = cache::load(dir, &curve.minimal, curve.p) {
            curve.epsilon = Some(hit.epsilon);
            return Ok(SymbolInfo {
                symbol: hit.symbol,
                epsilon: hit.epsilon,
                plus_dim: hit.plus_dim,
                cuspidal_dim: hit.cuspidal_dim,
                from_cache: true,
            });
        }
    }
    let space = build_plus_space(curve.conductor)?;
    let probes = default_probes(curve.conductor, 8);
    let raw = rational_eigensymbol(&space, curve, &probes)?;
    let epsilon = atkin_lehner_sign(&space, &raw)?;
    let symbol = normalize_p_integral(&raw, curve.p)?;
    curve.epsilon = Some(epsilon);
    if let Some(dir) = cache_dir {
        let rec = cache::record_from(
            &symbol,
            &curve.minimal,
            epsilon,
            space.dim,
            space.cuspidal_dim(),
        );
        cache::store(dir, &curve.minimal, curve.p, &rec)?;
    }
    Ok(SymbolInfo {
        symbol,
        epsilon,
        plus_dim: space.dim,
        cuspidal_dim: space.cuspidal_dim(),
        from_cache: false,
    })
}

/// Analyze a curve at p from its spec string.
pub fn analyze_from_spec(spec: &str, p: u64) -> Result<CurveArithmetic, PipelineError> {
    let w = parse_curve_spec(spec)?;
    Ok(analyze_curve(&w, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_grammar() {
        let w = parse_curve_spec("0,-1,1,-10,-20").unwrap();
        assert_eq!(w.disc.to_string(), "-161051");
        assert!(matches!(
            parse_curve_spec("0,0,0,0,0"),
            Err(PipelineError::Curve(CurveError::Singular))
        ));
        assert!(matches!(
            parse_curve_spec("1,2,3"),
            Err(PipelineError::Parse(_))
        ));
        assert!(matches!(
            parse_curve_spec("a,b,c,d,e"),
            Err(PipelineError::Parse(_))
        ));
    }

    #[test]
    fn parse_file_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curves.txt");
        std::fs::write(&path, "1,0,0,0,1\n0,0,1,-1,0\n0,-1,1,-10,-20\n").unwrap();
        let spec = format!("@{}:3", path.display());
        let w = parse_curve_spec(&spec).unwrap();
        assert_eq!(w.disc.to_string(), "-161051");
        let bad = format!("@{}:9", path.display());
        assert!(parse_curve_spec(&bad).is_err());
    }

    #[test]
    fn symbol_cache_pipeline() {
        let dir = tempfile::tempdir().unwrap();
        let mut curve = analyze_from_spec("0,-1,1,-10,-20", 7).unwrap();
        let cold = obtain_symbol(&mut curve, Some(dir.path())).unwrap();
        assert!(!cold.from_cache);
        let warm = obtain_symbol(&mut curve, Some(dir.path())).unwrap();
        assert!(warm.from_cache);
        assert!(cold.symbol.same_table(&warm.symbol));
        assert_eq!(cold.epsilon, warm.epsilon);
    }
}
