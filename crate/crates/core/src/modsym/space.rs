//! The plus quotient of the weight-2 modular symbol space for Γ₀(N) in its
//! Manin-symbol presentation, with the boundary map to cusps.
//!
//! Generators are P¹(Z/N) classes (c:d). The quotient is by
//!   x + x·σ = 0,  x + x·τ + x·τ² = 0,  x − x·J = 0,
//! where σ = [[0,-1],[1,0]], τ = [[0,-1],[1,-1]], J = [[-1,0],[0,1]] act on
//! the right through the bottom row. Relations in the σ/J orbits are folded
//! by a signed union-find; the 3-term relations are solved by sparse exact
//! Gaussian elimination over Q.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::arith::{gcd_i128, gcd_u64};
use crate::modsym::linalg::{QMat, QQ};
use crate::modsym::p1::P1Table;
use crate::modsym::ModSymError;

/// Sparse vector over the free generators, sorted by position.
pub type SparseRow = Vec<(u32, QQ)>;

#[derive(Debug, Clone)]
pub struct ManinSymbolSpace {
    pub level: u64,
    pub p1: Arc<P1Table>,
    /// dimension of the plus quotient
    pub dim: usize,
    /// P¹ class indices of the free generators (columns of the quotient)
    pub free_gens: Vec<usize>,
    /// expansion of every P¹ class in terms of the free generators
    pub expansions: Vec<SparseRow>,
    /// basis of the kernel of the boundary map, in quotient coordinates
    pub cuspidal_basis: Vec<Vec<QQ>>,
    /// number of plus-folded cusp classes
    pub n_cusps: usize,
}

impl ManinSymbolSpace {
    pub fn cuspidal_dim(&self) -> usize {
        self.cuspidal_basis.len()
    }
}

fn sigma(c: u64, d: u64, n: u64) -> (u64, u64) {
    (d, (n - c % n) % n)
}

fn tau(c: u64, d: u64, n: u64) -> (u64, u64) {
    (d, (2 * n - c - d) % n)
}

fn inv_j(c: u64, d: u64, n: u64) -> (u64, u64) {
    ((n - c % n) % n, d)
}

/// Signed union-find: x_i = sign · x_root, with roots possibly forced to 0.
struct SignedUf {
    parent: Vec<u32>,
    /// sign relative to parent: +1 or -1
    sign: Vec<i8>,
    zero: Vec<bool>,
}

impl SignedUf {
    fn new(n: usize) -> Self {
        SignedUf {
            parent: (0..n as u32).collect(),
            sign: vec![1; n],
            zero: vec![false; n],
        }
    }

    fn find(&mut self, i: usize) -> (usize, i8) {
        if self.parent[i] as usize == i {
            return (i, 1);
        }
        let (root, s) = self.find(self.parent[i] as usize);
        self.parent[i] = root as u32;
        self.sign[i] *= s;
        (root, self.sign[i])
    }

    /// impose x_a = s · x_b
    fn unite(&mut self, a: usize, b: usize, s: i8) {
        let (ra, sa) = self.find(a);
        let (rb, sb) = self.find(b);
        if ra == rb {
            // x_ra consistent iff sa == s * sb
            if sa != s * sb {
                self.zero[ra] = true;
            }
            return;
        }
        // x_ra = (s * sb / sa) x_rb ... signs are ±1 so division = product
        self.parent[ra] = rb as u32;
        self.sign[ra] = s * sb * sa;
        if self.zero[ra] {
            self.zero[rb] = true;
        }
    }

    fn is_zero(&mut self, i: usize) -> bool {
        let (r, _) = self.find(i);
        self.zero[r]
    }
}

/// Build the plus-quotient presentation at level N.
pub fn build_plus_space(level: u64) -> Result<ManinSymbolSpace, ModSymError> {
    let p1 = Arc::new(P1Table::new(level));
    let n = p1.count();
    let idx = |pair: (u64, u64)| -> usize { p1.lookup_u(pair.0, pair.1).unwrap() };
    let mut uf = SignedUf::new(n);
    if level == 1 {
        // single generator killed by the sigma relation (2x = 0)
        let (r, _) = uf.find(0);
        uf.zero[r] = true;
    } else {
        for i in 0..n {
            let (c, d) = p1.reps[i];
            let (c, d) = (c as u64, d as u64);
            // x + x·σ = 0
            uf.unite(i, idx(sigma(c, d, level)), -1);
            // plus involution: x = x·J
            uf.unite(i, idx(inv_j(c, d, level)), 1);
        }
    }
    // 3-term relations over the surviving representatives
    let mut rows: Vec<HashMap<u32, QQ>> = Vec::new();
    let mut seen = vec![false; n];
    for i in 0..n {
        if seen[i] || level == 1 {
            continue;
        }
        let (c, d) = p1.reps[i];
        let (c, d) = (c as u64, d as u64);
        let j = idx(tau(c, d, level));
        let t2 = tau(p1.reps[j].0 as u64, p1.reps[j].1 as u64, level);
        let k = idx(t2);
        seen[i] = true;
        seen[j] = true;
        seen[k] = true;
        let mut row: HashMap<u32, QQ> = HashMap::new();
        for term in [i, j, k] {
            if uf.is_zero(term) {
                continue;
            }
            let (root, s) = uf.find(term);
            *row.entry(root as u32).or_insert_with(QQ::zero) +=
                QQ::from(num_bigint::BigInt::from(s));
        }
        row.retain(|_, v| !v.is_zero());
        if !row.is_empty() {
            rows.push(row);
        }
    }
    // variables: the non-zero roots
    let mut is_root_var = vec![false; n];
    for i in 0..n {
        if !uf.is_zero(i) {
            let (r, _) = uf.find(i);
            is_root_var[r] = true;
        }
    }

    // sparse Gaussian elimination; pivot picked to minimize fill using static
    // column counts
    let mut col_count: HashMap<u32, usize> = HashMap::new();
    for row in &rows {
        for &v in row.keys() {
            *col_count.entry(v).or_insert(0) += 1;
        }
    }
    rows.sort_by_key(|r| r.len());
    let mut pivots: Vec<(u32, HashMap<u32, QQ>)> = Vec::new();
    let mut pivot_of: HashMap<u32, usize> = HashMap::new();
    let mut queue: std::collections::VecDeque<HashMap<u32, QQ>> = rows.into();
    while let Some(mut row) = queue.pop_front() {
        // reduce against existing pivots
        loop {
            let mut hit = None;
            for v in row.keys() {
                if let Some(&pi) = pivot_of.get(v) {
                    hit = Some((*v, pi));
                    break;
                }
            }
            let Some((v, pi)) = hit else { break };
            // pivot row encodes x_v = -Σ coef·x_w; eliminate x_v directly
            let factor = row.remove(&v).unwrap();
            let prow = pivots[pi].1.clone();
            for (w, coef) in prow {
                let e = row.entry(w).or_insert_with(QQ::zero);
                *e -= &factor * &coef;
            }
            row.retain(|_, val| !val.is_zero());
        }
        if row.is_empty() {
            continue;
        }
        // pick pivot minimizing column count, ties to smallest index
        let pvar = *row
            .keys()
            .min_by_key(|v| (col_count.get(v).copied().unwrap_or(0), **v))
            .unwrap();
        let inv = row[&pvar].clone();
        let mut norm: HashMap<u32, QQ> = HashMap::new();
        for (w, coef) in &row {
            if *w != pvar {
                norm.insert(*w, coef / &inv);
            }
        }
        // pivot row stored as: x_pvar = -Σ norm[w]·x_w
        pivot_of.insert(pvar, pivots.len());
        pivots.push((pvar, norm));
    }
    // back-substitute so pivot rows mention only free variables
    for i in (0..pivots.len()).rev() {
        let mut row = std::mem::take(&mut pivots[i].1);
        loop {
            let mut hit = None;
            for v in row.keys() {
                if let Some(&pi) = pivot_of.get(v) {
                    if pi > i {
                        hit = Some((*v, pi));
                        break;
                    }
                }
            }
            let Some((v, pi)) = hit else { break };
            let factor = row.remove(&v).unwrap();
            for (w, coef) in &pivots[pi].1 {
                let e = row.entry(*w).or_insert_with(QQ::zero);
                // x_v = -Σ coef·x_w, so factor·x_v = -Σ factor·coef·x_w
                *e -= &factor * coef;
            }
            row.retain(|_, val| !val.is_zero());
        }
        pivots[i].1 = row;
    }
    // free generators: root variables that are not pivots
    let mut free_gens: Vec<usize> = (0..n)
        .filter(|&i| is_root_var[i] && !pivot_of.contains_key(&(i as u32)))
        .collect();
    free_gens.sort_unstable();
    let dim = free_gens.len();
    let pos_of: HashMap<u32, u32> = free_gens
        .iter()
        .enumerate()
        .map(|(k, &g)| (g as u32, k as u32))
        .collect();
    // expansion of each root variable
    let mut root_expansion: HashMap<u32, SparseRow> = HashMap::new();
    for &g in &free_gens {
        root_expansion.insert(g as u32, vec![(pos_of[&(g as u32)], QQ::from(num_bigint::BigInt::from(1)))]);
    }
    for (pvar, row) in &pivots {
        let mut expansion: SparseRow = row
            .iter()
            .map(|(w, coef)| (pos_of[w], -coef.clone()))
            .collect();
        expansion.sort_by_key(|&(i, _)| i);
        root_expansion.insert(*pvar, expansion);
    }

    // expansion of every P¹ class
    let mut expansions: Vec<SparseRow> = Vec::with_capacity(n);
    for i in 0..n {
        if uf.is_zero(i) {
            expansions.push(Vec::new());
            continue;
        }
        let (root, s) = uf.find(i);
        let base = root_expansion
            .get(&(root as u32))
            .cloned()
            .unwrap_or_default();
        let row: SparseRow = if s == 1 {
            base
        } else {
            base.into_iter().map(|(j, v)| (j, -v)).collect()
        };
        expansions.push(row);
    }
    // boundary map on the free generators, into plus-folded cusp classes
    let mut cusps = CuspClasses::new(level);
    let mut boundary_cols: Vec<Vec<(usize, i8)>> = Vec::with_capacity(dim);
    for &g in &free_gens {
        let (c, d) = p1.reps[g];
        let (a, b, cc, dd) = lift_to_sl2(c as u64, d as u64, level);
        // path {b/dd -> a/cc}: boundary [a/cc] - [b/dd]
        let head = cusps.class_of(a, cc);
        let tail = cusps.class_of(b, dd);
        let mut col = Vec::new();
        if head != tail {
            col.push((head, 1i8));
            col.push((tail, -1i8));
        }
        boundary_cols.push(col);
    }
    let n_cusps = cusps.reps.len();
    let mut boundary = QMat::zero(n_cusps, dim);
    for (j, col) in boundary_cols.iter().enumerate() {
        for &(i, s) in col {
            boundary[(i, j)] = QQ::from(num_bigint::BigInt::from(s));
        }
    }
    let cuspidal_basis = boundary.kernel_basis();

    Ok(ManinSymbolSpace {
        level,
        p1,
        dim,
        free_gens,
        expansions,
        cuspidal_basis,
        n_cusps,
    })
}

/// Lift a P¹(Z/N) class (c:d) to a matrix [[a, b], [c', d']] in SL₂(Z).
pub fn lift_to_sl2(c: u64, d: u64, n: u64) -> (i128, i128, i128, i128) {
    if n == 1 {
        return (1, 0, 0, 1);
    }
    let c = (c % n) as i128;
    let d = (d % n) as i128;
    let n = n as i128;
    // adjust d by multiples of N until gcd(c, d') = 1 (c itself adjusted if 0)
    let c = if c == 0 && d != 1 { n } else { c };
    let (c, d) = if c == 0 { (0, 1) } else { (c, d) };
    let mut dd = d;
    let mut k = 0;
    while gcd_i128(c, dd) != 1 {
        dd += n;
        k += 1;
        assert!(k < 4 * n, "P¹ lift failed for ({c}:{d}) mod {n}");
    }
    // a·dd - b·c = 1
    let (g, x, y) = egcd_i128(dd, c);
    debug_assert_eq!(g, 1);
    let (a, b) = (x, -y);
    debug_assert_eq!(a * dd - b * c, 1);
    (a, b, c, dd)
}

fn egcd_i128(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = egcd_i128(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Γ₀(N)-classes of cusps, folded by negation (the plus involution).
pub struct CuspClasses {
    level: u64,
    pub reps: Vec<(i128, i128)>,
}

impl CuspClasses {
    pub fn new(level: u64) -> Self {
        CuspClasses {
            level,
            reps: Vec::new(),
        }
    }

    /// Class index of the cusp num/den (den = 0 for ∞), interning new classes.
    pub fn class_of(&mut self, num: i128, den: i128) -> usize {
        let c = normalize_cusp(num, den);
        for (i, r) in self.reps.iter().enumerate() {
            if cusps_equivalent(self.level, c, *r) || cusps_equivalent(self.level, (-c.0, c.1), *r)
            {
                return i;
            }
        }
        self.reps.push(c);
        self.reps.len() - 1
    }
}

fn normalize_cusp(num: i128, den: i128) -> (i128, i128) {
    if den == 0 {
        return (1, 0);
    }
    let g = gcd_i128(num, den);
    let (mut a, mut q) = (num / g, den / g);
    if q < 0 {
        a = -a;
        q = -q;
    }
    (a, q)
}

/// Γ₀(N)-equivalence of reduced cusps a1/q1 and a2/q2 (q ≥ 0, gcd = 1).
pub fn cusps_equivalent(n: u64, c1: (i128, i128), c2: (i128, i128)) -> bool {
    let n = n as i128;
    let (p1, q1) = c1;
    let (p2, q2) = c2;
    let inf1 = q1.rem_euclid(n) == 0;
    let inf2 = q2.rem_euclid(n) == 0;
    if inf1 || inf2 {
        return inf1 && inf2;
    }
    // s_i with p_i·s_i ≡ 1 (mod q_i)
    let s1 = inv_mod_i128(p1, q1);
    let s2 = inv_mod_i128(p2, q2);
    let g = gcd_i128(q1 * q2, n);
    (s1 * q2 - s2 * q1).rem_euclid(g) == 0
}

fn inv_mod_i128(a: i128, m: i128) -> i128 {
    if m == 1 {
        return 0;
    }
    let (g, x, _) = egcd_i128(a.rem_euclid(m), m);
    assert_eq!(g, 1);
    x.rem_euclid(m)
}

/// Number of cusps of Γ₀(N): Σ_{d|N} φ(gcd(d, N/d)). Used as a test oracle.
pub fn cusp_count_gamma0(n: u64) -> u64 {
    let mut total = 0;
    for d in 1..=n {
        if n % d != 0 {
            continue;
        }
        let g = gcd_u64(d, n / d);
        total += euler_phi(g);
    }
    total
}

fn euler_phi(n: u64) -> u64 {
    let mut out = n;
    for (p, _) in crate::arith::factor_u64(n) {
        out = out / p * (p - 1);
    }
    out
}

/// Genus of X₀(N). Used as a test oracle for the plus cuspidal dimension.
pub fn genus_x0(n: u64) -> u64 {
    let mu = crate::modsym::p1::psi(n);
    let nu2: u64 = if n % 4 == 0 {
        0
    } else {
        (0..n).filter(|&x| (x * x + 1) % n == 0).count() as u64
    };
    let nu3: u64 = if n % 9 == 0 {
        0
    } else {
        (0..n).filter(|&x| (x * x + x + 1) % n == 0).count() as u64
    };
    let nu_inf = cusp_count_gamma0(n);
    // g = 1 + mu/12 - nu2/4 - nu3/3 - nu_inf/2, exact in Z
    let twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * nu_inf;
    debug_assert_eq!(twelve_g % 12, 0);
    twelve_g / 12
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn involution_orders() {
        let t = P1Table::new(11);
        for &(c, d) in &t.reps {
            let (c, d) = (c as u64, d as u64);
            let s2 = {
                let (c1, d1) = sigma(c, d, 11);
                sigma(c1, d1, 11)
            };
            assert_eq!(t.lookup_u(s2.0 % 11, s2.1 % 11), t.lookup_u(c, d));
            let t3 = {
                let (c1, d1) = tau(c, d, 11);
                let (c2, d2) = tau(c1, d1, 11);
                tau(c2, d2, 11)
            };
            assert_eq!(t.lookup_u(t3.0 % 11, t3.1 % 11), t.lookup_u(c, d));
        }
    }

    #[test]
    fn dims_small_levels() {
        // plus quotient dim = genus + (#cusps - 1) for these levels;
        // cuspidal dim = genus
        let s = build_plus_space(11).unwrap();
        assert_eq!(s.cuspidal_dim(), 1);
        assert_eq!(s.dim, 2);
        let s = build_plus_space(37).unwrap();
        assert_eq!(s.cuspidal_dim(), 2);
        let s = build_plus_space(1).unwrap();
        assert_eq!(s.cuspidal_dim(), 0);
        let s = build_plus_space(14).unwrap();
        assert_eq!(s.cuspidal_dim(), 1); // genus of X₀(14)
    }

    #[test]
    fn cuspidal_dim_matches_genus_oracle() {
        for n in [11u64, 14, 15, 17, 19, 20, 24, 27, 32, 36, 37, 49] {
            let s = build_plus_space(n).unwrap();
            assert_eq!(s.cuspidal_dim() as u64, genus_x0(n), "N={n}");
        }
    }

    #[test]
    fn cusp_counts() {
        assert_eq!(cusp_count_gamma0(11), 2);
        assert_eq!(cusp_count_gamma0(4), 3);
        assert_eq!(cusp_count_gamma0(36), 12);
        // equivalence: 0 ~ 1 ~ any integer, but not ∞, at level 11
        assert!(cusps_equivalent(11, (0, 1), (5, 1)));
        assert!(!cusps_equivalent(11, (0, 1), (1, 0)));
        assert!(cusps_equivalent(11, (1, 11), (1, 0)));
    }

    #[test]
    fn sl2_lifts() {
        for n in [11u64, 12, 37, 90] {
            let t = P1Table::new(n);
            for &(c, d) in &t.reps {
                let (a, b, cc, dd) = lift_to_sl2(c as u64, d as u64, n);
                assert_eq!(a * dd - b * cc, 1);
                assert_eq!(
                    t.lookup(cc, dd),
                    t.lookup_u(c as u64 % n, d as u64 % n),
                    "lift changed the class of ({c}:{d}) mod {n}"
                );
            }
        }
    }
}
