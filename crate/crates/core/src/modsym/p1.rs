//! The projective line P¹(Z/N): canonical representatives and a flat lookup
//! table from raw (c, d) pairs to class indices, sized for O(1) access in the
//! evaluation hot loop.

use crate::arith::gcd_u64;

#[derive(Debug, Clone)]
pub struct P1Table {
    pub level: u64,
    /// canonical representative of each class, in construction order
    pub reps: Vec<(u32, u32)>,
    /// (c*N + d) -> class index; u32::MAX marks pairs with gcd(c,d,N) > 1
    table: Vec<u32>,
}

impl P1Table {
    pub fn new(level: u64) -> Self {
        assert!(level >= 1 && level <= 100_000, "level out of desk range");
        let n = level as usize;
        if level == 1 {
            return P1Table {
                level,
                reps: vec![(0, 0)],
                table: vec![0],
            };
        }
        let units: Vec<u64> = (1..level).filter(|&l| gcd_u64(l, level) == 1).collect();
        let mut table = vec![u32::MAX; n * n];
        let mut reps = Vec::new();
        for c in 0..level {
            for d in 0..level {
                if table[(c * level + d) as usize] != u32::MAX {
                    continue;
                }
                if gcd_u64(gcd_u64(c, d), level) != 1 {
                    continue;
                }
                // first visit in lex order: (c, d) is the canonical rep
                let idx = reps.len() as u32;
                reps.push((c as u32, d as u32));
                for &lam in &units {
                    let cc = lam * c % level;
                    let dd = lam * d % level;
                    table[(cc * level + dd) as usize] = idx;
                }
            }
        }
        debug_assert_eq!(reps.len() as u64, psi(level));
        P1Table { level, reps, table }
    }

    pub fn count(&self) -> usize {
        self.reps.len()
    }

    /// Class of (c : d) with arbitrary integer entries.
    pub fn lookup(&self, c: i128, d: i128) -> Option<usize> {
        let n = self.level as i128;
        let c = c.rem_euclid(n) as u64;
        let d = d.rem_euclid(n) as u64;
        self.lookup_u(c, d)
    }

    /// Class of (c : d) with entries already reduced mod N.
    #[inline]
    pub fn lookup_u(&self, c: u64, d: u64) -> Option<usize> {
        let v = self.table[(c * self.level + d) as usize];
        if v == u32::MAX {
            None
        } else {
            Some(v as usize)
        }
    }

    /// Raw table access for the evaluation hot loop.
    #[inline]
    pub fn raw(&self) -> &[u32] {
        &self.table
    }
}

/// ψ(N) = N · ∏_{p|N} (1 + 1/p), the size of P¹(Z/N).
pub fn psi(n: u64) -> u64 {
    let mut out = n;
    for (p, _) in crate::arith::factor_u64(n) {
        out = out / p * (p + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(P1Table::new(11).count(), 12);
        assert_eq!(P1Table::new(1).count(), 1);
        for n in [6u64, 12, 37, 49, 90] {
            assert_eq!(P1Table::new(n).count() as u64, psi(n), "N={n}");
        }
    }

    #[test]
    fn scaling_invariance() {
        let t = P1Table::new(15);
        for c in 0..15i128 {
            for d in 0..15i128 {
                let Some(i) = t.lookup(c, d) else { continue };
                for lam in [2i128, 4, 7, 11, 13, -1] {
                    assert_eq!(t.lookup(lam * c, lam * d), Some(i));
                }
            }
        }
    }

    #[test]
    fn invalid_pairs() {
        let t = P1Table::new(12);
        assert!(t.lookup(2, 4).is_none()); // gcd(2,4,12) = 2
        assert!(t.lookup(0, 0).is_none());
        assert!(t.lookup(3, 4).is_some());
    }
}
