//! Integer utilities shared across the crate: modular arithmetic, primality,
//! factorization, valuations, Kronecker symbols, primitive roots.
//!
//! Everything here is exact; the only floating point in the crate lives in
//! the `numeric` module.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Greatest common divisor on u64.
pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Greatest common divisor on i128 (result nonnegative).
pub fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `a * b mod m` without overflow.
#[inline]
pub fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `b^e mod m` by square and multiply.
pub fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mod_mul(acc, b, m);
        }
        b = mod_mul(b, b, m);
        e >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inv(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// p-adic valuation of a nonzero u64.
pub fn valuation_u64(mut n: u64, p: u64) -> u32 {
    assert!(n != 0, "valuation of zero");
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// p-adic valuation of n, with v(0) reported as 0 (for unit-or-trivial data
/// like Tamagawa products where n ≥ 1 always).
pub fn valuation_u64_or_zero(n: u64, p: u64) -> u32 {
    if n == 0 {
        0
    } else {
        valuation_u64(n, p)
    }
}

/// p-adic valuation of a nonzero i128.
pub fn valuation_i128(n: i128, p: u64) -> u32 {
    assert!(n != 0, "valuation of zero");
    let mut n = n.abs();
    let p = p as i128;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// p-adic valuation of a nonzero BigInt.
pub fn valuation_bigint(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&n, &p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    // This witness set is deterministic for all n < 3.3 * 10^24.
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes up to and including `n` (simple sieve).
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return vec![];
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| if b { Some(i as u64) } else { None })
        .collect()
}

/// Pollard-Brent rho; returns a nontrivial factor of composite odd n.
fn pollard_brent(n: u64, seed: u64) -> u64 {
    let c = seed % (n - 1) + 1;
    let f = |x: u64| (mod_mul(x, x, n) + c) % n;
    let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
    let mut count = 0u64;
    while d == 1 {
        x = f(x);
        y = f(f(y));
        d = gcd_u64(x.abs_diff(y), n);
        count += 1;
        if count > 1 << 22 {
            return 1; // give up on this seed
        }
    }
    d
}

/// Factor a u64 into (prime, exponent) pairs, ascending.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    if n <= 1 {
        return out;
    }
    for p in [2u64, 3, 5] {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    // wheel over 6k±1 up to 2^16, then rho for what remains
    let mut d = 7u64;
    let mut step = 4u64;
    while d <= 1 << 16 && d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += step;
        step = 6 - step;
    }
    let mut stack = vec![n];
    let mut rest: Vec<u64> = Vec::new();
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            rest.push(m);
            continue;
        }
        let mut fac = 1;
        for seed in 1.. {
            fac = pollard_brent(m, seed);
            if fac != 1 && fac != m {
                break;
            }
            assert!(seed < 64, "factorization failed for {m}");
        }
        stack.push(fac);
        stack.push(m / fac);
    }
    rest.sort_unstable();
    let mut i = 0;
    while i < rest.len() {
        let p = rest[i];
        let mut e = 0;
        while i < rest.len() && rest[i] == p {
            e += 1;
            i += 1;
        }
        out.push((p, e));
    }
    out.sort_unstable();
    out
}

/// Kronecker symbol (a|n), fully general.
pub fn kronecker(mut a: i128, mut n: i128) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut v = 0;
    while n % 2 == 0 {
        n /= 2;
        v += 1;
    }
    let mut k = if v % 2 == 0 {
        1
    } else {
        // (a|2)^v with (a|2) = 0, 1, -1 for a even, a ≡ ±1 (8), a ≡ ±3 (8)
        match a.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => return 0,
        }
    };
    if n < 0 {
        n = -n;
        if a < 0 {
            k = -k;
        }
    }
    // now n positive odd; quadratic reciprocity loop
    loop {
        a = a.rem_euclid(n);
        if a == 0 {
            return if n == 1 { k } else { 0 };
        }
        let mut v = 0;
        while a % 2 == 0 {
            a /= 2;
            v += 1;
        }
        if v % 2 == 1 {
            match n.rem_euclid(8) {
                3 | 5 => k = -k,
                _ => {}
            }
        }
        if a.rem_euclid(4) == 3 && n.rem_euclid(4) == 3 {
            k = -k;
        }
        let t = a;
        a = n;
        n = t;
        if n == 1 {
            return k;
        }
    }
}

/// Integer square root (floor) of u128.
pub fn isqrt_u128(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u128;
    // fix up float error
    while x > 0 && x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Is n a perfect square?
pub fn is_square_u128(n: u128) -> bool {
    let r = isqrt_u128(n);
    r * r == n
}

/// Smallest primitive root modulo an odd prime ℓ.
pub fn primitive_root(ell: u64) -> u64 {
    assert!(ell >= 3 && is_prime_u64(ell));
    let fac = factor_u64(ell - 1);
    'cand: for g in 2..ell {
        for &(q, _) in &fac {
            if mod_pow(g, (ell - 1) / q, ell) == 1 {
                continue 'cand;
            }
        }
        return g;
    }
    unreachable!("no primitive root found for {ell}")
}

/// Check that `g` generates the multiplicative group mod ℓ.
pub fn is_primitive_root(g: u64, ell: u64) -> bool {
    if g % ell == 0 {
        return false;
    }
    factor_u64(ell - 1)
        .iter()
        .all(|&(q, _)| mod_pow(g, (ell - 1) / q, ell) != 1)
}

/// Tonelli-Shanks square root mod odd prime p. Returns r with r² ≡ a.
pub fn sqrt_mod_p(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if mod_pow(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(mod_pow(a, (p + 1) / 4, p));
    }
    // write p-1 = q * 2^s
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while mod_pow(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = mod_pow(z, q, p);
    let mut t = mod_pow(a, q, p);
    let mut r = mod_pow(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mod_mul(tt, tt, p);
            i += 1;
        }
        let b = mod_pow(c, 1 << (m - i - 1), p);
        m = i;
        c = mod_mul(b, b, p);
        t = mod_mul(t, c, p);
        r = mod_mul(r, b, p);
    }
    Some(r)
}

/// `p^e` as u64, checked.
pub fn pow_u64(p: u64, e: u32) -> u64 {
    p.checked_pow(e).expect("prime power overflows u64")
}

/// `p^e` as BigInt.
pub fn pow_bigint(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_tests() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(1_000_003));
        assert!(!is_prime_u64(1_000_001)); // 101 * 9901
        assert!(is_prime_u64(18_446_744_073_709_551_557)); // largest u64 prime
       assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn factoring() {
        assert_eq!(factor_u64(600), vec![(2, 3), (3, 1), (5, 2)]);
        assert_eq!(factor_u64(1), vec![]);
        assert_eq!(factor_u64(2u64.pow(32) + 1), vec![(641, 1), (6_700_417, 1)]);
    }

    #[test]
    fn kronecker_small_table() {
        // (a|7) for a = 1..6: squares mod 7 are {1,2,4}
        for (a, want) in [(1, 1), (2, 1), (3, -1), (4, 1), (5, -1), (6, -1)] {
            assert_eq!(kronecker(a, 7), want, "a={a}");
        }
        // (-7|11): -7 ≡ 4 mod 11 is a square
        assert_eq!(kronecker(-7, 11), 1);
        // (2|n) cases
        assert_eq!(kronecker(2, 7), 1);
        assert_eq!(kronecker(2, 3), -1);
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for &p in &[3u64, 5, 7, 11, 13, 101, 997] {
            for a in 0..p {
                let e = mod_pow(a, (p - 1) / 2, p);
                let want = if a == 0 {
                    0
                } else if e == 1 {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker(a as i128, p as i128), want);
            }
        }
    }

    #[test]
    fn sqrt_mod() {
        for &p in &[3u64, 5, 13, 17, 97, 1_000_003] {
            for a in 1..50u64 {
                let sq = mod_mul(a, a, p);
                let r = sqrt_mod_p(sq, p).unwrap();
                assert_eq!(mod_mul(r, r, p), sq);
            }
        }
        assert!(sqrt_mod_p(2, 3).is_none());
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(11), 2);
        assert_eq!(primitive_root(7), 3);
        assert_eq!(primitive_root(31), 3);
        assert!(is_primitive_root(2, 11));
        assert!(!is_primitive_root(3, 11)); // 3^5 = 243 ≡ 1 mod 11
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation_u64(250, 5), 3);
        assert_eq!(valuation_i128(-2048, 2), 11);
        assert_eq!(valuation_bigint(&BigInt::from(3u64.pow(20)), 3), 20);
    }
}
