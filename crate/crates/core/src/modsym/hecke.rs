//! Hecke operators and the Fricke involution on the plus quotient, computed
//! by acting on the defining paths of the free generators and re-expanding
//! through unimodular (continued-fraction) paths.

use num_traits::Zero;

use crate::modsym::linalg::{QMat, QQ};
use crate::modsym::p1::P1Table;
use crate::modsym::space::{lift_to_sl2, ManinSymbolSpace};

/// Emit the P¹ classes of the unimodular path {∞ → a/b} (b ≠ 0).
///
/// With convergents p_j/q_j of a/b, the j-th step is the Manin symbol of the
/// class ((-1)^{j-1}·q_j : q_{j-1}).
pub fn for_each_path_class(p1: &P1Table, a: i128, b: i128, mut f: impl FnMut(usize)) {
    debug_assert!(b != 0);
    let n = p1.level;
    let (mut x, mut y) = if b < 0 { (-a, -b) } else { (a, b) };
    let mut q_prev2: u64 = 1 % n; // q_{-2} mod N
    let mut q_prev1: u64 = 0; // q_{-1} mod N
    let mut neg = true; // sign (-1)^{j-1}, starting at j = 0
    loop {
        let c = x.div_euclid(y);
        let r = x - c * y;
        let c_mod = c.rem_euclid(n as i128) as u64;
        let q_cur = (c_mod * q_prev1 + q_prev2) % n;
        let top = if neg { (n - q_cur) % n } else { q_cur };
        let idx = p1
            .lookup_u(top, q_prev1)
            .expect("unimodular rows are coprime");
        f(idx);
        q_prev2 = q_prev1;
        q_prev1 = q_cur;
        neg = !neg;
        x = y;
        y = r;
        if y == 0 {
            break;
        }
    }
}

/// The vector of {∞ → num/den} in quotient coordinates; den = 0 gives zero.
pub fn expand_inf_to(space: &ManinSymbolSpace, num: i128, den: i128) -> Vec<QQ> {
    let mut v = vec![QQ::zero(); space.dim];
    if den == 0 {
        return v;
    }
    for_each_path_class(&space.p1, num, den, |idx| {
        for (j, coef) in &space.expansions[idx] {
            v[*j as usize] += coef;
        }
    });
    v
}

/// {from -> to} in quotient coordinates, endpoints as (num, den) with den = 0
/// meaning ∞.
pub fn expand_path(
    space: &ManinSymbolSpace,
    from: (i128, i128),
    to: (i128, i128),
) -> Vec<QQ> {
    let mut v = expand_inf_to(space, to.0, to.1);
    let w = expand_inf_to(space, from.0, from.1);
    for (a, b) in v.iter_mut().zip(w) {
        *a -= b;
    }
    v
}

/// The defining path of a free generator: {g·0 -> g·∞} for any SL₂ lift g.
fn generator_path(space: &ManinSymbolSpace, gen_class: usize) -> ((i128, i128), (i128, i128)) {
    let (c, d) = space.p1.reps[gen_class];
    let (a, b, cc, dd) = lift_to_sl2(c as u64, d as u64, space.level);
    ((b, dd), (a, cc))
}

/// Matrix of the Hecke operator T_q (or U_q when q | N) on the plus quotient.
/// Columns are images of the free generators.
pub fn hecke_matrix(space: &ManinSymbolSpace, q: u64) -> QMat {
    let mut m = QMat::zero(space.dim, space.dim);
    let qi = q as i128;
    for (j, &g) in space.free_gens.iter().enumerate() {
        let (from, to) = generator_path(space, g);
        let mut col = vec![QQ::zero(); space.dim];
        let mut add_image = |f: &dyn Fn((i128, i128)) -> (i128, i128)| {
            let v = expand_path(space, f(from), f(to));
            for (a, b) in col.iter_mut().zip(v) {
                *a += b;
            }
        };
        for k in 0..qi {
            add_image(&move |(x, y)| (x + k * y, qi * y));
        }
        if space.level % q != 0 {
            add_image(&|(x, y)| (qi * x, y));
        }
        for (i, v) in col.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    m
}

/// Matrix of the Fricke involution W_N: z -> -1/(Nz).
pub fn fricke_matrix(space: &ManinSymbolSpace) -> QMat {
    let n = space.level as i128;
    let mut m = QMat::zero(space.dim, space.dim);
    for (j, &g) in space.free_gens.iter().enumerate() {
        let (from, to) = generator_path(space, g);
        let f = |(x, y): (i128, i128)| (-y, n * x);
        let col = expand_path(space, f(from), f(to));
        for (i, v) in col.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    m
}
