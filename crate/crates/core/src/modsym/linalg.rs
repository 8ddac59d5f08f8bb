//! Small dense exact linear algebra over Q used by the modular symbol layer.
//! Dimensions at desk scale are tiny (tens), so simplicity wins.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type QQ = BigRational;

pub fn qq(n: i64) -> QQ {
    BigRational::from(BigInt::from(n))
}

/// Row-major dense rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<QQ>,
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMat {
            rows,
            cols,
            data: vec![QQ::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = QQ::one();
        }
        m
    }

    pub fn from_columns(cols: &[Vec<QQ>]) -> Self {
        let rows = cols.first().map_or(0, |c| c.len());
        let mut m = Self::zero(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> Vec<QQ> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let prod = a * b;
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[QQ]) -> Vec<QQ> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = QQ::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !v[j].is_zero() {
                        acc += &self[(i, j)] * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j { QQ::one() } else { QQ::zero() };
                if self[(i, j)] != want {
                    return false;
                }
            }
        }
        true
    }

    /// Basis of the right kernel {x : M·x = 0}, via fraction-exact Gaussian
    /// elimination. Deterministic: pivots chosen left to right.
    pub fn kernel_basis(&self) -> Vec<Vec<QQ>> {
        let mut m = self.clone();
        let (rows, cols) = (m.rows, m.cols);
        let mut pivot_col_of_row: Vec<Option<usize>> = vec![None; rows];
        let mut pivot_row_of_col: Vec<Option<usize>> = vec![None; cols];
        let mut rank = 0;
        for col in 0..cols {
            // find pivot row
            let mut prow = None;
            for r in rank..rows {
                if !m[(r, col)].is_zero() {
                    prow = Some(r);
                    break;
                }
            }
            let Some(prow) = prow else { continue };
            m.swap_rows(rank, prow);
            let inv = m[(rank, col)].clone();
            for j in col..cols {
                let v = m[(rank, j)].clone() / &inv;
                m[(rank, j)] = v;
            }
            for r in 0..rows {
                if r != rank && !m[(r, col)].is_zero() {
                    let f = m[(r, col)].clone();
                    for j in col..cols {
                        let v = m[(r, j)].clone() - &f * &m[(rank, j)];
                        m[(r, j)] = v;
                    }
                }
            }
            pivot_col_of_row[rank] = Some(col);
            pivot_row_of_col[col] = Some(rank);
            rank += 1;
            if rank == rows {
                break;
            }
        }
        let mut basis = Vec::new();
        for free in 0..cols {
            if pivot_row_of_col[free].is_some() {
                continue;
            }
            let mut v = vec![QQ::zero(); cols];
            v[free] = QQ::one();
            for (r, pc) in pivot_col_of_row.iter().enumerate() {
                if let Some(pc) = pc {
                    v[*pc] = -m[(r, free)].clone();
                }
            }
            basis.push(v);
        }
        basis
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = QQ;
    fn index(&self, (i, j): (usize, usize)) -> &QQ {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut QQ {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_rank_one() {
        // [1 2 3] has kernel of dimension 2
        let mut m = QMat::zero(1, 3);
        m[(0, 0)] = qq(1);
        m[(0, 1)] = qq(2);
        m[(0, 2)] = qq(3);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in &k {
            let w = m.mul_vec(v);
            assert!(w.iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn matrix_product() {
        let mut a = QMat::zero(2, 2);
        a[(0, 0)] = qq(1);
        a[(0, 1)] = qq(2);
        a[(1, 0)] = qq(3);
        a[(1, 1)] = qq(4);
        let i = QMat::identity(2);
        assert_eq!(a.mul(&i), a);
        assert!(i.is_identity());
    }
}
