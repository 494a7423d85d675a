//! Small dense integer matrices: C-matrices and their exact inverses.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Square integer matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<i64>,
}

/// The C-matrix of a framed quiver. Row `i` is the c-vector read off frozen
/// vertex `n + i`.
pub type CMatrix = IntMatrix;

impl IntMatrix {
    pub fn zero(n: usize) -> Self {
        IntMatrix { n, entries: alloc::vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::ShapeMismatch(alloc::format!("row {i} has {} entries, expected {n}", row.len())));
            }
            entries.extend_from_slice(row);
        }
        Ok(IntMatrix { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.entries[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.n.max(1)).take(self.n).map(<[i64]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.n != other.n {
            return Err(Error::ShapeMismatch(alloc::format!("{} x {}", self.n, other.n)));
        }
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// `M v` for a column vector `v`.
    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }

    pub fn determinant(&self) -> BigInt {
        let rows: Vec<Vec<BigInt>> = self
            .entries
            .chunks(self.n.max(1))
            .take(self.n)
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        bareiss_det(rows)
    }

    /// Exact inverse of a matrix with determinant `±1`, via the adjugate.
    pub fn invert_unimodular(&self) -> Result<IntMatrix> {
        let n = self.n;
        let det = self.determinant();
        let sign: i64 = if det.is_one() {
            1
        } else if det == -BigInt::one() {
            -1
        } else {
            return Err(Error::NotUnimodular { det: det.to_string() });
        };
        let mut inv = Self::zero(n);
        if n == 1 {
            inv.entries[0] = sign;
            return Ok(inv);
        }
        for i in 0..n {
            for j in 0..n {
                // inverse[j][i] = (-1)^{i+j} minor(i, j) / det
                let minor: Vec<Vec<BigInt>> = (0..n)
                    .filter(|&r| r != i)
                    .map(|r| (0..n).filter(|&c| c != j).map(|c| BigInt::from(self.get(r, c))).collect())
                    .collect();
                let mut cof = bareiss_det(minor);
                if (i + j) % 2 == 1 {
                    cof = -cof;
                }
                let v = (cof * sign)
                    .to_i64()
                    .ok_or_else(|| Error::InvalidParameter("inverse entry exceeds 64 bits".to_string()))?;
                inv.set(j, i, v);
            }
        }
        Ok(inv)
    }
}

fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(IntMatrix::identity(3).invert_unimodular().unwrap(), IntMatrix::identity(3));
        let c3 = m(&[&[3, -4], &[2, -3]]);
        assert_eq!(c3.invert_unimodular().unwrap(), c3);
        assert_eq!(m(&[&[2, 0], &[0, 2]]).invert_unimodular(), Err(Error::NotUnimodular { det: "4".into() }));
        let c2 = m(&[&[-3, 2], &[-2, 1]]);
        let inv = c2.invert_unimodular().unwrap();
        assert_eq!(c2.mul(&inv).unwrap(), IntMatrix::identity(2));
    }

    #[test]
    fn determinant_with_pivoting() {
        let a = m(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]]);
        assert_eq!(a.determinant(), BigInt::from(-2));
        assert!(IntMatrix::from_rows(&[vec![1, 2], vec![3]]).is_err());
    }
}
