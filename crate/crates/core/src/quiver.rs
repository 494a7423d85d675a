//! Framed quivers as arrow-count matrices, and vertex mutation.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, IntMatrix};

/// What happens to oriented 2-cycles created by a mutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TwoCyclePolicy {
    /// Cancel every opposite pair of arrows.
    Cancel,
    /// Keep 2-cycles between mutable vertices. Self-loops are still deleted,
    /// and 2-cycles touching a frozen vertex are cancelled: frame arrows
    /// encode a signed c-vector, which an opposite pair would corrupt.
    Keep,
}

/// A framed quiver on `2n` vertices. Vertices `0..n` are mutable, and vertex
/// `n + i` is the frozen copy of vertex `i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Quiver {
    n: usize,
    arrows: Vec<u64>,
}

impl Quiver {
    /// Frames an `n x n` arrow-count matrix by adding one arrow `i -> n+i`
    /// per mutable vertex.
    pub fn frame(base: &[Vec<u64>]) -> Result<Quiver> {
        let n = base.len();
        let mut q = Quiver { n, arrows: alloc::vec![0; 4 * n * n] };
        for (i, row) in base.iter().enumerate() {
            if row.len() != n {
                return Err(Error::ShapeMismatch(alloc::format!(
                    "base row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if row[i] != 0 {
                return Err(Error::SelfLoopInInput { vertex: i });
            }
            for (j, &a) in row.iter().enumerate() {
                q.set(i, j, a);
            }
            q.set(i, n + i, 1);
        }
        Ok(q)
    }

    /// Wraps a full `2n x 2n` arrow matrix, checking the structural invariants.
    pub fn from_arrows(arrows: &[Vec<u64>]) -> Result<Quiver> {
        let size = arrows.len();
        if !size.is_multiple_of(2) {
            return Err(Error::ShapeMismatch(alloc::format!("odd vertex count {size}")));
        }
        let n = size / 2;
        let mut q = Quiver { n, arrows: alloc::vec![0; size * size] };
        for (i, row) in arrows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::ShapeMismatch(alloc::format!("row {i} has {} entries, expected {size}", row.len())));
            }
            for (j, &a) in row.iter().enumerate() {
                q.set(i, j, a);
            }
        }
        for i in 0..size {
            if q.get(i, i) != 0 {
                return Err(Error::SelfLoopInInput { vertex: i });
            }
        }
        q.check_frozen_block()?;
        Ok(q)
    }

    /// Number of mutable vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total vertex count, `2n`.
    pub fn size(&self) -> usize {
        2 * self.n
    }

    /// Number of arrows `i -> j`.
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.arrows[i * 2 * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: u64) {
        let s = 2 * self.n;
        self.arrows[i * s + j] = v;
    }

    pub fn arrow_rows(&self) -> Vec<Vec<u64>> {
        let s = self.size();
        (0..s).map(|i| self.arrows[i * s..(i + 1) * s].to_vec()).collect()
    }

    pub fn is_frozen(&self, v: usize) -> bool {
        v >= self.n
    }

    /// True when no pair of vertices carries arrows in both directions.
    pub fn is_two_cycle_free(&self) -> bool {
        let s = self.size();
        (0..s).all(|i| (i + 1..s).all(|j| self.get(i, j) == 0 || self.get(j, i) == 0))
    }

    /// Mutates at mutable vertex `k`, returning a new quiver.
    pub fn mutate(&self, k: usize, policy: TwoCyclePolicy) -> Result<Quiver> {
        let s = self.size();
        if k >= s {
            return Err(Error::IndexOutOfRange { index: k, len: s });
        }
        if self.is_frozen(k) {
            return Err(Error::FrozenVertexMutation { vertex: k });
        }
        let mut out = self.clone();
        // Compose 2-paths i -> k -> j using the pre-mutation counts.
        for i in (0..s).filter(|&i| i != k) {
            let a = self.get(i, k);
            if a == 0 {
                continue;
            }
            for j in (0..s).filter(|&j| j != k) {
                let b = self.get(k, j);
                if b != 0 {
                    let v = a
                        .checked_mul(b)
                        .and_then(|ab| out.get(i, j).checked_add(ab))
                        .ok_or(Error::ArrowOverflow { from: i, to: j })?;
                    out.set(i, j, v);
                }
            }
        }
        for i in 0..s {
            out.set(i, i, 0);
        }
        for i in 0..s {
            for j in i + 1..s {
                let cancel = match policy {
                    TwoCyclePolicy::Cancel => true,
                    TwoCyclePolicy::Keep => self.is_frozen(i) || self.is_frozen(j),
                };
                if cancel {
                    let m = out.get(i, j).min(out.get(j, i));
                    if m > 0 {
                        out.set(i, j, out.get(i, j) - m);
                        out.set(j, i, out.get(j, i) - m);
                    }
                }
            }
        }
        for i in 0..s {
            let (a, b) = (out.get(i, k), out.get(k, i));
            out.set(i, k, b);
            out.set(k, i, a);
        }
        out.check_frozen_block()?;
        Ok(out)
    }

    fn check_frozen_block(&self) -> Result<()> {
        let s = self.size();
        for i in self.n..s {
            for j in self.n..s {
                let count = self.get(i, j);
                if count != 0 {
                    return Err(Error::FrozenToFrozenArrow { from: i, to: j, count });
                }
            }
        }
        Ok(())
    }

    /// `C[i][j] = #(n+i -> j) - #(j -> n+i)`.
    pub fn c_matrix(&self) -> CMatrix {
        let n = self.n;
        let mut c = IntMatrix::zero(n);
        for i in 0..n {
            for j in 0..n {
                c.set(i, j, self.get(n + i, j) as i64 - self.get(j, n + i) as i64);
            }
        }
        c
    }

    /// Signed adjacency `#(i -> j) - #(j -> i)` over all vertices.
    pub fn signed_matrix(&self) -> Vec<Vec<i64>> {
        let s = self.size();
        (0..s).map(|i| (0..s).map(|j| self.get(i, j) as i64 - self.get(j, i) as i64).collect()).collect()
    }
}

impl fmt::Debug for Quiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Quiver").field("n", &self.n).field("arrows", &self.arrow_rows()).finish()
    }
}

/// Two arrows `1 -> 0`.
pub fn kronecker_base() -> Vec<Vec<u64>> {
    alloc::vec![alloc::vec![0, 0], alloc::vec![2, 0]]
}

/// Two arrows each way between `0` and `1`.
pub fn conifold_base() -> Vec<Vec<u64>> {
    alloc::vec![alloc::vec![0, 2], alloc::vec![2, 0]]
}

/// Double arrows `2 -> 0`, `1 -> 2`, `3 -> 1`, `0 -> 3`.
pub fn f0_base() -> Vec<Vec<u64>> {
    let mut b = alloc::vec![alloc::vec![0u64; 4]; 4];
    b[2][0] = 2;
    b[1][2] = 2;
    b[3][1] = 2;
    b[0][3] = 2;
    b
}
