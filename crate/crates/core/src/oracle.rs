//! Brute-force reference computations for small inputs.
//!
//! These routines deliberately avoid the reduction code they are used to
//! check: matrices are handled as dense `bool` arrays and ranks come from a
//! separate row elimination.

use rayon::prelude::*;

use crate::diagonalize::{BlockSet, IndexBlock};
use crate::error::{Error, Result};
use crate::f2::F2Matrix;
use crate::graded_matrix::GradedMatrix;
use crate::grades::Grade;

pub const DEFAULT_BUDGET: usize = 20;

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn partition_dense(a: &[Vec<bool>], n_rows: usize, n_cols: usize) -> BlockSet {
    let mut uf = UnionFind::new(n_rows + n_cols);
    for (i, row) in a.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if x {
                uf.union(i, n_rows + j);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, IndexBlock> = Default::default();
    for i in 0..n_rows {
        groups.entry(uf.find(i)).or_default().rows.push(i);
    }
    for j in 0..n_cols {
        groups.entry(uf.find(n_rows + j)).or_default().cols.push(j);
    }
    BlockSet::new(groups.into_values().collect())
}

fn dense(m: &F2Matrix) -> Vec<Vec<bool>> {
    (0..m.n_rows())
        .map(|i| (0..m.n_cols()).map(|j| m.get(i, j)).collect())
        .collect()
}

/// Connected components of the bipartite graph of nonzero entries.
pub fn block_partition(m: &F2Matrix) -> BlockSet {
    partition_dense(&dense(m), m.n_rows(), m.n_cols())
}

/// Pairs `(target, source)` of rows such that adding row `source` into row
/// `target` keeps the matrix homogeneous, with equal grades ordered by index.
fn row_pairs(g: &[Grade]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for k in 0..g.len() {
        for l in 0..g.len() {
            let below = g[k].coords().iter().zip(g[l].coords()).all(|(a, b)| a <= b);
            if k != l && below && (g[k] != g[l] || k < l) {
                out.push((k, l));
            }
        }
    }
    out
}

/// Pairs `(source, target)` of columns, same convention.
fn col_pairs(g: &[Grade]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..g.len() {
        for j in 0..g.len() {
            let below = g[i].coords().iter().zip(g[j].coords()).all(|(a, b)| a <= b);
            if i != j && below && (g[i] != g[j] || i < j) {
                out.push((i, j));
            }
        }
    }
    out
}

fn matmul(a: &[Vec<bool>], b: &[Vec<bool>], inner: usize, n_cols: usize) -> Vec<Vec<bool>> {
    a.iter()
        .map(|row| {
            (0..n_cols)
                .map(|j| (0..inner).fold(false, |acc, k| acc ^ (row[k] & b[k][j])))
                .collect()
        })
        .collect()
}

fn unipotent(n: usize, pairs: &[(usize, usize)], mask: u64) -> Vec<Vec<bool>> {
    let mut p: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
    for (bit, &(r, c)) in pairs.iter().enumerate() {
        if mask >> bit & 1 == 1 {
            p[r][c] = true;
        }
    }
    p
}

/// The finest block partition over all `P * M * Q` with `P`, `Q` unipotent
/// and supported on the admissible row and column pairs.
///
/// Fails with [`Error::Budget`] when there are more than `budget` pairs, and
/// with [`Error::Internal`] if two partitions of maximal block count differ.
pub fn brute_force_finest(m: &GradedMatrix, budget: usize) -> Result<BlockSet> {
    let n = m.n_rows();
    let k = m.n_cols();
    let rp = row_pairs(m.row_grades());
    let cp = col_pairs(m.col_grades());
    let needed = rp.len() + cp.len();
    if needed > budget || needed >= 63 {
        return Err(Error::Budget { needed, budget });
    }
    let a = dense(m.matrix());
    let qs: Vec<Vec<Vec<bool>>> = (0..1u64 << cp.len()).map(|b| unipotent(k, &cp, b)).collect();

    let best = (0..1u64 << rp.len())
        .into_par_iter()
        .map(|alpha| {
            let pa = matmul(&unipotent(n, &rp, alpha), &a, n, k);
            let mut best: Option<(usize, BlockSet, bool)> = None;
            for q in &qs {
                let paq = matmul(&pa, q, k, k);
                let parts = partition_dense(&paq, n, k);
                best = merge_best(best, Some((parts.len(), parts, true)));
            }
            best
        })
        .reduce(|| None, merge_best);

    match best {
        Some((_, parts, true)) => Ok(parts),
        Some((count, _, false)) => Err(Error::Internal(format!(
            "distinct partitions reach the maximal block count {count}"
        ))),
        None => Ok(block_partition(m.matrix())),
    }
}

/// Keeps the larger block count; the flag records whether all maximizers
/// seen so far agree.
fn merge_best(
    a: Option<(usize, BlockSet, bool)>,
    b: Option<(usize, BlockSet, bool)>,
) -> Option<(usize, BlockSet, bool)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if x.0 > y.0 {
                Some(x)
            } else if y.0 > x.0 {
                Some(y)
            } else {
                let same = x.1 == y.1;
                Some((x.0, x.1, x.2 && y.2 && same))
            }
        }
    }
}

/// `#{rows <= u} - rank(columns <= u)` by row-major Gauss-Jordan elimination.
pub fn dim_oracle(m: &GradedMatrix, u: &Grade) -> usize {
    let le = |g: &Grade| g.coords().iter().zip(u.coords()).all(|(a, b)| a <= b);
    let cols: Vec<usize> = (0..m.n_cols()).filter(|&j| le(m.col_grade(j))).collect();
    let gens = (0..m.n_rows()).filter(|&i| le(m.row_grade(i))).count();
    let mut rows: Vec<Vec<u8>> = (0..m.n_rows())
        .map(|i| cols.iter().map(|&j| u8::from(m.get(i, j))).collect())
        .collect();
    let mut rank = 0;
    for c in 0..cols.len() {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] == 1) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[c] == 1 {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    gens - rank
}
