//! Total diagonalization of a binary graded matrix.
//!
//! Columns are introduced one at a time. For every current block `B` the
//! routine tries to clear `A|_T` with `T = (Row(B), Col(A) - Col(B))` up to
//! the new column, using the admissible operations whose effect stays
//! inside `T`. Blocks that cannot be cleared are merged with the new column.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::f2::{col_reduce, BitVec, F2Matrix};
use crate::graded_matrix::{AdmissibleOps, GradedMatrix};
use crate::grades::{is_linear_extension, tied_pairs};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IndexBlock {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl IndexBlock {
    pub fn new(mut rows: Vec<usize>, mut cols: Vec<usize>) -> Self {
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        IndexBlock { rows, cols }
    }

    fn sort_key(&self) -> (usize, usize) {
        (
            self.rows.first().copied().unwrap_or(usize::MAX),
            self.cols.first().copied().unwrap_or(usize::MAX),
        )
    }

    fn absorb(&mut self, other: IndexBlock) {
        self.rows.extend(other.rows);
        self.cols.extend(other.cols);
        self.rows.sort_unstable();
        self.cols.sort_unstable();
    }

    /// A block without rows holds a single zero column.
    pub fn is_zero_column(&self) -> bool {
        self.rows.is_empty()
    }
}

/// A partition of row and column indices into index blocks, ordered by
/// smallest row index; row-less blocks come last, by column.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BlockSet {
    pub blocks: Vec<IndexBlock>,
}

impl BlockSet {
    pub fn new(blocks: Vec<IndexBlock>) -> Self {
        let mut b = BlockSet { blocks };
        b.normalize();
        b
    }

    fn normalize(&mut self) {
        self.blocks.sort_by_key(IndexBlock::sort_key);
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Blocks with at least one row, i.e. the summands of the cokernel.
    pub fn summands(&self) -> impl Iterator<Item = &IndexBlock> {
        self.blocks.iter().filter(|b| !b.rows.is_empty())
    }

    pub fn zero_columns(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .filter(|b| b.is_zero_column())
            .flat_map(|b| b.cols.iter().copied())
            .collect()
    }

    /// Checks that the blocks partition `0..n_rows` and `0..n_cols` and that
    /// every nonzero entry of `m` lies inside a block.
    pub fn validate(&self, m: &F2Matrix) -> Result<()> {
        let mut row_owner = vec![usize::MAX; m.n_rows()];
        let mut col_owner = vec![usize::MAX; m.n_cols()];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in &block.rows {
                if i >= row_owner.len() || row_owner[i] != usize::MAX {
                    return Err(Error::Internal(format!("row {i} is not partitioned")));
                }
                row_owner[i] = b;
            }
            for &j in &block.cols {
                if j >= col_owner.len() || col_owner[j] != usize::MAX {
                    return Err(Error::Internal(format!("column {j} is not partitioned")));
                }
                col_owner[j] = b;
            }
        }
        if let Some(i) = row_owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::Internal(format!("row {i} is in no block")));
        }
        if let Some(j) = col_owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::Internal(format!("column {j} is in no block")));
        }
        for (i, j) in m.entries() {
            if row_owner[i] != col_owner[j] {
                return Err(Error::Internal(format!("entry ({i}, {j}) lies outside every block")));
            }
        }
        Ok(())
    }

    /// The partition as two sorted lists of (non-empty) index sets, one per
    /// axis. Two block sets inducing the same partitions compare equal here.
    pub fn partitions(&self) -> (BTreeSet<Vec<usize>>, BTreeSet<Vec<usize>>) {
        let rows = self
            .blocks
            .iter()
            .filter(|b| !b.rows.is_empty())
            .map(|b| b.rows.clone())
            .collect();
        let cols = self
            .blocks
            .iter()
            .filter(|b| !b.cols.is_empty())
            .map(|b| b.cols.clone())
            .collect();
        (rows, cols)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Row,
    Col,
}

/// One admissible addition: `target += source`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Op {
    pub kind: OpKind,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OpCertificate {
    pub ops: Vec<Op>,
}

impl OpCertificate {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Applies every operation to a copy of `a`, rejecting inadmissible ones.
    pub fn replay(&self, a: &GradedMatrix) -> Result<GradedMatrix> {
        let mut m = a.clone();
        for op in &self.ops {
            match op.kind {
                OpKind::Row => m.add_row(op.source, op.target)?,
                OpKind::Col => m.add_col(op.source, op.target)?,
            }
        }
        Ok(m)
    }
}

/// Flattens `m|_T` with columns in descending order and rows ascending
/// within a column.
pub fn lin(m: &F2Matrix, rows: &[usize], cols: &[usize]) -> BitVec {
    let a = rows.len();
    let mut v = BitVec::zeros(a * cols.len());
    for (pos_c, &j) in cols.iter().rev().enumerate() {
        let col = m.col(j);
        for (ii, &i) in rows.iter().enumerate() {
            if col.get(i) {
                v.set(pos_c * a + ii, true);
            }
        }
    }
    v
}

/// Inverse of [`lin`]: the `|rows| x |cols|` block encoded by `v`.
pub fn lin_inv(v: &BitVec, n_rows: usize, n_cols: usize) -> F2Matrix {
    assert_eq!(v.len(), n_rows * n_cols);
    let mut out = F2Matrix::zeros(n_rows, n_cols);
    for p in v.ones() {
        let jj = n_cols - 1 - p / n_rows;
        out.set(p % n_rows, jj, true);
    }
    out
}

/// Tries to clear `A|_T` on the columns `<= t` by admissible operations
/// acting only on `T`. On success the operations are applied to `a`,
/// appended to `cert`, and `true` is returned; otherwise `a` is untouched.
///
/// `block_cols` is `Col(B)`; `t_rows` and `t_cols` describe `T` and must be
/// sorted.
pub fn block_reduce(
    a: &mut GradedMatrix,
    ops: &AdmissibleOps,
    block_cols: &[usize],
    t_rows: &[usize],
    t_cols: &[usize],
    t: usize,
    cert: &mut OpCertificate,
) -> bool {
    if t_rows.is_empty() {
        return true;
    }
    let n_r = t_rows.len();
    let n_c = t_cols.len();
    let mut row_pos = vec![usize::MAX; a.n_rows()];
    for (ii, &i) in t_rows.iter().enumerate() {
        row_pos[i] = ii;
    }
    let lin_index = |ii: usize, jj: usize| (n_c - 1 - jj) * n_r + ii;

    let mut sources: Vec<BitVec> = Vec::new();
    let mut realized: Vec<Op> = Vec::new();

    // column i of B added into column j of T
    for (jj, &j) in t_cols.iter().enumerate() {
        if j > t {
            break;
        }
        for &i in &ops.col_into[j] {
            if block_cols.binary_search(&i).is_err() {
                continue;
            }
            let mut v = BitVec::zeros(n_r * n_c);
            for (ii, &r) in t_rows.iter().enumerate() {
                if a.get(r, i) {
                    v.set(lin_index(ii, jj), true);
                }
            }
            sources.push(v);
            realized.push(Op {
                kind: OpKind::Col,
                source: i,
                target: j,
            });
        }
    }
    // row l outside T added into row k of T
    for (ii, &k) in t_rows.iter().enumerate() {
        for &l in &ops.row_into[k] {
            if row_pos[l] != usize::MAX {
                continue;
            }
            let mut v = BitVec::zeros(n_r * n_c);
            for (jj, &c) in t_cols.iter().enumerate() {
                if a.get(l, c) {
                    v.set(lin_index(ii, jj), true);
                }
            }
            sources.push(v);
            realized.push(Op {
                kind: OpKind::Row,
                source: l,
                target: k,
            });
        }
    }

    let target = lin(a.matrix(), t_rows, t_cols);
    let s = F2Matrix::from_columns(n_r * n_c, sources).expect("source columns have block length");
    let red = col_reduce(&s, &target).expect("target has block length");

    // the columns <= t of T occupy the highest linear positions
    let first_tail = t_cols.iter().filter(|&&j| j > t).count() * n_r;
    if red.reduced.ones().any(|p| p >= first_tail) {
        return false;
    }

    let chosen: Vec<Op> = red.combination.ones().map(|k| realized[k]).collect();
    for op in chosen.iter().filter(|op| op.kind == OpKind::Col) {
        a.matrix_mut().add_col(op.source, op.target);
    }
    for op in chosen.iter().filter(|op| op.kind == OpKind::Row) {
        a.matrix_mut().add_row(op.source, op.target);
    }
    debug_assert_eq!(a.restrict(t_rows, t_cols), lin_inv(&red.reduced, n_r, n_c));
    debug_assert!(a.check_homogeneity().is_ok());
    cert.ops.extend(chosen);
    true
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DiagonalizeOptions {
    /// Proceed on tied row or column grades under the index tie-break.
    pub perturb_ties: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagonalization {
    pub matrix: GradedMatrix,
    pub blocks: BlockSet,
    pub certificate: OpCertificate,
    /// True when tied grades were present and resolved by index order.
    pub perturbed: bool,
}

/// Runs the incremental total diagonalization on `a`, whose columns must be
/// in a linear extension of the grade order.
pub fn tot_diagonalize(a: &GradedMatrix, opts: DiagonalizeOptions) -> Result<Diagonalization> {
    tot_diagonalize_with(a, opts, |_, _| {})
}

/// [`tot_diagonalize`] with a hook called after every column iteration with
/// the column index and the current matrix.
pub fn tot_diagonalize_with<F>(
    a: &GradedMatrix,
    opts: DiagonalizeOptions,
    mut after_column: F,
) -> Result<Diagonalization>
where
    F: FnMut(usize, &GradedMatrix),
{
    if !is_linear_extension(a.col_grades()) {
        return Err(Error::Input(
            "columns are not sorted along the grade order".into(),
        ));
    }
    let row_ties = tied_pairs(a.row_grades());
    let col_ties = tied_pairs(a.col_grades());
    let perturbed = !(row_ties.is_empty() && col_ties.is_empty());
    if perturbed && !opts.perturb_ties {
        return Err(Error::TiedGrades {
            rows: row_ties,
            cols: col_ties,
        });
    }

    let mut m = a.clone();
    let ops = m.admissible_ops();
    let mut cert = OpCertificate::default();
    let mut blocks: Vec<IndexBlock> = (0..m.n_rows())
        .map(|i| IndexBlock::new(vec![i], vec![]))
        .collect();
    let all_cols: Vec<usize> = (0..m.n_cols()).collect();

    for t in 0..m.n_cols() {
        let mut merged = IndexBlock::new(vec![], vec![t]);
        let mut kept = Vec::with_capacity(blocks.len());
        blocks.sort_by_key(IndexBlock::sort_key);
        for block in blocks.drain(..) {
            if block.rows.is_empty() {
                kept.push(block);
                continue;
            }
            let t_cols: Vec<usize> = all_cols
                .iter()
                .copied()
                .filter(|j| block.cols.binary_search(j).is_err())
                .collect();
            if block_reduce(&mut m, &ops, &block.cols, &block.rows, &t_cols, t, &mut cert) {
                kept.push(block);
            } else {
                merged.absorb(block);
            }
        }
        kept.push(merged);
        blocks = kept;
        after_column(t, &m);
    }

    let blocks = BlockSet::new(blocks);
    debug_assert!(blocks.validate(m.matrix()).is_ok());
    Ok(Diagonalization {
        matrix: m,
        blocks,
        certificate: cert,
        perturbed,
    })
}

/// Basis expressions of the rows and columns of the diagonalized matrix in
/// terms of the original generators and relations, e.g. `v_g+t^(0,1)v_r`.
pub fn basis_labels(original: &GradedMatrix, cert: &OpCertificate) -> (Vec<String>, Vec<String>) {
    let n = original.n_rows();
    let m = original.n_cols();
    let mut rows: Vec<BitVec> = (0..n).map(|i| BitVec::from_ones(n, &[i])).collect();
    let mut cols: Vec<BitVec> = (0..m).map(|j| BitVec::from_ones(m, &[j])).collect();
    for op in &cert.ops {
        match op.kind {
            // r_k += r_l: the generator dual to row l becomes l + t^(.) k
            OpKind::Row => {
                let add = rows[op.target].clone();
                rows[op.source].xor_assign(&add);
            }
            OpKind::Col => {
                let add = cols[op.source].clone();
                cols[op.target].xor_assign(&add);
            }
        }
    }
    let render = |expr: &BitVec, own: usize, grades: &[crate::grades::Grade], label: &dyn Fn(usize) -> String| {
        let mut terms: Vec<usize> = expr.ones().collect();
        terms.sort_by_key(|&o| (o != own, o));
        terms
            .iter()
            .map(|&o| {
                let shift = grades[own].sub(&grades[o]);
                if shift.is_zero() {
                    label(o)
                } else {
                    format!("t^{}{}", shift, label(o))
                }
            })
            .collect::<Vec<_>>()
            .join("+")
    };
    let row_label = |i: usize| original.row_label(i);
    let col_label = |j: usize| original.col_label(j);
    (
        (0..n)
            .map(|i| render(&rows[i], i, original.row_grades(), &row_label))
            .collect(),
        (0..m)
            .map(|j| render(&cols[j], j, original.col_grades(), &col_label))
            .collect(),
    )
}
