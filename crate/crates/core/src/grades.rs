//! Grades in `Z^d`, the product partial order, and the linear extensions used
//! to index rows and columns.
//!
//! The derived `Ord` on [`Grade`] is the lexicographic order on coordinates.
//! It is a linear extension of the product order, but it is *not* the product
//! order: use [`Grade::leq`] or [`Grade::dominated_by`] for that.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Grade(Vec<i64>);

impl Grade {
    pub fn new(coords: Vec<i64>) -> Self {
        Grade(coords)
    }

    pub fn zero(d: usize) -> Self {
        Grade(vec![0; d])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Product order, checked: errors if the dimensions differ.
    pub fn leq(&self, other: &Grade) -> Result<bool> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.dominated_by(other))
    }

    /// Product order, unchecked. Callers guarantee equal dimension.
    #[inline]
    pub fn dominated_by(&self, other: &Grade) -> bool {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Componentwise `self - other`.
    pub fn sub(&self, other: &Grade) -> Grade {
        Grade(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// Componentwise maximum.
    pub fn join(&self, other: &Grade) -> Grade {
        Grade(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    /// Componentwise minimum.
    pub fn meet(&self, other: &Grade) -> Grade {
        Grade(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl From<Vec<i64>> for Grade {
    fn from(coords: Vec<i64>) -> Self {
        Grade(coords)
    }
}

impl<const N: usize> From<[i64; N]> for Grade {
    fn from(coords: [i64; N]) -> Self {
        Grade(coords.to_vec())
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Settings shared by every comparison on one dataset.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradeOrderContext {
    pub d: usize,
    /// Entity indices listed in the order equal grades should take. Indices
    /// not listed follow the listed ones, in index order.
    pub tie_break: Option<Vec<usize>>,
}

impl GradeOrderContext {
    pub fn new(d: usize) -> Self {
        GradeOrderContext { d, tie_break: None }
    }

    pub fn with_tie_break(d: usize, tie_break: Vec<usize>) -> Self {
        GradeOrderContext {
            d,
            tie_break: Some(tie_break),
        }
    }

    fn tie_rank(&self, n: usize) -> Vec<usize> {
        let mut rank = vec![usize::MAX; n];
        if let Some(order) = &self.tie_break {
            for (pos, &idx) in order.iter().enumerate() {
                if idx < n && rank[idx] == usize::MAX {
                    rank[idx] = pos;
                }
            }
        }
        rank
    }
}

/// Permutation sorting `grades` lexicographically, equal grades by tie-break
/// rank and then by index. `perm[k]` is the original index placed at position `k`.
pub fn topo_order(grades: &[Grade], ctx: &GradeOrderContext) -> Vec<usize> {
    let rank = ctx.tie_rank(grades.len());
    let mut perm: Vec<usize> = (0..grades.len()).collect();
    perm.sort_by(|&a, &b| {
        grades[a]
            .cmp(&grades[b])
            .then(rank[a].cmp(&rank[b]))
            .then(a.cmp(&b))
    });
    perm
}

/// True iff no two grades are equal.
pub fn strictly_distinct(grades: &[Grade]) -> bool {
    tied_pairs(grades).is_empty()
}

/// Pairs `(i, j)`, `i < j`, of indices carrying equal grades. Each tied class
/// is reported as consecutive pairs of its sorted members.
pub fn tied_pairs(grades: &[Grade]) -> Vec<(usize, usize)> {
    let mut idx: Vec<usize> = (0..grades.len()).collect();
    idx.sort_by(|&a, &b| grades[a].cmp(&grades[b]).then(a.cmp(&b)));
    idx.windows(2)
        .filter(|w| grades[w[0]] == grades[w[1]])
        .map(|w| (w[0], w[1]))
        .collect()
}

/// Tie-broken strict precedence between indexed entities: `a` (at index `ia`)
/// may act on `b` (at index `ib`) iff `a <= b` and either the grades differ or
/// `ia < ib`. This is a strict partial order on indices.
#[inline]
pub fn precedes(a: &Grade, ia: usize, b: &Grade, ib: usize) -> bool {
    ia != ib && a.dominated_by(b) && (a != b || ia < ib)
}

/// Returns true iff the index order is a linear extension of the product order,
/// i.e. no later grade is strictly below an earlier one.
pub fn is_linear_extension(grades: &[Grade]) -> bool {
    for i in 0..grades.len() {
        for j in (i + 1)..grades.len() {
            if grades[j] != grades[i] && grades[j].dominated_by(&grades[i]) {
                return false;
            }
        }
    }
    true
}
