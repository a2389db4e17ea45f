//! Bit-packed linear algebra over F2.
//!
//! Matrices are stored column-major, one packed [`BitVec`] per column, since
//! every reduction in the engine is dominated by column additions.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_ones(len: usize, ones: &[usize]) -> Self {
        let mut v = BitVec::zeros(len);
        for &i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len, "bit {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len, "bit {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    /// `self += other` over F2.
    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Highest set index, or `None` for the zero vector.
    pub fn last_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate().rev() {
            if w != 0 {
                return Some(wi * WORD + (WORD - 1 - w.leading_zeros() as usize));
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + tz)
            })
        })
    }

    pub fn push(&mut self, bit: bool) {
        if self.len % WORD == 0 {
            self.words.push(0);
        }
        self.len += 1;
        if bit {
            self.set(self.len - 1, true);
        }
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Matrix {
    n_rows: usize,
    cols: Vec<BitVec>,
}

impl F2Matrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        F2Matrix {
            n_rows,
            cols: vec![BitVec::zeros(n_rows); n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = F2Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from row-major 0/1 data.
    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut m = F2Matrix::zeros(n_rows, n_cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n_cols, "ragged row {i}");
            for (j, &v) in row.iter().enumerate() {
                if v & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn from_entries(n_rows: usize, n_cols: usize, entries: &[(usize, usize)]) -> Result<Self> {
        let mut m = F2Matrix::zeros(n_rows, n_cols);
        for &(i, j) in entries {
            if i >= n_rows || j >= n_cols {
                return Err(Error::Input(format!(
                    "entry ({i}, {j}) outside a {n_rows}x{n_cols} matrix"
                )));
            }
            m.cols[j].flip(i);
        }
        Ok(m)
    }

    pub fn from_columns(n_rows: usize, cols: Vec<BitVec>) -> Result<Self> {
        if let Some(c) = cols.iter().find(|c| c.len() != n_rows) {
            return Err(Error::Input(format!(
                "column of length {} in a matrix with {n_rows} rows",
                c.len()
            )));
        }
        Ok(F2Matrix { n_rows, cols })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cols[j].get(i)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.cols[j].set(i, value)
    }

    pub fn col(&self, j: usize) -> &BitVec {
        &self.cols[j]
    }

    pub fn cols(&self) -> &[BitVec] {
        &self.cols
    }

    pub fn push_col(&mut self, col: BitVec) {
        assert_eq!(col.len(), self.n_rows);
        self.cols.push(col);
    }

    /// Column `dst += src`.
    pub fn add_col(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst);
        let (a, b) = if src < dst {
            let (lo, hi) = self.cols.split_at_mut(dst);
            (&lo[src], &mut hi[0])
        } else {
            let (lo, hi) = self.cols.split_at_mut(src);
            (&hi[0], &mut lo[dst])
        };
        b.xor_assign(a);
    }

    /// Row `dst += src`.
    pub fn add_row(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst);
        for col in &mut self.cols {
            if col.get(src) {
                col.flip(dst);
            }
        }
    }

    pub fn row(&self, i: usize) -> BitVec {
        let mut r = BitVec::zeros(self.n_cols());
        for (j, col) in self.cols.iter().enumerate() {
            if col.get(i) {
                r.set(j, true);
            }
        }
        r
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.n_cols(), self.n_rows);
        for (j, col) in self.cols.iter().enumerate() {
            for i in col.ones() {
                t.cols[i].set(j, true);
            }
        }
        t
    }

    /// Nonzero positions in column-major order.
    pub fn entries(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (j, col) in self.cols.iter().enumerate() {
            out.extend(col.ones().map(|i| (i, j)));
        }
        out.sort_unstable();
        out
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(BitVec::is_zero)
    }

    /// Copy of the entries at `rows x cols`, in the given index order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> F2Matrix {
        let mut out = F2Matrix::zeros(rows.len(), cols.len());
        for (jj, &j) in cols.iter().enumerate() {
            let src = &self.cols[j];
            for (ii, &i) in rows.iter().enumerate() {
                if src.get(i) {
                    out.cols[jj].set(ii, true);
                }
            }
        }
        out
    }

    /// Row-major 0/1 dump, handy for tests and display.
    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.n_rows)
            .map(|i| self.cols.iter().map(|c| u8::from(c.get(i))).collect())
            .collect()
    }

    pub fn mul(&self, other: &F2Matrix) -> Result<F2Matrix> {
        if self.n_cols() != other.n_rows {
            return Err(Error::Input(format!(
                "cannot multiply {}x{} by {}x{}",
                self.n_rows,
                self.n_cols(),
                other.n_rows,
                other.n_cols()
            )));
        }
        let mut out = F2Matrix::zeros(self.n_rows, other.n_cols());
        for (j, ocol) in other.cols.iter().enumerate() {
            for k in ocol.ones() {
                out.cols[j].xor_assign(&self.cols[k]);
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.n_rows, self.n_cols())?;
        for row in self.to_rows() {
            let s: String = row.iter().map(|b| if *b == 1 { '1' } else { '.' }).collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

/// Lowest (largest-index) nonzero row of column `j`.
pub fn low(m: &F2Matrix, j: usize) -> Option<usize> {
    m.col(j).last_one()
}

/// Column additions performed by [`col_reduce`], as `(source, target)` pairs
/// in application order. Index `n` (the number of source columns) denotes the
/// target column `c`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ColOpLog {
    pub ops: Vec<(usize, usize)>,
}

impl ColOpLog {
    /// Replays the log on `[s | c]` and returns the final state of `c`.
    pub fn replay(&self, s: &F2Matrix, c: &BitVec) -> BitVec {
        let mut work = s.clone();
        work.push_col(c.clone());
        for &(src, dst) in &self.ops {
            work.add_col(src, dst);
        }
        work.cols.pop().expect("target column")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColReduction {
    pub reduced: BitVec,
    pub log: ColOpLog,
    /// Original source columns whose sum was added into `c`:
    /// `reduced == c + sum(S[:, k] for k in combination)`.
    pub combination: BitVec,
}

/// Reduces `[s | c]` to a lowest-conflict-free matrix with left-to-right
/// column additions and returns the final state of `c`.
///
/// The result is zero iff `c` lies in the column span of `s`.
pub fn col_reduce(s: &F2Matrix, c: &BitVec) -> Result<ColReduction> {
    if c.len() != s.n_rows() {
        return Err(Error::DimensionMismatch {
            expected: s.n_rows(),
            found: c.len(),
        });
    }
    let n = s.n_cols();
    let mut cols: Vec<BitVec> = s.cols.clone();
    cols.push(c.clone());
    // slave[k] records which original columns sum to the current column k
    let mut slave: Vec<BitVec> = (0..=n).map(|k| BitVec::from_ones(n + 1, &[k])).collect();
    let mut pivot_of_row: Vec<Option<usize>> = vec![None; s.n_rows()];
    let mut log = ColOpLog::default();

    for i in 0..=n {
        while let Some(l) = cols[i].last_one() {
            match pivot_of_row[l] {
                Some(j) => {
                    let (lo, hi) = cols.split_at_mut(i);
                    hi[0].xor_assign(&lo[j]);
                    let (slo, shi) = slave.split_at_mut(i);
                    shi[0].xor_assign(&slo[j]);
                    log.ops.push((j, i));
                }
                None => {
                    pivot_of_row[l] = Some(i);
                    break;
                }
            }
        }
    }

    let reduced = cols.pop().expect("target column");
    let mut combination = BitVec::zeros(n);
    for k in slave[n].ones().filter(|&k| k < n) {
        combination.set(k, true);
    }
    Ok(ColReduction {
        reduced,
        log,
        combination,
    })
}

/// Rank over F2 by left-to-right column reduction.
pub fn rank(m: &F2Matrix) -> usize {
    let mut cols: Vec<BitVec> = m.cols.clone();
    let mut pivot_of_row: Vec<Option<usize>> = vec![None; m.n_rows()];
    let mut r = 0;
    for i in 0..cols.len() {
        while let Some(l) = cols[i].last_one() {
            match pivot_of_row[l] {
                Some(j) => {
                    let (lo, hi) = cols.split_at_mut(i);
                    hi[0].xor_assign(&lo[j]);
                }
                None => {
                    pivot_of_row[l] = Some(i);
                    r += 1;
                    break;
                }
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn low_examples() {
        let m = F2Matrix::from_rows(&[vec![1, 0, 0], vec![1, 0, 0], vec![0, 0, 1]]);
        assert_eq!(low(&m, 0), Some(1));
        assert_eq!(low(&m, 1), None);
        assert_eq!(low(&m, 2), Some(2));
    }

    #[test]
    fn bitvec_last_one_across_words() {
        let mut v = BitVec::zeros(130);
        assert_eq!(v.last_one(), None);
        v.set(3, true);
        v.set(127, true);
        assert_eq!(v.last_one(), Some(127));
        v.set(129, true);
        assert_eq!(v.last_one(), Some(129));
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![3, 127, 129]);
    }

    #[test]
    fn col_reduce_full_span() {
        let s = F2Matrix::identity(2);
        let r = col_reduce(&s, &BitVec::from_bools(&[true, true])).unwrap();
        assert!(r.reduced.is_zero());
        assert_eq!(r.combination, BitVec::from_bools(&[true, true]));
    }

    #[test]
    fn col_reduce_worked_iteration() {
        // source columns of the second iteration of the working example
        let s = F2Matrix::from_rows(&[
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![1, 0, 1],
            vec![0, 1, 1],
        ]);
        let c = BitVec::from_bools(&[false, true, true, false]);
        let r = col_reduce(&s, &c).unwrap();
        assert!(r.reduced.is_zero());
        // c = S[:,1] + S[:,2] (0-based)
        assert_eq!(r.combination, BitVec::from_bools(&[false, true, true]));
        // the third source column is itself reduced to (1,1,0,0) before it is
        // added into c, so the log shows columns 0 and 2 acting on c
        let into_c: Vec<usize> = r.log.ops.iter().filter(|op| op.1 == 3).map(|op| op.0).collect();
        assert_eq!(into_c, vec![0, 2]);
        assert_eq!(r.log.replay(&s, &c), r.reduced);
    }

    #[test]
    fn col_reduce_empty_source() {
        let s = F2Matrix::zeros(2, 0);
        let c = BitVec::from_bools(&[true, false]);
        let r = col_reduce(&s, &c).unwrap();
        assert_eq!(r.reduced, c);
        assert!(r.log.ops.is_empty());
    }

    #[test]
    fn col_reduce_dimension_mismatch() {
        let s = F2Matrix::zeros(3, 1);
        assert!(matches!(
            col_reduce(&s, &BitVec::zeros(2)),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&F2Matrix::identity(3)), 3);
        assert_eq!(rank(&F2Matrix::zeros(3, 4)), 0);
        let a = F2Matrix::from_rows(&[vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]);
        assert_eq!(rank(&a), 2);
    }

    #[test]
    fn transpose_and_row_ops_agree() {
        let mut a = F2Matrix::from_rows(&[vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]);
        let mut t = a.transpose();
        a.add_row(2, 0);
        t.add_col(2, 0);
        assert_eq!(a.transpose(), t);
    }

    fn matrix_strategy(max: usize) -> impl Strategy<Value = F2Matrix> {
        (0..=max, 0..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(0u8..2, c), r).prop_map(move |rows| {
                if rows.is_empty() {
                    F2Matrix::zeros(0, c)
                } else {
                    F2Matrix::from_rows(&rows)
                }
            })
        })
    }

    /// Gaussian elimination on row-major `Vec<Vec<bool>>`, kept separate from
    /// the column-reduction routine under test.
    fn rank_by_rows(m: &F2Matrix) -> usize {
        let mut rows: Vec<Vec<bool>> = m
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(|b| b == 1).collect())
            .collect();
        let mut rank = 0;
        for col in 0..m.n_cols() {
            if let Some(p) = (rank..rows.len()).find(|&i| rows[i][col]) {
                rows.swap(rank, p);
                for i in 0..rows.len() {
                    if i != rank && rows[i][col] {
                        let pivot = rows[rank].clone();
                        for (x, y) in rows[i].iter_mut().zip(pivot) {
                            *x ^= y;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn col_reduce_zero_iff_in_span(s in matrix_strategy(12), seed in proptest::collection::vec(0u8..2, 12)) {
            let c = BitVec::from_bools(&seed.iter().take(s.n_rows()).map(|&b| b == 1).collect::<Vec<_>>());
            prop_assume!(c.len() == s.n_rows());
            let r = col_reduce(&s, &c).unwrap();
            let mut aug = s.clone();
            aug.push_col(c.clone());
            prop_assert_eq!(r.reduced.is_zero(), rank_by_rows(&aug) == rank_by_rows(&s));
            // log replay and combination both reproduce the result
            prop_assert_eq!(&r.log.replay(&s, &c), &r.reduced);
            let mut via_comb = c.clone();
            for k in r.combination.ones() {
                via_comb.xor_assign(s.col(k));
            }
            prop_assert_eq!(&via_comb, &r.reduced);
            for &(src, dst) in &r.log.ops {
                prop_assert!(src < dst);
            }
        }

        #[test]
        fn rank_matches_row_elimination(m in matrix_strategy(12)) {
            prop_assert_eq!(rank(&m), rank_by_rows(&m));
        }

        #[test]
        fn reduced_lows_are_unique(m in matrix_strategy(10)) {
            let mut m = m;
            let n = m.n_cols();
            let mut pivot = vec![None; m.n_rows()];
            for i in 0..n {
                while let Some(l) = low(&m, i) {
                    match pivot[l] {
                        Some(j) => m.add_col(j, i),
                        None => { pivot[l] = Some(i); break; }
                    }
                }
            }
            let lows: Vec<usize> = (0..n).filter_map(|j| low(&m, j)).collect();
            let mut dedup = lows.clone();
            dedup.sort_unstable();
            dedup.dedup();
            prop_assert_eq!(dedup.len(), lows.len());
        }
    }
}
