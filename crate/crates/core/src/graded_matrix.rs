//! Binary presentation matrices with a grade on every row and column.
//!
//! A nonzero entry `(i, j)` stands for the monomial `t^(gr(c_j) - gr(r_i))`,
//! so the only data kept per entry is a bit. Admissible operations are the
//! additions that keep every entry homogeneous:
//!
//! * `c_i -> c_j` (column `j += column i`) when `gr(c_i) <= gr(c_j)`,
//! * `r_l -> r_k` (row `k += row l`) when `gr(r_k) <= gr(r_l)`.
//!
//! Equal grades are broken by index: the earlier index is the smaller one, so
//! only the earlier entity may act on the later one. [`GradedMatrix::add_col`]
//! and [`GradedMatrix::add_row`] enforce this tie-broken relation; the
//! `*_homogeneous` variants only require the plain product order.

use std::fmt;

use crate::error::{Error, Result};
use crate::f2::F2Matrix;
use crate::grades::{precedes, topo_order, Grade, GradeOrderContext};

#[derive(Clone)]
pub struct GradedMatrix {
    d: usize,
    mat: F2Matrix,
    row_grades: Vec<Grade>,
    col_grades: Vec<Grade>,
    row_labels: Option<Vec<String>>,
    col_labels: Option<Vec<String>>,
}

/// Labels are display-only and do not take part in equality.
impl PartialEq for GradedMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d
            && self.mat == other.mat
            && self.row_grades == other.row_grades
            && self.col_grades == other.col_grades
    }
}

impl Eq for GradedMatrix {}

impl GradedMatrix {
    pub fn new(mat: F2Matrix, row_grades: Vec<Grade>, col_grades: Vec<Grade>) -> Result<Self> {
        let d = row_grades
            .first()
            .or(col_grades.first())
            .map_or(0, Grade::dim);
        Self::with_dim(d, mat, row_grades, col_grades)
    }

    /// Like [`GradedMatrix::new`] but with an explicit parameter count, so
    /// that matrices without rows or columns still know their `d`.
    pub fn with_dim(
        d: usize,
        mat: F2Matrix,
        row_grades: Vec<Grade>,
        col_grades: Vec<Grade>,
    ) -> Result<Self> {
        if mat.n_rows() != row_grades.len() || mat.n_cols() != col_grades.len() {
            return Err(Error::Input(format!(
                "matrix is {}x{} but {} row grades and {} column grades were given",
                mat.n_rows(),
                mat.n_cols(),
                row_grades.len(),
                col_grades.len()
            )));
        }
        if let Some(g) = row_grades.iter().chain(&col_grades).find(|g| g.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: g.dim(),
            });
        }
        let m = GradedMatrix {
            d,
            mat,
            row_grades,
            col_grades,
            row_labels: None,
            col_labels: None,
        };
        m.check_homogeneity()?;
        Ok(m)
    }

    pub fn empty(d: usize) -> Self {
        GradedMatrix {
            d,
            mat: F2Matrix::zeros(0, 0),
            row_grades: Vec::new(),
            col_grades: Vec::new(),
            row_labels: None,
            col_labels: None,
        }
    }

    pub fn with_labels(mut self, rows: Vec<String>, cols: Vec<String>) -> Result<Self> {
        if rows.len() != self.n_rows() || cols.len() != self.n_cols() {
            return Err(Error::Input(format!(
                "{} row labels and {} column labels for a {}x{} matrix",
                rows.len(),
                cols.len(),
                self.n_rows(),
                self.n_cols()
            )));
        }
        self.row_labels = Some(rows);
        self.col_labels = Some(cols);
        Ok(self)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_rows(&self) -> usize {
        self.mat.n_rows()
    }

    pub fn n_cols(&self) -> usize {
        self.mat.n_cols()
    }

    pub fn matrix(&self) -> &F2Matrix {
        &self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.mat.get(i, j)
    }

    pub fn row_grades(&self) -> &[Grade] {
        &self.row_grades
    }

    pub fn col_grades(&self) -> &[Grade] {
        &self.col_grades
    }

    pub fn row_grade(&self, i: usize) -> &Grade {
        &self.row_grades[i]
    }

    pub fn col_grade(&self, j: usize) -> &Grade {
        &self.col_grades[j]
    }

    pub fn has_labels(&self) -> bool {
        self.row_labels.is_some()
    }

    pub fn row_label(&self, i: usize) -> String {
        match &self.row_labels {
            Some(l) => l[i].clone(),
            None => format!("r{}", i + 1),
        }
    }

    pub fn col_label(&self, j: usize) -> String {
        match &self.col_labels {
            Some(l) => l[j].clone(),
            None => format!("c{}", j + 1),
        }
    }

    pub fn check_homogeneity(&self) -> Result<()> {
        for (i, j) in self.mat.entries() {
            if !self.row_grades[i].dominated_by(&self.col_grades[j]) {
                return Err(Error::Homogeneity {
                    row: i,
                    col: j,
                    row_grade: self.row_grades[i].clone(),
                    col_grade: self.col_grades[j].clone(),
                });
            }
        }
        Ok(())
    }

    /// `c_src -> c_dst` under the tie-broken order.
    pub fn is_col_op_admissible(&self, src: usize, dst: usize) -> bool {
        precedes(&self.col_grades[src], src, &self.col_grades[dst], dst)
    }

    /// `r_src -> r_dst` under the tie-broken order.
    pub fn is_row_op_admissible(&self, src: usize, dst: usize) -> bool {
        precedes(&self.row_grades[dst], dst, &self.row_grades[src], src)
    }

    pub fn admissible_ops(&self) -> AdmissibleOps {
        let n = self.n_rows();
        let m = self.n_cols();
        let mut colop = Vec::new();
        let mut col_into = vec![Vec::new(); m];
        for j in 0..m {
            for i in 0..m {
                if self.is_col_op_admissible(i, j) {
                    colop.push((i, j));
                    col_into[j].push(i);
                }
            }
        }
        let mut rowop = Vec::new();
        let mut row_into = vec![Vec::new(); n];
        for k in 0..n {
            for l in 0..n {
                if self.is_row_op_admissible(l, k) {
                    rowop.push((l, k));
                    row_into[k].push(l);
                }
            }
        }
        colop.sort_unstable();
        rowop.sort_unstable();
        AdmissibleOps {
            colop,
            rowop,
            col_into,
            row_into,
        }
    }

    /// Column `dst += column src`, if admissible under the tie-broken order.
    pub fn add_col(&mut self, src: usize, dst: usize) -> Result<()> {
        self.check_col_bounds(src, dst)?;
        if !self.is_col_op_admissible(src, dst) {
            return Err(Error::NotAdmissible(format!(
                "column {src} {} -> column {dst} {}",
                self.col_grades[src], self.col_grades[dst]
            )));
        }
        self.mat.add_col(src, dst);
        debug_assert!(self.check_homogeneity().is_ok());
        Ok(())
    }

    /// Row `dst += row src`, if admissible under the tie-broken order.
    pub fn add_row(&mut self, src: usize, dst: usize) -> Result<()> {
        self.check_row_bounds(src, dst)?;
        if !self.is_row_op_admissible(src, dst) {
            return Err(Error::NotAdmissible(format!(
                "row {src} {} -> row {dst} {}",
                self.row_grades[src], self.row_grades[dst]
            )));
        }
        self.mat.add_row(src, dst);
        debug_assert!(self.check_homogeneity().is_ok());
        Ok(())
    }

    /// Column addition requiring only `gr(c_src) <= gr(c_dst)`.
    pub fn add_col_homogeneous(&mut self, src: usize, dst: usize) -> Result<()> {
        self.check_col_bounds(src, dst)?;
        if !self.col_grades[src].dominated_by(&self.col_grades[dst]) {
            return Err(Error::NotAdmissible(format!(
                "column {src} {} -> column {dst} {}",
                self.col_grades[src], self.col_grades[dst]
            )));
        }
        self.mat.add_col(src, dst);
        debug_assert!(self.check_homogeneity().is_ok());
        Ok(())
    }

    /// Row addition requiring only `gr(r_dst) <= gr(r_src)`.
    pub fn add_row_homogeneous(&mut self, src: usize, dst: usize) -> Result<()> {
        self.check_row_bounds(src, dst)?;
        if !self.row_grades[dst].dominated_by(&self.row_grades[src]) {
            return Err(Error::NotAdmissible(format!(
                "row {src} {} -> row {dst} {}",
                self.row_grades[src], self.row_grades[dst]
            )));
        }
        self.mat.add_row(src, dst);
        debug_assert!(self.check_homogeneity().is_ok());
        Ok(())
    }

    fn check_col_bounds(&self, src: usize, dst: usize) -> Result<()> {
        if src >= self.n_cols() || dst >= self.n_cols() || src == dst {
            return Err(Error::NotAdmissible(format!(
                "column pair ({src}, {dst}) in a matrix with {} columns",
                self.n_cols()
            )));
        }
        Ok(())
    }

    fn check_row_bounds(&self, src: usize, dst: usize) -> Result<()> {
        if src >= self.n_rows() || dst >= self.n_rows() || src == dst {
            return Err(Error::NotAdmissible(format!(
                "row pair ({src}, {dst}) in a matrix with {} rows",
                self.n_rows()
            )));
        }
        Ok(())
    }

    /// Entries at `rows x cols`.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> F2Matrix {
        self.mat.submatrix(rows, cols)
    }

    /// Graded submatrix on `rows x cols`, carrying grades and labels along.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> GradedMatrix {
        GradedMatrix {
            d: self.d,
            mat: self.mat.submatrix(rows, cols),
            row_grades: rows.iter().map(|&i| self.row_grades[i].clone()).collect(),
            col_grades: cols.iter().map(|&j| self.col_grades[j].clone()).collect(),
            row_labels: Some(rows.iter().map(|&i| self.row_label(i)).collect()),
            col_labels: Some(cols.iter().map(|&j| self.col_label(j)).collect()),
        }
    }

    /// Reorders rows and columns: new row `k` is old row `row_perm[k]`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> GradedMatrix {
        let out = self.select(row_perm, col_perm);
        if self.has_labels() {
            out
        } else {
            out.without_labels()
        }
    }

    pub fn without_labels(mut self) -> Self {
        self.row_labels = None;
        self.col_labels = None;
        self
    }

    /// Copy with rows and columns in the canonical linear extension of the
    /// grade order. Returns the matrix and the row and column permutations
    /// (`perm[new] = old`).
    pub fn sorted(&self, ctx: &GradeOrderContext) -> (GradedMatrix, Vec<usize>, Vec<usize>) {
        let rp = topo_order(&self.row_grades, ctx);
        let cp = topo_order(&self.col_grades, ctx);
        (self.permuted(&rp, &cp), rp, cp)
    }

    /// Concatenates the columns of `other` to the right of `self`.
    pub fn hstack(&self, other: &GradedMatrix) -> Result<GradedMatrix> {
        if self.n_rows() != other.n_rows() || self.row_grades != other.row_grades {
            return Err(Error::Input(
                "horizontal concatenation needs identical row bases".into(),
            ));
        }
        let mut mat = self.mat.clone();
        for c in other.mat.cols() {
            mat.push_col(c.clone());
        }
        let mut col_grades = self.col_grades.clone();
        col_grades.extend(other.col_grades.iter().cloned());
        let mut out = GradedMatrix::with_dim(self.d, mat, self.row_grades.clone(), col_grades)?;
        if self.has_labels() || other.has_labels() {
            let rows = (0..self.n_rows()).map(|i| self.row_label(i)).collect();
            let cols = (0..self.n_cols())
                .map(|j| self.col_label(j))
                .chain((0..other.n_cols()).map(|j| other.col_label(j)))
                .collect();
            out = out.with_labels(rows, cols)?;
        }
        Ok(out)
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut F2Matrix {
        &mut self.mat
    }
}

impl fmt::Debug for GradedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GradedMatrix {}x{} (d={})", self.n_rows(), self.n_cols(), self.d)?;
        write!(f, "{:>12}", "")?;
        for j in 0..self.n_cols() {
            write!(f, " {}{}", self.col_label(j), self.col_grades[j])?;
        }
        writeln!(f)?;
        for i in 0..self.n_rows() {
            write!(f, "{:>12}", format!("{}{}", self.row_label(i), self.row_grades[i]))?;
            for j in 0..self.n_cols() {
                write!(f, " {}", u8::from(self.get(i, j)))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// The admissible operations of one graded matrix.
///
/// `colop` holds `(i, j)` for `c_i -> c_j`; `rowop` holds `(l, k)` for
/// `r_l -> r_k` (source first). `col_into[j]` and `row_into[k]` list the
/// sources acting on a given target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleOps {
    pub colop: Vec<(usize, usize)>,
    pub rowop: Vec<(usize, usize)>,
    pub col_into: Vec<Vec<usize>>,
    pub row_into: Vec<Vec<usize>>,
}

impl AdmissibleOps {
    pub fn contains_col(&self, i: usize, j: usize) -> bool {
        self.col_into.get(j).is_some_and(|s| s.contains(&i))
    }

    pub fn contains_row(&self, l: usize, k: usize) -> bool {
        self.row_into.get(k).is_some_and(|s| s.contains(&l))
    }
}
