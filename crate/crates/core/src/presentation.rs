//! Presentation matrices of `H_p` of a filtration, kernels of graded
//! matrices, minimization, and the raw presentation text format.
//!
//! Raw format:
//!
//! ```text
//! mppres 1
//! params 2
//! rows 2
//! r 0 1
//! r 1 0
//! cols 1
//! c 1 1 : 0 1
//! ```
//!
//! Column lines list the 0-based rows holding a 1.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::f2::{col_reduce, BitVec, F2Matrix};
use crate::filtration::{content_lines, parse_grade, parse_header, parse_int, Filtration};
use crate::graded_matrix::GradedMatrix;
use crate::grades::{topo_order, Grade, GradeOrderContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CaseTag {
    #[serde(rename = "H0")]
    H0,
    #[serde(rename = "TWO_PARAM")]
    TwoParam,
    #[serde(rename = "D_PARAM")]
    DParam,
    #[serde(rename = "RAW")]
    Raw,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::H0 => "H0",
            CaseTag::TwoParam => "TWO_PARAM",
            CaseTag::DParam => "D_PARAM",
            CaseTag::Raw => "RAW",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub matrix: GradedMatrix,
    pub case_tag: CaseTag,
    pub minimized: bool,
}

impl Presentation {
    pub fn new(matrix: GradedMatrix, case_tag: CaseTag) -> Self {
        Presentation {
            matrix,
            case_tag,
            minimized: false,
        }
    }

    /// True iff no nonzero entry joins a row and column of equal grade.
    pub fn has_unit_entries(&self) -> bool {
        has_unit_entries(&self.matrix)
    }
}

fn has_unit_entries(m: &GradedMatrix) -> bool {
    m.matrix()
        .entries()
        .into_iter()
        .any(|(i, j)| m.row_grade(i) == m.col_grade(j))
}

/// An element of the kernel of a graded matrix, born at `grade`, given by
/// its coordinates over the matrix's columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelElement {
    pub grade: Grade,
    pub coords: BitVec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelMode {
    /// A basis of the (free) kernel; requires `d == 2`.
    Basis2Param,
    /// A generating set, valid for every `d`.
    GensetDParam,
}

/// The grid spanned by the coordinates of `grades`, in lexicographic order.
pub fn grid(grades: &[Grade], d: usize) -> Vec<Grade> {
    let axes: Vec<Vec<i64>> = (0..d)
        .map(|k| {
            grades
                .iter()
                .map(|g| g.coords()[k])
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        })
        .collect();
    if axes.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; d];
    loop {
        out.push(Grade::new((0..d).map(|k| axes[k][idx[k]]).collect()));
        let mut k = d;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < axes[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Kernel generators of `m`, swept over the grid of its column grades.
///
/// At each grid grade `z` the columns with grade `<= z` are reduced in
/// lexicographic grade order. A column that reduces to zero yields the element recorded by its
/// combination, unless that column already produced an element at a grade
/// `<= z` (in basis mode: at any grade).
pub fn kernel_gens(m: &GradedMatrix, mode: KernelMode) -> Result<Vec<KernelElement>> {
    if mode == KernelMode::Basis2Param && m.d() != 2 {
        return Err(Error::Input(format!(
            "a kernel basis sweep needs 2 parameters, this matrix has {}",
            m.d()
        )));
    }
    let n_cols = m.n_cols();
    // lexicographic column order makes each column's birth grade unique in
    // two parameters, whatever order the matrix itself uses
    let order = topo_order(m.col_grades(), &GradeOrderContext::new(m.d()));
    let mut recorded: Vec<Vec<Grade>> = vec![Vec::new(); n_cols];
    let mut out = Vec::new();
    for z in grid(m.col_grades(), m.d()) {
        let active: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&j| m.col_grade(j).dominated_by(&z))
            .collect();
        let mut cols: Vec<BitVec> = active.iter().map(|&j| m.matrix().col(j).clone()).collect();
        let mut slave: Vec<BitVec> = active
            .iter()
            .map(|&j| BitVec::from_ones(n_cols, &[j]))
            .collect();
        let mut pivot_of_row: Vec<Option<usize>> = vec![None; m.n_rows()];
        for a in 0..active.len() {
            while let Some(l) = cols[a].last_one() {
                match pivot_of_row[l] {
                    Some(b) => {
                        let (lo, hi) = cols.split_at_mut(a);
                        hi[0].xor_assign(&lo[b]);
                        let (slo, shi) = slave.split_at_mut(a);
                        shi[0].xor_assign(&slo[b]);
                    }
                    None => {
                        pivot_of_row[l] = Some(a);
                        break;
                    }
                }
            }
            if !cols[a].is_zero() {
                continue;
            }
            let j = active[a];
            let fresh = match mode {
                KernelMode::Basis2Param => recorded[j].is_empty(),
                KernelMode::GensetDParam => !recorded[j].iter().any(|g| g.dominated_by(&z)),
            };
            if fresh {
                recorded[j].push(z.clone());
                out.push(KernelElement {
                    grade: z.clone(),
                    coords: slave[a].clone(),
                });
            }
        }
    }
    Ok(out)
}

/// The kernel elements as a graded matrix: one row per column of `m`, one
/// column per element.
pub fn kernel_matrix(m: &GradedMatrix, basis: &[KernelElement]) -> Result<GradedMatrix> {
    let mat = F2Matrix::from_columns(m.n_cols(), basis.iter().map(|k| k.coords.clone()).collect())?;
    let rows: Vec<String> = (0..m.n_cols()).map(|j| m.col_label(j)).collect();
    let cols = basis.iter().map(|k| element_label(k, &rows)).collect();
    GradedMatrix::with_dim(
        m.d(),
        mat,
        m.col_grades().to_vec(),
        basis.iter().map(|k| k.grade.clone()).collect(),
    )?
    .with_labels(rows, cols)
}

fn element_label(k: &KernelElement, labels: &[String]) -> String {
    let terms: Vec<&str> = k.coords.ones().map(|i| labels[i].as_str()).collect();
    format!("[{}]", terms.join("+"))
}

/// Rewrites every column of `cols` as a combination of the kernel elements
/// in `basis`, using at each column only elements of grade `<=` its grade.
pub fn rewrite_in_basis(cols: &GradedMatrix, basis: &[KernelElement]) -> Result<GradedMatrix> {
    let n = cols.n_rows();
    if let Some(k) = basis.iter().find(|k| k.coords.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: k.coords.len(),
        });
    }
    let mut out = F2Matrix::zeros(basis.len(), cols.n_cols());
    for j in 0..cols.n_cols() {
        let g = cols.col_grade(j);
        let usable: Vec<usize> = (0..basis.len())
            .filter(|&b| basis[b].grade.dominated_by(g))
            .collect();
        let s = F2Matrix::from_columns(n, usable.iter().map(|&b| basis[b].coords.clone()).collect())?;
        let red = col_reduce(&s, cols.matrix().col(j))?;
        if !red.reduced.is_zero() {
            return Err(Error::Internal(format!(
                "column {} at {g} is not in the span of the kernel generators",
                cols.col_label(j)
            )));
        }
        for k in red.combination.ones() {
            out.set(usable[k], j, true);
        }
    }
    let row_labels: Vec<String> = (0..n).map(|i| cols.row_label(i)).collect();
    GradedMatrix::with_dim(
        cols.d(),
        out,
        basis.iter().map(|k| k.grade.clone()).collect(),
        cols.col_grades().to_vec(),
    )?
    .with_labels(
        basis.iter().map(|k| element_label(k, &row_labels)).collect(),
        (0..cols.n_cols()).map(|j| cols.col_label(j)).collect(),
    )
}

pub fn pres_h0(f: &Filtration) -> Result<Presentation> {
    Ok(Presentation::new(f.boundary_matrix(1)?, CaseTag::H0))
}

pub fn pres_2param(f: &Filtration, p: usize) -> Result<Presentation> {
    if f.d() != 2 {
        return Err(Error::Input(format!(
            "the two-parameter construction needs d = 2, got d = {}",
            f.d()
        )));
    }
    if p == 0 {
        return pres_h0(f);
    }
    let dp = f.boundary_matrix(p)?;
    let basis = kernel_gens(&dp, KernelMode::Basis2Param)?;
    let dq = f.boundary_matrix(p + 1)?;
    Ok(Presentation::new(rewrite_in_basis(&dq, &basis)?, CaseTag::TwoParam))
}

pub fn pres_dparam(f: &Filtration, p: usize) -> Result<Presentation> {
    if p == 0 {
        return pres_h0(f);
    }
    let dp = f.boundary_matrix(p)?;
    let gens = kernel_gens(&dp, KernelMode::GensetDParam)?;
    let dq = f.boundary_matrix(p + 1)?;
    let bar = rewrite_in_basis(&dq, &gens)?;
    // relations among the generators themselves
    let gmat = kernel_matrix(&dp, &gens)?;
    let syz = kernel_gens(&gmat, KernelMode::GensetDParam)?;
    let syz_mat = F2Matrix::from_columns(gens.len(), syz.iter().map(|k| k.coords.clone()).collect())?;
    let gen_labels: Vec<String> = (0..bar.n_rows()).map(|i| bar.row_label(i)).collect();
    let syz_part = GradedMatrix::with_dim(
        f.d(),
        syz_mat,
        bar.row_grades().to_vec(),
        syz.iter().map(|k| k.grade.clone()).collect(),
    )?
    .with_labels(
        gen_labels.clone(),
        (0..syz.len()).map(|k| format!("y{}", k + 1)).collect(),
    )?;
    Ok(Presentation::new(bar.hstack(&syz_part)?, CaseTag::DParam))
}

/// Removes unit entries (row and column of equal grade) one pivot at a time,
/// smallest `(grade, row, col)` first. The cokernel is unchanged.
pub fn minimize(p: &Presentation) -> Presentation {
    let mut m = p.matrix.clone();
    loop {
        let pivot = m
            .matrix()
            .entries()
            .into_iter()
            .filter(|&(i, j)| m.row_grade(i) == m.col_grade(j))
            .min_by(|&(i, j), &(k, l)| m.row_grade(i).cmp(m.row_grade(k)).then((i, j).cmp(&(k, l))));
        let Some((i, j)) = pivot else { break };
        for r in m.matrix().col(j).ones().filter(|&r| r != i).collect::<Vec<_>>() {
            m.add_row_homogeneous(i, r).expect("unit pivot dominates its column");
        }
        for c in m.matrix().row(i).ones().filter(|&c| c != j).collect::<Vec<_>>() {
            m.add_col_homogeneous(j, c).expect("unit pivot is dominated by its row");
        }
        let rows: Vec<usize> = (0..m.n_rows()).filter(|&r| r != i).collect();
        let cols: Vec<usize> = (0..m.n_cols()).filter(|&c| c != j).collect();
        m = m.select(&rows, &cols);
    }
    if !p.matrix.has_labels() {
        m = m.without_labels();
    }
    Presentation {
        matrix: m,
        case_tag: p.case_tag,
        minimized: true,
    }
}

fn parse_count<'a, I>(lines: &mut I, key: &str, last: &mut usize) -> Result<usize>
where
    I: Iterator<Item = (usize, Vec<&'a str>)>,
{
    let (ln, t) = lines.next().ok_or(Error::Parse {
        line: *last + 1,
        message: format!("missing '{key} <n>' line"),
    })?;
    *last = ln;
    if t.len() != 2 || t[0] != key {
        return Err(Error::Parse {
            line: ln,
            message: format!("expected '{key} <n>'"),
        });
    }
    parse_int(t[1], ln, "count")
}

pub fn parse_presentation(text: &str) -> Result<GradedMatrix> {
    let mut lines = content_lines(text);
    let (mut last, d) = parse_header(&mut lines, "mppres")?;

    let n = parse_count(&mut lines, "rows", &mut last)?;
    let mut row_grades = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, t) = lines.next().ok_or(Error::Parse {
            line: last + 1,
            message: format!("expected {n} row lines"),
        })?;
        last = ln;
        if t[0] != "r" {
            return Err(Error::Parse {
                line: ln,
                message: "expected a row line 'r <grade>'".into(),
            });
        }
        row_grades.push(parse_grade(&t[1..], d, ln)?);
    }

    let m = parse_count(&mut lines, "cols", &mut last)?;
    let mut col_grades = Vec::with_capacity(m);
    let mut mat = F2Matrix::zeros(n, m);
    for j in 0..m {
        let (ln, t) = lines.next().ok_or(Error::Parse {
            line: last + 1,
            message: format!("expected {m} column lines"),
        })?;
        last = ln;
        if t[0] != "c" {
            return Err(Error::Parse {
                line: ln,
                message: "expected a column line 'c <grade> : <rows>'".into(),
            });
        }
        let colon = t.iter().position(|&x| x == ":").ok_or(Error::Parse {
            line: ln,
            message: "missing ':' between grade and rows".into(),
        })?;
        let g = parse_grade(&t[1..colon], d, ln)?;
        for tok in &t[colon + 1..] {
            let i: usize = parse_int(tok, ln, "row index")?;
            if i >= n {
                return Err(Error::Parse {
                    line: ln,
                    message: format!("row index {i} out of range (0..{n})"),
                });
            }
            if mat.get(i, j) {
                return Err(Error::Parse {
                    line: ln,
                    message: format!("row index {i} repeated"),
                });
            }
            if !row_grades[i].dominated_by(&g) {
                return Err(Error::Parse {
                    line: ln,
                    message: format!(
                        "entry in row {i} breaks homogeneity: {} is not <= {g}",
                        row_grades[i]
                    ),
                });
            }
            mat.set(i, j, true);
        }
        col_grades.push(g);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::Parse {
            line: ln,
            message: "unexpected content after the last column".into(),
        });
    }
    GradedMatrix::with_dim(d, mat, row_grades, col_grades)
}

pub fn write_presentation(m: &GradedMatrix) -> String {
    let grade = |g: &Grade| {
        g.coords()
            .iter()
            .map(i64::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut out = format!("mppres 1\nparams {}\nrows {}\n", m.d(), m.n_rows());
    for g in m.row_grades() {
        out.push_str(&format!("r {}\n", grade(g)));
    }
    out.push_str(&format!("cols {}\n", m.n_cols()));
    for j in 0..m.n_cols() {
        let rows: Vec<String> = m.matrix().col(j).ones().map(|i| i.to_string()).collect();
        let sep = if rows.is_empty() { "" } else { " " };
        out.push_str(&format!("c {} :{sep}{}\n", grade(m.col_grade(j)), rows.join(" ")));
    }
    out
}
